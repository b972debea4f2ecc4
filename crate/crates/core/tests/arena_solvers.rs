mod common;

use altsim_core::arena::{
    attractor, solve_buchi, solve_parity3, solve_parity_zielonka, solve_reachability_to, solve_safety,
    verify_strategy, ArenaBuilder, GameArena, Payload, Player, StrategyObjective,
};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn arena_from_seed(seed: u64, n: usize) -> GameArena {
    random_arena(&mut rng(seed), n)
}

fn subset(seed: u64, n: usize) -> Vec<bool> {
    let mut r = rng(seed ^ 0xA5A5);
    (0..n).map(|_| r.gen_bool(0.3)).collect()
}

proptest! {
    #[test]
    fn attractor_matches_fixpoint_sweeps(seed in any::<u64>(), n in 1usize..=30, p1 in any::<bool>()) {
        let g = arena_from_seed(seed, n);
        let t = subset(seed, n);
        let player = if p1 { Player::P1 } else { Player::P2 };
        let (attr, strat) = attractor(&g, player, &t);
        prop_assert_eq!(&attr, &naive_attractor(&g, player, &t));
        prop_assert!(verify_strategy(&g, &strat, StrategyObjective::Reach(&t), &attr).unwrap().is_ok());
    }

    #[test]
    fn reachability_partitions_and_is_dual_to_safety(seed in any::<u64>(), n in 1usize..=30) {
        let g = arena_from_seed(seed, n);
        let t = subset(seed, n);
        let res = solve_reachability_to(&g, &t);
        for v in 0..n {
            prop_assert!(res.win1[v] != res.win2[v]);
        }
        let safe: Vec<bool> = t.iter().map(|b| !b).collect();
        let (win_safe, _) = solve_safety(&g, Player::P2, &safe);
        prop_assert_eq!(&win_safe, &res.win2);
        prop_assert!(verify_strategy(&g, &res.strat2, StrategyObjective::Safety(&safe), &res.win2).unwrap().is_ok());
    }

    #[test]
    fn reachability_is_monotone_in_the_target(seed in any::<u64>(), n in 1usize..=30) {
        let g = arena_from_seed(seed, n);
        let t = subset(seed, n);
        let mut bigger = t.clone();
        bigger[(seed as usize) % n] = true;
        let (small, large) = (solve_reachability_to(&g, &t), solve_reachability_to(&g, &bigger));
        for v in 0..n {
            prop_assert!(!small.win1[v] || large.win1[v]);
        }
    }

    #[test]
    fn buchi_equals_two_priority_parity(seed in any::<u64>(), n in 1usize..=30) {
        let g = arena_from_seed(seed, n);
        let acc = subset(seed, n);
        let prio = acc.iter().map(|&a| if a { 0 } else { 1 }).collect();
        let pg = g.with_payload(Payload::Priority(prio)).unwrap();
        let (win, strat) = solve_buchi(&g, Player::P2, &acc);
        let z = solve_parity_zielonka(&pg, Player::P2).unwrap();
        prop_assert_eq!(&win, &z.win_even);
        let obj = StrategyObjective::Parity { even: Player::P2 };
        prop_assert!(verify_strategy(&pg, &strat, obj, &win).unwrap().is_ok());
    }

    #[test]
    fn progress_measures_match_zielonka(seed in any::<u64>(), n in 1usize..=40, p1_even in any::<bool>()) {
        let g = arena_from_seed(seed, n);
        let even = if p1_even { Player::P1 } else { Player::P2 };
        let spm = solve_parity3(&g, even).unwrap();
        let z = solve_parity_zielonka(&g, even).unwrap();
        prop_assert_eq!(&spm.win_even, &z.win_even);
        prop_assert_eq!(&spm.win_odd, &z.win_odd);
        let obj = StrategyObjective::Parity { even };
        prop_assert!(verify_strategy(&g, &spm.strategy, obj, &spm.win_even).unwrap().is_ok());
        prop_assert!(verify_strategy(&g, &z.strat_odd, obj, &z.win_odd).unwrap().is_ok());
    }
}

/// Every 2-vertex arena: owners, edge sets (each vertex needs a successor)
/// and priorities.
#[test]
fn parity_solvers_agree_on_all_two_vertex_arenas() {
    let mut count = 0;
    for owners in 0..4u32 {
        for edges in 0..16u32 {
            let out = |v: usize| (0..2).filter(move |u| edges >> (2 * v + u) & 1 == 1);
            if out(0).count() == 0 || out(1).count() == 0 {
                continue;
            }
            for p0 in 0..3u8 {
                for p1 in 0..3u8 {
                    let mut b = ArenaBuilder::new();
                    for v in 0..2 {
                        b.add_vertex(if owners >> v & 1 == 1 { Player::P1 } else { Player::P2 });
                    }
                    for v in 0..2 {
                        for u in out(v) {
                            b.add_edge(v, u);
                        }
                    }
                    let g = b.build(Payload::Priority(vec![p0, p1])).unwrap();
                    let spm = solve_parity3(&g, Player::P2).unwrap();
                    let z = solve_parity_zielonka(&g, Player::P2).unwrap();
                    assert_eq!(spm.win_even, z.win_even);
                    count += 1;
                }
            }
        }
    }
    assert_eq!(count, 4 * 9 * 9);
}

#[test]
fn dead_ends_are_rejected() {
    let mut b = ArenaBuilder::new();
    b.add_vertex(Player::P1);
    b.add_vertex(Player::P2);
    b.add_edge(0, 1);
    assert!(b.build(Payload::None).is_err());
}
