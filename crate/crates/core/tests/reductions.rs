mod common;

use altsim_core::arena::{solve_reachability, Player};
use altsim_core::reductions::{build_altsim_game, compute_fairness_region, play_to_runs, Vertex};
use altsim_core::relations::{altsim_basic, fairaltsim_detail, fairsim_detail};
use altsim_core::systems::Ats;
use altsim_core::SuccIndex;
use common::*;
use proptest::prelude::*;

fn one_step(k: &Ats, w: usize, next: usize) -> bool {
    k.enabled1[w].iter().any(|&a| k.successors(w, a).contains(&next))
}

proptest! {
    #[test]
    fn altsim_game_sizes_within_bounds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (fair_ats(&mut r, 5, 3), fair_ats(&mut r, 5, 3));
        let (idx, idxp) = (SuccIndex::build(&a.ats).unwrap(), SuccIndex::build(&b.ats).unwrap());
        let g = build_altsim_game(&a.ats, &b.ats, &idx, &idxp).unwrap();
        let sum = altsim_sum_bound(&a.ats, &b.ats);
        prop_assert!(g.arena.num_vertices() <= sum.vertices);
        prop_assert!(g.arena.num_edges() <= sum.edges);
        prop_assert!(g.arena.validate().is_empty());
    }

    #[test]
    fn safety_region_is_the_relation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (fair_ats(&mut r, 5, 3), fair_ats(&mut r, 5, 3));
        let (idx, idxp) = (SuccIndex::build(&a.ats).unwrap(), SuccIndex::build(&b.ats).unwrap());
        let g = build_altsim_game(&a.ats, &b.ats, &idx, &idxp).unwrap();
        let res = solve_reachability(&g.arena).unwrap();
        prop_assert_eq!(g.pairs_in(&res.win2), altsim_basic(&a.ats, &b.ats).unwrap().pairs().to_vec());
    }

    #[test]
    fn plays_decode_into_runs_of_both_systems(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (fair_ats(&mut r, 5, 3), fair_ats(&mut r, 5, 3));
        let (idx, idxp) = (SuccIndex::build(&a.ats).unwrap(), SuccIndex::build(&b.ats).unwrap());
        let g = build_altsim_game(&a.ats, &b.ats, &idx, &idxp).unwrap();
        let profile = random_profile(&mut r, &g.arena);
        for v in 0..g.arena.num_vertices() {
            if !matches!(g.decode.vertex(v), Vertex::Pair { .. }) {
                continue;
            }
            let (stem, cycle) = lasso(&profile, v);
            let play: Vec<usize> = stem.into_iter().chain(cycle.iter().copied()).chain(cycle.iter().copied()).collect();
            let runs = play_to_runs(&g, Some(&idx), &play).unwrap();
            prop_assert_eq!(runs.left.len(), runs.right.len());
            for i in 1..runs.left.len() {
                prop_assert!(one_step(&a.ats, runs.left[i - 1], runs.left[i]));
                prop_assert!(one_step(&b.ats, runs.right[i - 1], runs.right[i]));
            }
        }
    }

    #[test]
    fn fair_games_have_sinks_and_valid_owners(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (fair_ats(&mut r, 4, 3), fair_ats(&mut r, 4, 3));
        let (_, g) = fairaltsim_detail(&a, &b).unwrap();
        let frown = g.decode.frown().unwrap();
        let win = g.decode.win_sink().unwrap();
        prop_assert_eq!(g.arena.succ(frown), &[frown]);
        prop_assert_eq!(g.arena.succ(win), &[win]);
        let prio = g.arena.priorities().unwrap();
        prop_assert_eq!((prio[frown], prio[win]), (1, 2));
        for v in 0..g.arena.num_vertices() {
            prop_assert_eq!(g.arena.owner(v), g.decode.vertex(v).owner());
        }
        let z = compute_fairness_region(&a).unwrap();
        for w in 0..a.ats.num_states() {
            for wp in 0..b.ats.num_states() {
                if let Some(v) = g.decode.pair(w, wp) {
                    prop_assert_eq!(g.arena.succ(v) == [win], !z[w]);
                }
            }
        }
    }

    #[test]
    fn fair_sim_game_pairs_match_labels(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (s, u) = (fair_ts(&mut r, 5, 3), fair_ts(&mut r, 5, 3));
        let (rel, g) = fairsim_detail(&s, &u).unwrap();
        let m = matching_pairs(&embed(&s).ats, &embed(&u).ats);
        for w in 0..s.ts.num_states() {
            for wp in 0..u.ts.num_states() {
                prop_assert_eq!(g.decode.pair(w, wp).is_some(), m.contains(w, wp));
                prop_assert!(!rel.contains(w, wp) || m.contains(w, wp));
            }
        }
        prop_assert!(fairsim_bound(&s, &u).vertices >= g.arena.num_vertices());
    }
}

#[test]
fn dot_export_names_every_vertex() {
    let mut r = rng(77);
    let (a, b) = (fair_ats(&mut r, 3, 2), fair_ats(&mut r, 3, 2));
    let (_, g) = fairaltsim_detail(&a, &b).unwrap();
    let dot = g.to_dot(&a.ats.states, &b.ats.states);
    assert!(dot.starts_with("digraph"));
    for v in g.decode.vertices() {
        assert!(dot.contains(&v.describe(&a.ats.states, &b.ats.states)), "{v:?}");
    }
    let boxes = dot.matches("shape=box").count();
    let p1 = (0..g.arena.num_vertices()).filter(|&v| g.arena.owner(v) == Player::P1).count();
    assert_eq!(boxes, p1);
}
