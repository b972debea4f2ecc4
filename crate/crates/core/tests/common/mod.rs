//! Reference implementations shared by the integration tests. None of them
//! reuse the library's successor-set index, fairness region or game builders.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use altsim_core::arena::{solve_parity_zielonka, ArenaBuilder, GameArena, Payload, Player};
use altsim_core::random::{random_fair_ats, random_fair_ts, RandomSpec};
use altsim_core::systems::{ts_to_ats, Ats, FairAts, FairTs};
use altsim_core::SimRelation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random arena: every vertex gets 1..=3 successors, a random owner and a
/// priority in `0..=2`.
pub fn random_arena(r: &mut ChaCha8Rng, n: usize) -> GameArena {
    let mut b = ArenaBuilder::new();
    for _ in 0..n {
        b.add_vertex(if r.gen_bool(0.5) { Player::P1 } else { Player::P2 });
    }
    for v in 0..n {
        for _ in 0..r.gen_range(1..=3) {
            b.add_edge(v, r.gen_range(0..n));
        }
    }
    let prio = (0..n).map(|_| r.gen_range(0..=2u8)).collect();
    b.build(Payload::Priority(prio)).unwrap()
}

/// `μX. T ∪ CPre_player(X)` by repeated full sweeps.
pub fn naive_attractor(g: &GameArena, player: Player, target: &[bool]) -> Vec<bool> {
    let n = g.num_vertices();
    let mut x = target.to_vec();
    loop {
        let next: Vec<bool> = (0..n)
            .map(|v| {
                x[v] || if g.owner(v) == player {
                    g.succ(v).iter().any(|&u| x[u])
                } else {
                    g.succ(v).iter().all(|&u| x[u])
                }
            })
            .collect();
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Successor sets collected by hashing, deduplicated and sorted by
/// characteristic vector (absent before present, state 0 first).
pub fn oracle_succ_sets(k: &Ats) -> (Vec<Vec<usize>>, HashMap<(usize, usize), usize>) {
    let n = k.num_states();
    let mut sets: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut of = HashMap::new();
    for w in 0..n {
        for &a in &k.enabled1[w] {
            let mut bits = vec![false; n];
            for &b in &k.enabled2[w] {
                bits[k.delta(w, a, b).unwrap()] = true;
            }
            sets.insert(bits.clone());
            of.insert((w, a), bits);
        }
    }
    let ordered: Vec<Vec<bool>> = sets.into_iter().collect();
    let ids: HashMap<Vec<bool>, usize> = ordered.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let members = ordered
        .iter()
        .map(|bits| (0..n).filter(|&i| bits[i]).collect())
        .collect();
    let h = of.into_iter().map(|(k, bits)| (k, ids[&bits])).collect();
    (members, h)
}

fn obs_match<'a>(k: &'a Ats, kp: &'a Ats) -> impl Fn(usize, usize) -> bool + 'a {
    move |w: usize, wp: usize| k.obs[k.label[w]] == kp.obs[kp.label[wp]]
}

/// Fair alternating simulation by an action-level game.
///
/// Rounds follow the definition directly: spoiler picks `a`, simulator
/// picks `a'`, spoiler picks `b'`, simulator picks `b`. When the new pair
/// mismatches, play continues on the left system alone and the spoiler wins
/// iff that left run is fair. Simulator is the even player of a min-parity
/// objective: `0` at pairs with `w' ∈ F'`, `1` at pairs with `w ∈ F` and at
/// left-only states in `F`, `2` elsewhere.
pub fn oracle_fairaltsim(fk: &FairAts, fkp: &FairAts) -> SimRelation {
    let (k, kp) = (&fk.ats, &fkp.ats);
    let (n, np) = (k.num_states(), kp.num_states());
    let (na, nap) = (k.actions1.len(), kp.actions1.len());
    let fair: Vec<bool> = (0..n).map(|w| fk.fair.contains(&w)).collect();
    let fair_p: Vec<bool> = (0..np).map(|w| fkp.fair.contains(&w)).collect();
    let m = obs_match(k, kp);

    let mut b = ArenaBuilder::new();
    let mut prio = Vec::new();
    let mut add = |b: &mut ArenaBuilder, owner, p: u8| {
        prio.push(p);
        b.add_vertex(owner)
    };
    let mut pair = HashMap::new();
    for w in 0..n {
        for wp in 0..np {
            let p = if fair_p[wp] { 0 } else if fair[w] { 1 } else { 2 };
            pair.insert((w, wp), add(&mut b, Player::P1, p));
        }
    }
    let left: Vec<usize> = (0..n).map(|w| add(&mut b, Player::P1, if fair[w] { 1 } else { 2 })).collect();
    let mut left_a = HashMap::new();
    for w in 0..n {
        for &a in &k.enabled1[w] {
            let v = add(&mut b, Player::P2, 2);
            left_a.insert((w, a), v);
        }
    }
    let mut va = HashMap::new();
    let mut vb = HashMap::new();
    let mut vd = HashMap::new();
    for w in 0..n {
        for &a in &k.enabled1[w] {
            for wp in 0..np {
                va.insert((w, a, wp), add(&mut b, Player::P2, 2));
                for &ap in &kp.enabled1[wp] {
                    vb.insert((w, a, wp, ap), add(&mut b, Player::P1, 2));
                }
            }
            for rp in 0..np {
                vd.insert((w, a, rp), add(&mut b, Player::P2, 2));
            }
        }
    }
    let _ = (na, nap);
    for w in 0..n {
        for &a in &k.enabled1[w] {
            b.add_edge(left[w], left_a[&(w, a)]);
            for &bb in &k.enabled2[w] {
                b.add_edge(left_a[&(w, a)], left[k.delta(w, a, bb).unwrap()]);
            }
        }
    }
    for w in 0..n {
        for wp in 0..np {
            for &a in &k.enabled1[w] {
                b.add_edge(pair[&(w, wp)], va[&(w, a, wp)]);
                for &ap in &kp.enabled1[wp] {
                    b.add_edge(va[&(w, a, wp)], vb[&(w, a, wp, ap)]);
                    for &bp in &kp.enabled2[wp] {
                        let rp = kp.delta(wp, ap, bp).unwrap();
                        b.add_edge(vb[&(w, a, wp, ap)], vd[&(w, a, rp)]);
                    }
                }
            }
        }
    }
    for w in 0..n {
        for &a in &k.enabled1[w] {
            for rp in 0..np {
                for &bb in &k.enabled2[w] {
                    let r = k.delta(w, a, bb).unwrap();
                    let to = if m(r, rp) { pair[&(r, rp)] } else { left[r] };
                    b.add_edge(vd[&(w, a, rp)], to);
                }
            }
        }
    }
    let g = b.build(Payload::Priority(prio)).unwrap();
    let res = solve_parity_zielonka(&g, Player::P2).unwrap();
    let mut pairs = Vec::new();
    for w in 0..n {
        for wp in 0..np {
            if m(w, wp) && res.win_even[pair[&(w, wp)]] {
                pairs.push((w, wp));
            }
        }
    }
    SimRelation::new(n, np, pairs).unwrap()
}

/// All label-matching pairs.
pub fn matching_pairs(k: &Ats, kp: &Ats) -> SimRelation {
    let m = obs_match(k, kp);
    let pairs: Vec<(usize, usize)> = (0..k.num_states())
        .flat_map(|w| (0..kp.num_states()).map(move |wp| (w, wp)))
        .filter(|&(w, wp)| m(w, wp))
        .collect();
    SimRelation::new(k.num_states(), kp.num_states(), pairs).unwrap()
}

pub fn embed(ft: &FairTs) -> FairAts {
    FairAts { ats: ts_to_ats(&ft.ts).unwrap(), fair: ft.fair.clone() }
}

/// Random spec with sizes drawn from the given inclusive maxima.
pub fn spec(r: &mut ChaCha8Rng, max_states: usize, max_a1: usize, max_a2: usize, n_obs: usize) -> RandomSpec {
    RandomSpec::new(
        r.gen_range(1..=max_states),
        r.gen_range(1..=max_a1),
        r.gen_range(1..=max_a2),
        n_obs,
        r.gen(),
    )
    .with_fair_density(r.gen_range(0.0..=1.0))
}

pub fn fair_ats(r: &mut ChaCha8Rng, max_states: usize, max_a: usize) -> FairAts {
    random_fair_ats(&spec(r, max_states, max_a, max_a, 2)).unwrap()
}

pub fn fair_ts(r: &mut ChaCha8Rng, max_states: usize, max_deg: usize) -> FairTs {
    random_fair_ts(&spec(r, max_states, max_deg, 1, 2)).unwrap()
}

pub fn with_fair(fk: &FairAts, fair: Vec<usize>) -> FairAts {
    FairAts { ats: fk.ats.clone(), fair }
}

// ---------------------------------------------------------------------------
// Closed-form size bounds: exact summations over the systems, and coarse
// products of the alphabet sizes.
// ---------------------------------------------------------------------------

pub struct Bound {
    pub vertices: usize,
    pub edges: usize,
}

fn sum_p1(k: &Ats) -> usize {
    k.enabled1.iter().map(Vec::len).sum()
}

fn set_sizes(k: &Ats) -> (usize, usize) {
    let (sets, _) = oracle_succ_sets(k);
    (sets.len(), sets.iter().map(Vec::len).sum())
}

/// Alternating-simulation game: exact summation form.
pub fn altsim_sum_bound(k: &Ats, kp: &Ats) -> Bound {
    let (n, np) = (k.num_states(), kp.num_states());
    let (s, sum_t) = set_sizes(k);
    let (sp, sum_tp) = set_sizes(kp);
    Bound {
        vertices: n * np + s * sp + 2 * s * np,
        edges: np * sum_p1(k) + s * sum_p1(kp) + s * sum_tp + np * sum_t,
    }
}

/// Alternating-simulation game: the coarse product form.
pub fn altsim_coarse_bound(k: &Ats, kp: &Ats) -> Bound {
    let (n, np) = (k.num_states(), kp.num_states());
    let (a1, a2) = (k.actions1.len(), k.actions2.len());
    let (a1p, a2p) = (kp.actions1.len(), kp.actions2.len());
    Bound {
        vertices: n * np + (n * a1) * (np * a1p) + 2 * n * np * a1,
        edges: np * n * a1 + n * np * a1 * a1p + n * np * a1 * a1p * a2p + np * n * a1 * a2,
    }
}

/// Alternating-simulation game between TS embeddings.
pub fn altsim_ts_bound(k: &Ats, kp: &Ats) -> Bound {
    let (n, np) = (k.num_states(), kp.num_states());
    let (a1, a1p) = (k.actions1.len(), kp.actions1.len());
    Bound {
        vertices: n * np + (n * a1) * (np * a1p) + 2 * n * np * a1,
        edges: np * n * a1 + n * np * a1p + n * np + np * n,
    }
}

/// Fair alternating-simulation game, including both sinks.
pub fn fairaltsim_bound(k: &Ats, kp: &Ats) -> (Bound, Bound) {
    let (n, np) = (k.num_states(), kp.num_states());
    let (a1, a2) = (k.actions1.len(), k.actions2.len());
    let (a1p, a2p) = (kp.actions1.len(), kp.actions2.len());
    let (s, sum_t) = set_sizes(k);
    let (sp, sum_tp) = set_sizes(kp);
    let sum = Bound {
        vertices: n * np + s * sp + 2 + 2 * s * np,
        edges: np * sum_p1(k) + s * sum_p1(kp) + s * sum_tp + np * sum_t + np * s + 2,
    };
    let coarse = Bound {
        vertices: n * np + n * a1 * np * a1p + 2 + 2 * n * a1 * np + 1,
        edges: np * n * a1 + n * np * a1 * a1p + n * np * a1 * a1p * a2p + np * n * a1 * a2 + np * n * a1 + 2,
    };
    (sum, coarse)
}

/// Fair-simulation game between TSs, including both sinks.
pub fn fairsim_bound(t: &FairTs, tp: &FairTs) -> Bound {
    let (n, np) = (t.ts.num_states(), tp.ts.num_states());
    Bound { vertices: 2 * n * np + 2, edges: 2 + 2 * n * np + np * t.ts.num_edges() + n * tp.ts.num_edges() }
}

// ---------------------------------------------------------------------------
// Plays under memoryless strategies.
// ---------------------------------------------------------------------------

/// Follows a positional profile from `start` until a vertex repeats.
pub fn lasso(choice: &[usize], start: usize) -> (Vec<usize>, Vec<usize>) {
    let mut seen = HashMap::new();
    let mut path = Vec::new();
    let mut v = start;
    while !seen.contains_key(&v) {
        seen.insert(v, path.len());
        path.push(v);
        v = choice[v];
    }
    let at = seen[&v];
    let cycle = path.split_off(at);
    (path, cycle)
}

/// Outcome of checking the play/run correspondence on many lassos.
#[derive(Default, Debug)]
pub struct LassoTally {
    pub checked: usize,
    pub frown: usize,
    pub win_sink: usize,
    pub violations: Vec<String>,
}

/// Checks every lasso of the profile `choice` that starts at a pair vertex.
///
/// For lassos avoiding both sinks: when the cycle's least priority is even,
/// every pair label-matches and a cycle meeting `F` on the left meets `F'` on
/// the right; when it is odd, the left cycle meets `F` and the right one
/// misses `F'`. Lassos ending in `FROWN` end in a label mismatch.
pub fn check_play_correspondence(
    game: &altsim_core::reductions::Game,
    idx: Option<&altsim_core::SuccIndex>,
    left: (&Ats, &[usize]),
    right: (&Ats, &[usize]),
    choice: &[usize],
    tally: &mut LassoTally,
) {
    use altsim_core::reductions::{play_to_runs, Vertex};
    let prio = game.arena.priorities().unwrap();
    let (k, fair) = left;
    let (kp, fair_p) = right;
    let m = obs_match(k, kp);
    for start in 0..game.arena.num_vertices() {
        if !matches!(game.decode.vertex(start), Vertex::Pair { .. }) {
            continue;
        }
        tally.checked += 1;
        let (stem, cycle) = lasso(choice, start);
        let mut play = stem.clone();
        play.extend(&cycle);
        play.push(cycle[0]);
        let runs = play_to_runs(game, idx, &play).unwrap();
        if cycle.iter().any(|&v| game.decode.vertex(v) == Vertex::WinSink) {
            tally.win_sink += 1;
            continue;
        }
        if runs.reached_frown {
            tally.frown += 1;
            let at = play.iter().position(|&v| game.decode.vertex(v) == Vertex::Frown).unwrap();
            let unmatched = match game.decode.vertex(play[at - 1]) {
                // the left run moved to `w` and no successor of `wp` matches it
                Vertex::Step { w, wp } => (0..kp.actions1.len())
                    .filter(|&a| kp.is_enabled1(wp, a))
                    .flat_map(|a| kp.successors(wp, a))
                    .all(|r| !m(w, r)),
                _ => !m(*runs.left.last().unwrap(), *runs.right.last().unwrap()),
            };
            if !unmatched {
                tally.violations.push(format!("frown without mismatch from {start}"));
            }
            continue;
        }
        // the cycle's pairs give the runs' recurring states
        let cyc_pairs: Vec<(usize, usize)> = cycle
            .iter()
            .filter_map(|&v| match game.decode.vertex(v) {
                Vertex::Pair { w, wp } => Some((w, wp)),
                _ => None,
            })
            .collect();
        if runs.left.iter().zip(&runs.right).any(|(&w, &wp)| !m(w, wp)) {
            tally.violations.push(format!("label mismatch on play from {start}"));
        }
        let left_fair = cyc_pairs.iter().any(|&(w, _)| fair.contains(&w));
        let right_fair = cyc_pairs.iter().any(|&(_, wp)| fair_p.contains(&wp));
        let even = cycle.iter().map(|&v| prio[v]).min().unwrap() % 2 == 0;
        if even && left_fair && !right_fair {
            tally.violations.push(format!("parity won but right run unfair from {start}"));
        }
        if !even && !(left_fair && !right_fair) {
            tally.violations.push(format!("parity lost without a fairness violation from {start}"));
        }
    }
}

/// Random positional choice for every vertex.
pub fn random_profile(r: &mut ChaCha8Rng, g: &GameArena) -> Vec<usize> {
    (0..g.num_vertices()).map(|v| g.succ(v)[r.gen_range(0..g.succ(v).len())]).collect()
}

// ---------------------------------------------------------------------------
// Capped enumeration of tiny ATSs: |W| = 2, |A1| = |A2| = 2, |Σ| = 2.
// ---------------------------------------------------------------------------

/// Per-state shapes `(|P1(w)|, |P2(w)|)`; enabled actions are the first ones.
pub const SHAPES: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

/// A 2-state system with shapes `s0`, `s1`, labels `l0`, `l1` and every
/// transition of state `w` going to `base(w)`.
pub fn tiny_ats(s0: (usize, usize), s1: (usize, usize), l0: usize, l1: usize, base: [usize; 2]) -> Ats {
    let obs = vec!["p".to_string(), "q".to_string()];
    let mut a = Ats::with_shape(
        obs,
        vec!["s0".into(), "s1".into()],
        vec!["a".into(), "b".into()],
        vec!["x".into(), "y".into()],
    );
    a.label = vec![l0, l1];
    for (w, (n1, n2)) in [s0, s1].into_iter().enumerate() {
        a.enabled1[w] = (0..n1).collect();
        a.enabled2[w] = (0..n2).collect();
        for x in 0..n1 {
            for y in 0..n2 {
                a.set_delta(w, x, y, Some(base[w]));
            }
        }
    }
    a
}

/// Enabled cells `(w, a, b)` of a system.
pub fn cells(a: &Ats) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for w in 0..a.num_states() {
        for &x in &a.enabled1[w] {
            for &y in &a.enabled2[w] {
                out.push((w, x, y));
            }
        }
    }
    out
}

fn flipped(a: &Ats, (w, x, y): (usize, usize, usize)) -> Ats {
    let mut b = a.clone();
    let t = b.delta(w, x, y).unwrap();
    b.set_delta(w, x, y, Some(1 - t));
    b
}

/// All shape/label combinations for both sides; for each, two baselines
/// (all self-loops, all swaps) and every single-cell flip of either side.
pub fn capped_tiny_pairs() -> Vec<(Ats, Ats)> {
    let mut systems = Vec::new();
    for &s0 in &SHAPES {
        for &s1 in &SHAPES {
            for l0 in 0..2 {
                for l1 in 0..2 {
                    systems.push((s0, s1, l0, l1));
                }
            }
        }
    }
    let mut out = Vec::new();
    for &(a0, a1, al0, al1) in &systems {
        for &(b0, b1, bl0, bl1) in &systems {
            for base in [[0, 1], [1, 0]] {
                let l = tiny_ats(a0, a1, al0, al1, base);
                let r = tiny_ats(b0, b1, bl0, bl1, base);
                for c in cells(&l) {
                    out.push((flipped(&l, c), r.clone()));
                }
                for c in cells(&r) {
                    out.push((l.clone(), flipped(&r, c)));
                }
                out.push((l, r));
            }
        }
    }
    out
}

pub fn random_fair_ats_spec(spec: &RandomSpec) -> FairAts {
    random_fair_ats(spec).unwrap()
}
