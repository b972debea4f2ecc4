//! The relation computations.
//!
//! Alternating simulation has three independent routes that must agree:
//! the fixpoint [`altsim_basic`], the reachability game [`altsim_game`] and
//! the successor-set pruning engine [`altsim_iterative`]. Fair variants go
//! through parity games.

use crate::arena::{solve_parity3, solve_reachability, Player};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::reductions::{
    build_altsim_game, build_fairaltsim_game, build_fairsim_game, compute_fairness_region,
    compute_fairness_region_ts, Game,
};
use crate::succ_index::SuccIndex;
use crate::systems::{ts_to_ats, Ats, FairAts, FairTs, LabelMatch, SimRelation, Ts};

/// Route used for (alternating) simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Basic,
    Game,
    Iterative,
}

impl std::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Algo::Basic),
            "game" => Ok(Algo::Game),
            "iterative" => Ok(Algo::Iterative),
            other => Err(Error::Unsupported(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Maximum alternating simulation by any route.
pub fn altsim(k: &Ats, kp: &Ats, algo: Algo) -> Result<SimRelation> {
    match algo {
        Algo::Basic => altsim_basic(k, kp),
        Algo::Game => altsim_game(k, kp),
        Algo::Iterative => altsim_iterative(k, kp, IterOptions::default()).map(|(r, _)| r),
    }
}

/// Maximum simulation between TSs, through their ATS embeddings.
pub fn sim(t: &Ts, tp: &Ts, algo: Algo) -> Result<SimRelation> {
    altsim(&ts_to_ats(t)?, &ts_to_ats(tp)?, algo)
}

pub fn altsim_basic(k: &Ats, kp: &Ats) -> Result<SimRelation> {
    altsim_basic_with(k, kp, Exec::Sequential)
}

/// The textbook fixpoint: start from label-matching pairs and delete
/// `(w,w')` whenever `∃a ∀a' ∃b' ∀b · (δ(w,a,b), δ'(w',a',b'))` is outside
/// the previous relation, until nothing changes.
///
/// Each round reads only the previous relation, so rows are independent and
/// `exec` may evaluate them in parallel.
pub fn altsim_basic_with(k: &Ats, kp: &Ats, exec: Exec) -> Result<SimRelation> {
    k.ensure_valid()?;
    kp.ensure_valid()?;
    let labels = LabelMatch::between(k, kp)?;
    let (n, np) = (k.num_states(), kp.num_states());
    let mut rel: Vec<bool> = (0..n * np).map(|i| labels.matches(i / np, i % np)).collect();
    loop {
        let prev = &rel;
        let rows: Vec<Vec<bool>> = exec.map_range(n, |w| {
            (0..np)
                .map(|wp| prev[w * np + wp] && !spoiler_wins_step(k, kp, prev, w, wp))
                .collect()
        });
        let next: Vec<bool> = rows.into_iter().flatten().collect();
        if next == rel {
            return Ok(SimRelation::from_matrix(n, np, &rel));
        }
        rel = next;
    }
}

fn spoiler_wins_step(k: &Ats, kp: &Ats, rel: &[bool], w: usize, wp: usize) -> bool {
    let np = kp.num_states();
    k.enabled1[w].iter().any(|&a| {
        kp.enabled1[wp].iter().all(|&ap| {
            kp.enabled2[wp].iter().any(|&bp| {
                let rp = kp.step(wp, ap, bp);
                k.enabled2[w].iter().all(|&b| !rel[k.step(w, a, b) * np + rp])
            })
        })
    })
}

/// Summary of a game-route computation.
#[derive(Debug, Clone)]
pub struct GameReport {
    pub vertices: usize,
    pub edges: usize,
    /// Vertices plus edges of the arena.
    pub cells: usize,
}

/// Alternating simulation as player 2's safety region of the reachability
/// game.
pub fn altsim_game(k: &Ats, kp: &Ats) -> Result<SimRelation> {
    altsim_game_detail(k, kp).map(|(r, _, _)| r)
}

pub fn altsim_game_detail(k: &Ats, kp: &Ats) -> Result<(SimRelation, Game, GameReport)> {
    LabelMatch::between(k, kp)?;
    let idx = SuccIndex::build(k)?;
    let idxp = SuccIndex::build(kp)?;
    let game = build_altsim_game(k, kp, &idx, &idxp)?;
    let res = solve_reachability(&game.arena)?;
    let rel = SimRelation::new(k.num_states(), kp.num_states(), game.pairs_in(&res.win2))?;
    let report = GameReport {
        vertices: game.arena.num_vertices(),
        edges: game.arena.num_edges(),
        cells: game.arena.cells(),
    };
    Ok((rel, game, report))
}

/// Maximum fair alternating simulation (weak and strong coincide).
pub fn fairaltsim(fk: &FairAts, fkp: &FairAts) -> Result<SimRelation> {
    fairaltsim_detail(fk, fkp).map(|(r, _)| r)
}

pub fn fairaltsim_detail(fk: &FairAts, fkp: &FairAts) -> Result<(SimRelation, Game)> {
    LabelMatch::between(&fk.ats, &fkp.ats)?;
    let idx = SuccIndex::build(&fk.ats)?;
    let idxp = SuccIndex::build(&fkp.ats)?;
    let z = compute_fairness_region(fk)?;
    let game = build_fairaltsim_game(fk, fkp, &idx, &idxp, &z)?;
    let res = solve_parity3(&game.arena, Player::P2)?;
    let rel = SimRelation::new(fk.ats.num_states(), fkp.ats.num_states(), game.pairs_in(&res.win_even))?;
    Ok((rel, game))
}

/// Maximum fair simulation between fair TSs.
pub fn fairsim(ft: &FairTs, ftp: &FairTs) -> Result<SimRelation> {
    fairsim_detail(ft, ftp).map(|(r, _)| r)
}

pub fn fairsim_detail(ft: &FairTs, ftp: &FairTs) -> Result<(SimRelation, Game)> {
    LabelMatch::between_ts(&ft.ts, &ftp.ts)?;
    let z = compute_fairness_region_ts(ft)?;
    let game = build_fairsim_game(ft, ftp, &z)?;
    let res = solve_parity3(&game.arena, Player::P2)?;
    let rel = SimRelation::new(ft.ts.num_states(), ftp.ts.num_states(), game.pairs_in(&res.win_even))?;
    Ok((rel, game))
}

/// The graph `G_K` over `W ⊎ Succ(K)`: edges `w → Succ(w,a)` and `T → r`
/// for `r ∈ T`, with both directions kept. Parallel edges are merged.
#[derive(Debug, Clone)]
pub struct RelationGraph {
    /// `Post(w)`: distinct successor sets of `w`, ascending.
    pub state_out: Vec<Vec<usize>>,
    /// `Pre(T)`: states having `T` as a successor set, ascending.
    pub set_in: Vec<Vec<usize>>,
    /// `Post(T) = T`.
    pub set_out: Vec<Vec<usize>>,
    /// `Pre(r)`: sets containing `r`, ascending.
    pub state_in: Vec<Vec<usize>>,
}

impl RelationGraph {
    pub fn num_states(&self) -> usize {
        self.state_out.len()
    }

    pub fn num_sets(&self) -> usize {
        self.set_out.len()
    }

    /// Edges `w → T`.
    pub fn state_set_edges(&self) -> usize {
        self.state_out.iter().map(Vec::len).sum()
    }

    /// Edges `T → r`.
    pub fn set_state_edges(&self) -> usize {
        self.set_out.iter().map(Vec::len).sum()
    }

    /// Vertices plus edges.
    pub fn cells(&self) -> usize {
        self.num_states() + self.num_sets() + self.state_set_edges() + self.set_state_edges()
    }
}

pub fn build_relation_graph(k: &Ats, idx: &SuccIndex) -> Result<RelationGraph> {
    idx.check_matches(k)?;
    let n = k.num_states();
    let ns = idx.count();
    let mut state_out = vec![Vec::new(); n];
    let mut set_in = vec![Vec::new(); ns];
    for w in 0..n {
        let mut ids: Vec<usize> = k.enabled1[w].iter().map(|&a| idx.id(w, a)).collect();
        ids.sort_unstable();
        ids.dedup();
        for &t in &ids {
            set_in[t].push(w);
        }
        state_out[w] = ids;
    }
    let set_out: Vec<Vec<usize>> = idx.sets().to_vec();
    let mut state_in = vec![Vec::new(); n];
    for (t, members) in set_out.iter().enumerate() {
        for &r in members {
            state_in[r].push(t);
        }
    }
    Ok(RelationGraph { state_out, set_in, set_out, state_in })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IterOptions {
    /// Check the engine's invariants while it runs (expensive): `sim` and
    /// `simS` over-approximate the fixpoint, counters match their
    /// definitions, and remove lists hold exactly the newly false entries.
    pub assert_invariants: bool,
}

/// Loop counters of one iterative run, and their ceilings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IterStats {
    /// Bodies of the main while loop executed.
    pub while_iterations: usize,
    /// Set pruning: states `w'` processed with a non-empty `remove(w')`.
    pub succ_outer: usize,
    /// Set pruning: `(T', T)` pairs examined.
    pub succ_pairs: usize,
    /// Set pruning: `count` decrements.
    pub succ_decrements: usize,
    /// State pruning: sets `T` processed with a non-empty `removeS(T)`.
    pub str_outer: usize,
    /// State pruning: `(w, w')` pairs examined.
    pub str_pairs: usize,
    /// State pruning: `countS` decrements.
    pub str_decrements: usize,
    pub ceilings: IterCeilings,
    /// Largest number of cells held at once (matrices, lists, both graphs).
    pub peak_cells: usize,
    /// Invariant checks performed.
    pub invariant_checks: usize,
}

/// Per-loop ceilings derived from the sizes of the two relation graphs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IterCeilings {
    pub while_iterations: usize,
    pub succ_outer: usize,
    pub succ_pairs: usize,
    pub succ_decrements: usize,
    pub str_outer: usize,
    pub str_pairs: usize,
    pub str_decrements: usize,
}

impl IterCeilings {
    fn new(g: &RelationGraph, gp: &RelationGraph) -> Self {
        let (n, np) = (g.num_states(), gp.num_states());
        let ns = g.num_sets();
        IterCeilings {
            // every body but the last turns some sim entry false
            while_iterations: n * np + 1,
            succ_outer: np * ns,
            // each (T' → w') edge meets each T at most once
            succ_pairs: gp.set_state_edges() * ns,
            // each (s' → T') edge is walked once per falsified (T', T)
            succ_decrements: gp.state_set_edges() * ns,
            str_outer: ns * np,
            str_pairs: g.state_set_edges() * np,
            str_decrements: g.set_state_edges() * np,
        }
    }
}

impl IterStats {
    /// Names of counters above their ceiling; empty when all hold.
    pub fn ceiling_violations(&self) -> Vec<&'static str> {
        let c = &self.ceilings;
        let mut out = Vec::new();
        let checks = [
            ("while", self.while_iterations, c.while_iterations),
            ("succ_outer", self.succ_outer, c.succ_outer),
            ("succ_pairs", self.succ_pairs, c.succ_pairs),
            ("succ_decrements", self.succ_decrements, c.succ_decrements),
            ("str_outer", self.str_outer, c.str_outer),
            ("str_pairs", self.str_pairs, c.str_pairs),
            ("str_decrements", self.str_decrements, c.str_decrements),
        ];
        for (name, got, cap) in checks {
            if got > cap {
                out.push(name);
            }
        }
        out
    }
}

struct Engine<'a> {
    g: &'a RelationGraph,
    gp: &'a RelationGraph,
    n: usize,
    np: usize,
    ns: usize,
    nsp: usize,
    /// `sim[w * np + w']`
    sim: Vec<bool>,
    /// `sim_s[T' * ns + T]`
    sim_s: Vec<bool>,
    /// `count[w' * ns + T]`
    count: Vec<u32>,
    /// `count_s[T * np + w']`
    count_s: Vec<u32>,
    /// `remove[w']`: sets `T`
    remove: Vec<Vec<usize>>,
    /// `remove_s[T]`: states `w'`
    remove_s: Vec<Vec<usize>>,
    remove_len: usize,
    stats: IterStats,
}

impl Engine<'_> {
    fn cells(&self) -> usize {
        self.sim.len()
            + self.sim_s.len()
            + self.count.len()
            + self.count_s.len()
            + self.remove.len()
            + self.remove_s.len()
            + self.remove_len
            + self.g.cells()
            + self.gp.cells()
    }

    fn note_peak(&mut self) {
        let c = self.cells();
        self.stats.peak_cells = self.stats.peak_cells.max(c);
    }

    fn prune_sim_str_succ(&mut self) {
        for wp in 0..self.np {
            if self.remove[wp].is_empty() {
                continue;
            }
            self.stats.succ_outer += 1;
            let removed = std::mem::take(&mut self.remove[wp]);
            self.remove_len -= removed.len();
            for &tp in &self.gp.state_in[wp] {
                for &t in &removed {
                    self.stats.succ_pairs += 1;
                    let cell = tp * self.ns + t;
                    if self.sim_s[cell] {
                        self.sim_s[cell] = false;
                        for &sp in &self.gp.set_in[tp] {
                            self.stats.succ_decrements += 1;
                            let c = &mut self.count[sp * self.ns + t];
                            *c -= 1;
                            if *c == 0 {
                                self.remove_s[t].push(sp);
                                self.remove_len += 1;
                            }
                        }
                    }
                }
            }
            self.note_peak();
        }
    }

    fn prune_sim_str(&mut self) {
        for t in 0..self.ns {
            if self.remove_s[t].is_empty() {
                continue;
            }
            self.stats.str_outer += 1;
            let removed = std::mem::take(&mut self.remove_s[t]);
            self.remove_len -= removed.len();
            for &w in &self.g.set_in[t] {
                for &wp in &removed {
                    self.stats.str_pairs += 1;
                    let cell = w * self.np + wp;
                    if self.sim[cell] {
                        self.sim[cell] = false;
                        for &dset in &self.g.state_in[w] {
                            self.stats.str_decrements += 1;
                            let c = &mut self.count_s[dset * self.np + wp];
                            *c -= 1;
                            if *c == 0 {
                                self.remove[wp].push(dset);
                                self.remove_len += 1;
                            }
                        }
                    }
                }
            }
            self.note_peak();
        }
    }

    fn has_work(&self) -> bool {
        self.remove_len > 0
    }

    // ---- invariant checks ----

    fn check_over_approximation(&self, oracle: &[bool]) -> Result<()> {
        for i in 0..self.n * self.np {
            if !self.sim[i] && oracle[i] {
                return Err(Error::Invariant(format!(
                    "sim({}, {}) is false but the pair is related",
                    i / self.np,
                    i % self.np
                )));
            }
        }
        // the largest companion relation of the oracle
        for tp in 0..self.nsp {
            for t in 0..self.ns {
                let related = self.gp.set_out[tp]
                    .iter()
                    .all(|&rp| self.g.set_out[t].iter().any(|&r| oracle[r * self.np + rp]));
                if related && !self.sim_s[tp * self.ns + t] {
                    return Err(Error::Invariant(format!("simS(T'{tp}, T{t}) is false but the sets are related")));
                }
            }
        }
        Ok(())
    }

    fn check_counts(&self) -> Result<()> {
        for wp in 0..self.np {
            for t in 0..self.ns {
                let expect = self.gp.state_out[wp].iter().filter(|&&tp| self.sim_s[tp * self.ns + t]).count();
                if self.count[wp * self.ns + t] as usize != expect {
                    return Err(Error::Invariant(format!("count({wp}, T{t}) is {}, expected {expect}", self.count[wp * self.ns + t])));
                }
                let expect_s = self.g.set_out[t].iter().filter(|&&r| self.sim[r * self.np + wp]).count();
                if self.count_s[t * self.np + wp] as usize != expect_s {
                    return Err(Error::Invariant(format!("countS(T{t}, {wp}) is {}, expected {expect_s}", self.count_s[t * self.np + wp])));
                }
            }
        }
        Ok(())
    }

    /// Sets `T` with some member in `inv(w')` under the relation `sim`.
    fn pre_inv(&self, sim: &[bool], wp: usize) -> Vec<bool> {
        let mut out = vec![false; self.ns];
        for t in 0..self.ns {
            out[t] = self.g.set_out[t].iter().any(|&r| sim[r * self.np + wp]);
        }
        out
    }

    fn check_remove_lists(&self, prevsim: &[bool]) -> Result<()> {
        for wp in 0..self.np {
            let before = self.pre_inv(prevsim, wp);
            let now = self.pre_inv(&self.sim, wp);
            let mut expect: Vec<usize> = (0..self.ns).filter(|&t| before[t] && !now[t]).collect();
            let mut got = self.remove[wp].clone();
            got.sort_unstable();
            expect.sort_unstable();
            if got != expect {
                return Err(Error::Invariant(format!("remove({wp}) = {got:?}, expected {expect:?}")));
            }
        }
        Ok(())
    }

    /// States `s'` with some `T' ∈ Post(s')` in `invS(T)` under `sim_s`.
    fn pre_inv_s(&self, sim_s: &[bool], t: usize) -> Vec<bool> {
        (0..self.np)
            .map(|sp| self.gp.state_out[sp].iter().any(|&tp| sim_s[tp * self.ns + t]))
            .collect()
    }

    fn check_set_remove_lists(&self, prevsim_s: &[bool]) -> Result<()> {
        for t in 0..self.ns {
            let before = self.pre_inv_s(prevsim_s, t);
            let now = self.pre_inv_s(&self.sim_s, t);
            let expect: Vec<usize> = (0..self.np).filter(|&sp| before[sp] && !now[sp]).collect();
            let mut got = self.remove_s[t].clone();
            got.sort_unstable();
            if got != expect {
                return Err(Error::Invariant(format!("removeS(T{t}) = {got:?}, expected {expect:?}")));
            }
        }
        Ok(())
    }
}

/// Alternating simulation by simultaneous pruning of `sim` over state pairs
/// and `simS` over successor-set pairs, without building the game.
///
/// With `assert_invariants`, the fixpoint is first computed by
/// [`altsim_basic`] and the engine's invariants are checked against it at
/// every loop iteration; any violation is returned as [`Error::Invariant`].
pub fn altsim_iterative(k: &Ats, kp: &Ats, opts: IterOptions) -> Result<(SimRelation, IterStats)> {
    let labels = LabelMatch::between(k, kp)?;
    let idx = SuccIndex::build(k)?;
    let idxp = SuccIndex::build(kp)?;
    let g = build_relation_graph(k, &idx)?;
    let gp = build_relation_graph(kp, &idxp)?;
    let (n, np, ns, nsp) = (g.num_states(), gp.num_states(), g.num_sets(), gp.num_sets());

    let oracle = if opts.assert_invariants { Some(altsim_basic(k, kp)?.to_matrix()) } else { None };

    // Step 1
    let sim: Vec<bool> = (0..n * np).map(|i| labels.matches(i / np, i % np)).collect();
    let sim_s = vec![true; nsp * ns];
    // Step 2
    let mut count = vec![0u32; np * ns];
    for wp in 0..np {
        let post = gp.state_out[wp].len() as u32;
        count[wp * ns..(wp + 1) * ns].iter_mut().for_each(|c| *c = post);
    }
    let mut count_s = vec![0u32; ns * np];
    for t in 0..ns {
        for wp in 0..np {
            count_s[t * np + wp] = g.set_out[t].iter().filter(|&&r| sim[r * np + wp]).count() as u32;
        }
    }
    // Step 3: sets with no member simulated by w'
    let mut remove = vec![Vec::new(); np];
    let mut remove_len = 0;
    for (wp, list) in remove.iter_mut().enumerate() {
        for t in 0..ns {
            if count_s[t * np + wp] == 0 {
                list.push(t);
                remove_len += 1;
            }
        }
    }
    let remove_s = vec![Vec::new(); ns];

    let mut e = Engine {
        g: &g,
        gp: &gp,
        n,
        np,
        ns,
        nsp,
        sim,
        sim_s,
        count,
        count_s,
        remove,
        remove_s,
        remove_len,
        stats: IterStats { ceilings: IterCeilings::new(&g, &gp), ..Default::default() },
    };
    e.note_peak();

    // Step 4; `remove_s` is always drained by the time the guard runs
    while e.has_work() {
        e.stats.while_iterations += 1;
        let snapshot = if let Some(oracle) = &oracle {
            e.check_over_approximation(oracle)?;
            e.check_counts()?;
            e.stats.invariant_checks += 2;
            Some((e.sim.clone(), e.sim_s.clone()))
        } else {
            None
        };
        e.prune_sim_str_succ();
        if let Some((_, prevsim_s)) = &snapshot {
            e.check_set_remove_lists(prevsim_s)?;
            e.stats.invariant_checks += 1;
        }
        e.prune_sim_str();
        if let Some((prevsim, _)) = &snapshot {
            e.check_remove_lists(prevsim)?;
            e.stats.invariant_checks += 1;
        }
    }
    if let Some(oracle) = &oracle {
        e.check_over_approximation(oracle)?;
        e.check_counts()?;
        e.stats.invariant_checks += 2;
    }
    let violations = e.stats.ceiling_violations();
    if opts.assert_invariants && !violations.is_empty() {
        return Err(Error::Invariant(format!("loop ceilings exceeded: {violations:?}")));
    }
    // Step 5
    let rel = SimRelation::from_matrix(n, np, &e.sim);
    Ok((rel, e.stats))
}
