//! Game graphs for alternating simulation, fair alternating simulation and
//! fair simulation.
//!
//! Player 1 is the spoiler and player 2 the simulator throughout. In the
//! fair games player 2 is the even player of the parity objective.
//!
//! The fair games carry two absorbing sinks. `FROWN` (priority 1) is entered
//! when the simulator cannot match a label. `WINSINK` (priority 2) is entered
//! whenever the left play reaches a state from which Agent 1 cannot force a
//! fair run: from there Agent 2 of the left system, which the simulator
//! controls, keeps the left run unfair and every obligation becomes vacuous.

use std::fmt;

use crate::arena::{to_dot, ArenaBuilder, GameArena, Payload, Player};
use crate::error::{Error, Result};
use crate::succ_index::SuccIndex;
use crate::systems::{Ats, FairAts, FairTs, LabelMatch};

const ABSENT: u32 = u32::MAX;

/// What a game vertex stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    /// `⟨w,w'⟩`, player 1.
    Pair { w: usize, wp: usize },
    /// `⟨T,w',#⟩`, player 2 picks an action of `K'`.
    Hash { set: usize, wp: usize },
    /// `⟨T,T'⟩`, player 1 picks `r' ∈ T'`.
    Sets { set: usize, set_p: usize },
    /// `⟨T,r',$⟩`, player 2 picks `r ∈ T`.
    Dollar { set: usize, rp: usize },
    /// `⟨w,w',$⟩` of the fair-simulation game: the left system has moved to
    /// `w`, player 2 picks a successor of `w'`.
    Step { w: usize, wp: usize },
    Frown,
    WinSink,
}

impl Vertex {
    pub fn owner(self) -> Player {
        match self {
            Vertex::Pair { .. } | Vertex::Sets { .. } | Vertex::Frown | Vertex::WinSink => Player::P1,
            Vertex::Hash { .. } | Vertex::Dollar { .. } | Vertex::Step { .. } => Player::P2,
        }
    }

    /// Human-readable text using state names and `T<id>` for successor sets.
    pub fn describe(self, left: &[String], right: &[String]) -> String {
        match self {
            Vertex::Pair { w, wp } => format!("⟨{},{}⟩", left[w], right[wp]),
            Vertex::Hash { set, wp } => format!("⟨T{set},{},#⟩", right[wp]),
            Vertex::Sets { set, set_p } => format!("⟨T{set},T'{set_p}⟩"),
            Vertex::Dollar { set, rp } => format!("⟨T{set},{},$⟩", right[rp]),
            Vertex::Step { w, wp } => format!("⟨{},{},$⟩", left[w], right[wp]),
            Vertex::Frown => "FROWN".into(),
            Vertex::WinSink => "WINSINK".into(),
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Vertex::Pair { w, wp } => write!(f, "⟨{w},{wp}⟩"),
            Vertex::Hash { set, wp } => write!(f, "⟨T{set},{wp},#⟩"),
            Vertex::Sets { set, set_p } => write!(f, "⟨T{set},T'{set_p}⟩"),
            Vertex::Dollar { set, rp } => write!(f, "⟨T{set},{rp},$⟩"),
            Vertex::Step { w, wp } => write!(f, "⟨{w},{wp},$⟩"),
            Vertex::Frown => write!(f, "FROWN"),
            Vertex::WinSink => write!(f, "WINSINK"),
        }
    }
}

/// Bijection between arena vertices and [`Vertex`] values.
#[derive(Debug, Clone)]
pub struct VertexDecode {
    vertices: Vec<Vertex>,
    n_right: usize,
    n_sets_p: usize,
    pair: Vec<u32>,
    hash: Vec<u32>,
    sets: Vec<u32>,
    dollar: Vec<u32>,
    frown: Option<usize>,
    win_sink: Option<usize>,
}

impl VertexDecode {
    fn new(n_left: usize, n_right: usize, n_sets: usize, n_sets_p: usize) -> Self {
        VertexDecode {
            vertices: Vec::new(),
            n_right,
            n_sets_p,
            pair: vec![ABSENT; n_left * n_right],
            hash: vec![ABSENT; n_sets * n_right],
            sets: vec![ABSENT; n_sets * n_sets_p],
            // `Dollar` and `Step` never occur in the same game
            dollar: vec![ABSENT; n_sets.max(n_left) * n_right],
            frown: None,
            win_sink: None,
        }
    }

    fn add(&mut self, b: &mut ArenaBuilder, v: Vertex) -> usize {
        let id = b.add_vertex(v.owner());
        let slot = match v {
            Vertex::Pair { w, wp } => &mut self.pair[w * self.n_right + wp],
            Vertex::Hash { set, wp } => &mut self.hash[set * self.n_right + wp],
            Vertex::Sets { set, set_p } => &mut self.sets[set * self.n_sets_p + set_p],
            Vertex::Dollar { set: x, rp: y } | Vertex::Step { w: x, wp: y } => {
                &mut self.dollar[x * self.n_right + y]
            }
            Vertex::Frown => {
                self.frown = Some(id);
                self.vertices.push(v);
                return id;
            }
            Vertex::WinSink => {
                self.win_sink = Some(id);
                self.vertices.push(v);
                return id;
            }
        };
        *slot = id as u32;
        self.vertices.push(v);
        id
    }

    fn get(table: &[u32], i: usize) -> Option<usize> {
        table.get(i).copied().filter(|&x| x != ABSENT).map(|x| x as usize)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, v: usize) -> Vertex {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn pair(&self, w: usize, wp: usize) -> Option<usize> {
        Self::get(&self.pair, w * self.n_right + wp)
    }

    pub fn hash(&self, set: usize, wp: usize) -> Option<usize> {
        Self::get(&self.hash, set * self.n_right + wp)
    }

    pub fn sets(&self, set: usize, set_p: usize) -> Option<usize> {
        Self::get(&self.sets, set * self.n_sets_p + set_p)
    }

    pub fn dollar(&self, set: usize, rp: usize) -> Option<usize> {
        Self::get(&self.dollar, set * self.n_right + rp)
    }

    pub fn step(&self, w: usize, wp: usize) -> Option<usize> {
        Self::get(&self.dollar, w * self.n_right + wp)
    }

    pub fn frown(&self) -> Option<usize> {
        self.frown
    }

    pub fn win_sink(&self) -> Option<usize> {
        self.win_sink
    }
}

/// Which construction produced a [`Game`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    AltSim,
    FairAltSim,
    FairSim,
}

/// A constructed game: the arena plus its decode table.
#[derive(Debug, Clone)]
pub struct Game {
    pub kind: GameKind,
    pub arena: GameArena,
    pub decode: VertexDecode,
    /// State counts of the left and right systems.
    pub sizes: (usize, usize),
}

pub type AltSimGame = Game;
pub type FairGame = Game;

impl Game {
    /// Graphviz text with decoded labels.
    pub fn to_dot(&self, left: &[String], right: &[String]) -> String {
        to_dot(&self.arena, &|v| self.decode.vertex(v).describe(left, right))
    }

    /// Pairs `(w,w')` whose pair vertex lies in `region`.
    pub fn pairs_in(&self, region: &[bool]) -> Vec<(usize, usize)> {
        let (n, np) = self.sizes;
        let mut out = Vec::new();
        for w in 0..n {
            for wp in 0..np {
                if let Some(v) = self.decode.pair(w, wp) {
                    if region[v] {
                        out.push((w, wp));
                    }
                }
            }
        }
        out
    }
}

fn check_index(k: &Ats, idx: &SuccIndex) -> Result<()> {
    idx.check_matches(k)
}

/// Reachability game for alternating simulation.
///
/// Every vertex of `(W×W') ∪ (Succ(K)×Succ(K'))` and of
/// `Succ(K)×W'×{#,$}` is materialized; each `⟨T,w',#⟩` reaches
/// `⟨T,Succ(w',a')⟩` for every `a'`, so all set pairs are reachable anyway.
/// Edges come straight from `h` (E1, E2) and `g` (E3, E4), one unit of work
/// per emitted edge.
pub fn build_altsim_game(k: &Ats, kp: &Ats, idx: &SuccIndex, idxp: &SuccIndex) -> Result<AltSimGame> {
    let labels = LabelMatch::between(k, kp)?;
    check_index(k, idx)?;
    check_index(kp, idxp)?;
    let (n, np) = (k.num_states(), kp.num_states());
    let (ns, nsp) = (idx.count(), idxp.count());
    let mut b = ArenaBuilder::with_capacity(n * np + ns * nsp + 2 * ns * np, 0);
    let mut d = VertexDecode::new(n, np, ns, nsp);

    for w in 0..n {
        for wp in 0..np {
            d.add(&mut b, Vertex::Pair { w, wp });
        }
    }
    for set in 0..ns {
        for wp in 0..np {
            d.add(&mut b, Vertex::Hash { set, wp });
        }
    }
    for set in 0..ns {
        for set_p in 0..nsp {
            d.add(&mut b, Vertex::Sets { set, set_p });
        }
    }
    for set in 0..ns {
        for rp in 0..np {
            d.add(&mut b, Vertex::Dollar { set, rp });
        }
    }

    for w in 0..n {
        for wp in 0..np {
            let v = d.pair(w, wp).unwrap();
            for &a in &k.enabled1[w] {
                b.add_edge(v, d.hash(idx.id(w, a), wp).unwrap());
            }
        }
    }
    for set in 0..ns {
        for wp in 0..np {
            let v = d.hash(set, wp).unwrap();
            for &ap in &kp.enabled1[wp] {
                b.add_edge(v, d.sets(set, idxp.id(wp, ap)).unwrap());
            }
        }
    }
    for set in 0..ns {
        for set_p in 0..nsp {
            let v = d.sets(set, set_p).unwrap();
            for &rp in idxp.set(set_p) {
                b.add_edge(v, d.dollar(set, rp).unwrap());
            }
        }
    }
    for set in 0..ns {
        for rp in 0..np {
            let v = d.dollar(set, rp).unwrap();
            for &r in idx.set(set) {
                b.add_edge(v, d.pair(r, rp).unwrap());
            }
        }
    }

    let mut target = vec![false; b.num_vertices()];
    for w in 0..n {
        for wp in 0..np {
            if !labels.matches(w, wp) {
                target[d.pair(w, wp).unwrap()] = true;
            }
        }
    }
    let arena = b.build(Payload::Target(target))?;
    Ok(Game { kind: GameKind::AltSim, arena, decode: d, sizes: (n, np) })
}

/// Internal Büchi arena of one system: state vertices (Agent 1) and
/// `(w,a)` vertices (Agent 2). Returns the arena and the number of states;
/// vertex `w` is state `w`.
pub fn fairness_arena(fk: &FairAts) -> Result<(GameArena, Vec<bool>)> {
    fk.ensure_valid()?;
    let k = &fk.ats;
    let n = k.num_states();
    let mut b = ArenaBuilder::new();
    for _ in 0..n {
        b.add_vertex(Player::P1);
    }
    for w in 0..n {
        for &a in &k.enabled1[w] {
            let v = b.add_vertex(Player::P2);
            b.add_edge(w, v);
            for &bb in &k.enabled2[w] {
                b.add_edge(v, k.step(w, a, bb));
            }
        }
    }
    let mut accepting = vec![false; b.num_vertices()];
    for &f in &fk.fair {
        accepting[f] = true;
    }
    Ok((b.build(Payload::None)?, accepting))
}

/// States from which Agent 1 can force infinitely many visits to `F`.
///
/// One Büchi game on `W ∪ (W×A1)`, `O(|W|·|E|)`.
pub fn compute_fairness_region(fk: &FairAts) -> Result<Vec<bool>> {
    let (arena, accepting) = fairness_arena(fk)?;
    let (win, _) = crate::arena::solve_buchi(&arena, Player::P1, &accepting);
    Ok(win[..fk.ats.num_states()].to_vec())
}

/// Fairness region of a fair TS: states with some path visiting `F`
/// infinitely often.
pub fn compute_fairness_region_ts(ft: &FairTs) -> Result<Vec<bool>> {
    let ats = crate::systems::ts_to_ats(&ft.ts)?;
    compute_fairness_region(&FairAts { ats, fair: ft.fair.clone() })
}

fn check_region(z: &[bool], n: usize) -> Result<()> {
    if z.len() != n {
        return Err(Error::RegionMismatch(format!("region has {} entries for {} states", z.len(), n)));
    }
    Ok(())
}

fn pair_priority(w: usize, wp: usize, fair: &[bool], fair_p: &[bool]) -> u8 {
    if fair_p[wp] {
        0
    } else if fair[w] {
        1
    } else {
        2
    }
}

/// Three-priority parity game for fair alternating simulation.
///
/// `z` must be [`compute_fairness_region`] of `fk`. Pair vertices exist only
/// for label-matching pairs. A pair whose left state lies outside `z` has the
/// single edge to `WINSINK`. At `⟨T,r',$⟩` player 2 may move to `WINSINK`
/// when some `r ∈ T` lies outside `z`; otherwise, when no `r ∈ T` matches the
/// label of `r'`, the only edge goes to `FROWN`.
pub fn build_fairaltsim_game(
    fk: &FairAts,
    fkp: &FairAts,
    idx: &SuccIndex,
    idxp: &SuccIndex,
    z: &[bool],
) -> Result<FairGame> {
    let (k, kp) = (&fk.ats, &fkp.ats);
    fk.ensure_valid()?;
    fkp.ensure_valid()?;
    let labels = LabelMatch::between(k, kp)?;
    check_index(k, idx)?;
    check_index(kp, idxp)?;
    let (n, np) = (k.num_states(), kp.num_states());
    check_region(z, n)?;
    let (ns, nsp) = (idx.count(), idxp.count());
    let fair = fk.fair_mask();
    let fair_p = fkp.fair_mask();

    let mut b = ArenaBuilder::new();
    let mut d = VertexDecode::new(n, np, ns, nsp);
    let mut prio = Vec::new();
    for w in 0..n {
        for wp in 0..np {
            if labels.matches(w, wp) {
                d.add(&mut b, Vertex::Pair { w, wp });
                prio.push(pair_priority(w, wp, &fair, &fair_p));
            }
        }
    }
    for set in 0..ns {
        for wp in 0..np {
            d.add(&mut b, Vertex::Hash { set, wp });
            prio.push(2);
        }
    }
    for set in 0..ns {
        for set_p in 0..nsp {
            d.add(&mut b, Vertex::Sets { set, set_p });
            prio.push(2);
        }
    }
    for set in 0..ns {
        for rp in 0..np {
            d.add(&mut b, Vertex::Dollar { set, rp });
            prio.push(2);
        }
    }
    let frown = d.add(&mut b, Vertex::Frown);
    prio.push(1);
    let win = d.add(&mut b, Vertex::WinSink);
    prio.push(2);

    for w in 0..n {
        for wp in 0..np {
            let Some(v) = d.pair(w, wp) else { continue };
            if !z[w] {
                b.add_edge(v, win);
                continue;
            }
            for &a in &k.enabled1[w] {
                b.add_edge(v, d.hash(idx.id(w, a), wp).unwrap());
            }
        }
    }
    for set in 0..ns {
        for wp in 0..np {
            let v = d.hash(set, wp).unwrap();
            for &ap in &kp.enabled1[wp] {
                b.add_edge(v, d.sets(set, idxp.id(wp, ap)).unwrap());
            }
        }
    }
    for set in 0..ns {
        for set_p in 0..nsp {
            let v = d.sets(set, set_p).unwrap();
            for &rp in idxp.set(set_p) {
                b.add_edge(v, d.dollar(set, rp).unwrap());
            }
        }
    }
    for set in 0..ns {
        let members = idx.set(set);
        let escapes = members.iter().any(|&r| !z[r]);
        for rp in 0..np {
            let v = d.dollar(set, rp).unwrap();
            let mut matched = false;
            for &r in members {
                if let Some(u) = d.pair(r, rp) {
                    matched = true;
                    b.add_edge(v, u);
                }
            }
            if escapes {
                b.add_edge(v, win);
            } else if !matched {
                b.add_edge(v, frown);
            }
        }
    }
    b.add_edge(frown, frown);
    b.add_edge(win, win);

    let arena = b.build(Payload::Priority(prio))?;
    Ok(Game { kind: GameKind::FairAltSim, arena, decode: d, sizes: (n, np) })
}

/// Three-priority parity game for fair simulation between TSs.
///
/// Player 1 moves the left system (`⟨w1,w2⟩ → ⟨w1',w2,$⟩`), player 2 answers
/// with a label-matching successor of `w2`. Sinks follow
/// [`build_fairaltsim_game`]: `⟨w1',w2,$⟩` may move to `WINSINK` when
/// `w1' ∉ z`, and moves only to `FROWN` when it has no other edge.
pub fn build_fairsim_game(ft: &FairTs, ftp: &FairTs, z: &[bool]) -> Result<FairGame> {
    ft.ensure_valid()?;
    ftp.ensure_valid()?;
    let (t, tp) = (&ft.ts, &ftp.ts);
    let labels = LabelMatch::between_ts(t, tp)?;
    let (n, np) = (t.num_states(), tp.num_states());
    check_region(z, n)?;
    let fair = ft.fair_mask();
    let fair_p = ftp.fair_mask();

    let mut b = ArenaBuilder::new();
    let mut d = VertexDecode::new(n, np, 0, 0);
    let mut prio = Vec::new();
    for w in 0..n {
        for wp in 0..np {
            if labels.matches(w, wp) {
                d.add(&mut b, Vertex::Pair { w, wp });
                prio.push(pair_priority(w, wp, &fair, &fair_p));
            }
        }
    }
    for w in 0..n {
        for wp in 0..np {
            d.add(&mut b, Vertex::Step { w, wp });
            prio.push(2);
        }
    }
    let frown = d.add(&mut b, Vertex::Frown);
    prio.push(1);
    let win = d.add(&mut b, Vertex::WinSink);
    prio.push(2);

    for w in 0..n {
        for wp in 0..np {
            let Some(v) = d.pair(w, wp) else { continue };
            if !z[w] {
                b.add_edge(v, win);
                continue;
            }
            for &w1 in &t.succ[w] {
                b.add_edge(v, d.step(w1, wp).unwrap());
            }
        }
    }
    for w in 0..n {
        for wp in 0..np {
            let v = d.step(w, wp).unwrap();
            let mut matched = false;
            for &w2 in &tp.succ[wp] {
                if let Some(u) = d.pair(w, w2) {
                    matched = true;
                    b.add_edge(v, u);
                }
            }
            if !z[w] {
                b.add_edge(v, win);
            } else if !matched {
                b.add_edge(v, frown);
            }
        }
    }
    b.add_edge(frown, frown);
    b.add_edge(win, win);

    let arena = b.build(Payload::Priority(prio))?;
    Ok(Game { kind: GameKind::FairSim, arena, decode: d, sizes: (n, np) })
}

/// Runs of both systems read off a play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayRuns {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub reached_frown: bool,
    pub reached_win_sink: bool,
}

/// Decodes a finite play starting at a pair vertex into the runs it induces.
///
/// After `FROWN` the last left state is the lowest-index member of the last
/// successor set (every member mismatches there).
pub fn play_to_runs(game: &Game, idx: Option<&SuccIndex>, play: &[usize]) -> Result<PlayRuns> {
    let g = &game.arena;
    let d = &game.decode;
    let Some(&first) = play.first() else {
        return Err(Error::NotAPlay("empty sequence".into()));
    };
    if first >= g.num_vertices() || !matches!(d.vertex(first), Vertex::Pair { .. }) {
        return Err(Error::NotAPlay("does not start at a pair vertex".into()));
    }
    for win in play.windows(2) {
        if win[1] >= g.num_vertices() || !g.has_edge(win[0], win[1]) {
            return Err(Error::NotAPlay(format!("no edge {} -> {}", win[0], win[1])));
        }
    }
    let mut runs = PlayRuns { left: vec![], right: vec![], reached_frown: false, reached_win_sink: false };
    let mut prev: Option<Vertex> = None;
    for &v in play {
        match d.vertex(v) {
            Vertex::Pair { w, wp } => {
                runs.left.push(w);
                runs.right.push(wp);
            }
            Vertex::Frown => {
                if !runs.reached_frown {
                    runs.reached_frown = true;
                    match prev {
                        Some(Vertex::Dollar { set, rp }) => {
                            let idx = idx.ok_or(Error::MissingPayload("successor index"))?;
                            runs.left.push(idx.members(set)?[0]);
                            runs.right.push(rp);
                        }
                        Some(Vertex::Step { w, .. }) => runs.left.push(w),
                        _ => {}
                    }
                }
            }
            Vertex::WinSink => runs.reached_win_sink = true,
            _ => {}
        }
        prev = Some(d.vertex(v));
    }
    Ok(runs)
}
