//! Two-player turn-based game arenas and their solvers.
//!
//! Vertices are dense integers. Parity objectives are min-parity over the
//! priorities `{0, 1, 2}` (the recursive oracle accepts any priority): the
//! even player wins a play iff the least priority seen infinitely often is
//! even.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }
}

/// Objective data attached to an arena.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    None,
    /// Reachability target for player 1 (safety for player 2 on the complement).
    Target(Vec<bool>),
    Priority(Vec<u8>),
}

/// A game graph with both out- and in-adjacency in compressed form.
#[derive(Debug, Clone)]
pub struct GameArena {
    owner: Vec<Player>,
    out_off: Vec<usize>,
    out: Vec<usize>,
    in_off: Vec<usize>,
    inn: Vec<usize>,
    payload: Payload,
}

/// Incremental arena construction. Duplicate edges are dropped.
#[derive(Debug, Default, Clone)]
pub struct ArenaBuilder {
    owner: Vec<Player>,
    edges: Vec<(usize, usize)>,
}

impl ArenaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(vertices: usize, edges: usize) -> Self {
        ArenaBuilder { owner: Vec::with_capacity(vertices), edges: Vec::with_capacity(edges) }
    }

    pub fn add_vertex(&mut self, owner: Player) -> usize {
        self.owner.push(owner);
        self.owner.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.owner.len()
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.edges.push((from, to));
    }

    /// Counting-sort the edge list into CSR form; linear in `|V| + |E|`.
    pub fn build(self, payload: Payload) -> Result<GameArena> {
        let n = self.owner.len();
        if let Some(&(u, v)) = self.edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::Invalid(vec![format!("edge {u} -> {v} references a missing vertex")]));
        }
        let mut out_off = vec![0usize; n + 1];
        for &(u, _) in &self.edges {
            out_off[u + 1] += 1;
        }
        for i in 0..n {
            out_off[i + 1] += out_off[i];
        }
        let mut fill = out_off.clone();
        let mut raw = vec![0usize; self.edges.len()];
        for &(u, v) in &self.edges {
            raw[fill[u]] = v;
            fill[u] += 1;
        }
        // drop duplicates with a per-source stamp
        let mut stamp = vec![usize::MAX; n];
        let mut out = Vec::with_capacity(raw.len());
        let mut new_off = vec![0usize; n + 1];
        for u in 0..n {
            for &v in &raw[out_off[u]..out_off[u + 1]] {
                if stamp[v] != u {
                    stamp[v] = u;
                    out.push(v);
                }
            }
            new_off[u + 1] = out.len();
        }
        let out_off = new_off;

        let mut in_off = vec![0usize; n + 1];
        for &v in &out {
            in_off[v + 1] += 1;
        }
        for i in 0..n {
            in_off[i + 1] += in_off[i];
        }
        let mut fill = in_off.clone();
        let mut inn = vec![0usize; out.len()];
        for u in 0..n {
            for &v in &out[out_off[u]..out_off[u + 1]] {
                inn[fill[v]] = u;
                fill[v] += 1;
            }
        }
        let arena = GameArena { owner: self.owner, out_off, out, in_off, inn, payload };
        let problems = arena.validate();
        if problems.is_empty() {
            Ok(arena)
        } else {
            Err(Error::Invalid(problems))
        }
    }
}

impl GameArena {
    pub fn num_vertices(&self) -> usize {
        self.owner.len()
    }

    pub fn num_edges(&self) -> usize {
        self.out.len()
    }

    #[inline]
    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    #[inline]
    pub fn succ(&self, v: usize) -> &[usize] {
        &self.out[self.out_off[v]..self.out_off[v + 1]]
    }

    #[inline]
    pub fn pred(&self, v: usize) -> &[usize] {
        &self.inn[self.in_off[v]..self.in_off[v + 1]]
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn target(&self) -> Option<&[bool]> {
        match &self.payload {
            Payload::Target(t) => Some(t),
            _ => None,
        }
    }

    pub fn priorities(&self) -> Option<&[u8]> {
        match &self.payload {
            Payload::Priority(p) => Some(p),
            _ => None,
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ(u).contains(&v)
    }

    /// Arena with the same graph and a different objective.
    pub fn with_payload(&self, payload: Payload) -> Result<GameArena> {
        let g = GameArena { payload, ..self.clone() };
        let problems = g.validate();
        if problems.is_empty() {
            Ok(g)
        } else {
            Err(Error::Invalid(problems))
        }
    }

    pub fn validate(&self) -> Vec<String> {
        let n = self.num_vertices();
        let mut out = Vec::new();
        for v in 0..n {
            if self.succ(v).is_empty() {
                out.push(format!("vertex {v} has no outgoing edge"));
            }
        }
        match &self.payload {
            Payload::Target(t) if t.len() != n => out.push("target mask has the wrong size".into()),
            Payload::Priority(p) if p.len() != n => out.push("priority table has the wrong size".into()),
            _ => {}
        }
        out
    }

    /// Cells held by the arena: vertices plus edges.
    pub fn cells(&self) -> usize {
        self.num_vertices() + self.num_edges()
    }
}

/// A memoryless strategy: `choice[v]` is the successor picked at `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorylessStrategy {
    pub player: Player,
    pub choice: Vec<Option<usize>>,
}

impl MemorylessStrategy {
    pub fn empty(player: Player, n: usize) -> Self {
        MemorylessStrategy { player, choice: vec![None; n] }
    }
}

/// Attractor of `player` to `target` inside the subgame `within`.
///
/// Backward worklist with out-degree counters for opponent vertices;
/// `O(|V| + |E|)`. Vertices outside `within` are ignored. The strategy
/// records, for each attracted vertex of `player` not in `target`, the
/// successor through which it was attracted.
pub fn attractor_within(
    g: &GameArena,
    within: &[bool],
    player: Player,
    target: &[bool],
) -> (Vec<bool>, MemorylessStrategy) {
    let n = g.num_vertices();
    let mut attr = vec![false; n];
    let mut strat = MemorylessStrategy::empty(player, n);
    let mut counter: Vec<usize> = (0..n)
        .map(|v| if within[v] { g.succ(v).iter().filter(|&&u| within[u]).count() } else { 0 })
        .collect();
    let mut queue = VecDeque::new();
    for v in 0..n {
        if within[v] && target[v] {
            attr[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in g.pred(u) {
            if !within[v] || attr[v] {
                continue;
            }
            if g.owner(v) == player {
                attr[v] = true;
                strat.choice[v] = Some(u);
                queue.push_back(v);
            } else {
                counter[v] -= 1;
                if counter[v] == 0 {
                    attr[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    (attr, strat)
}

/// Vertices from which `player` can force a visit to `target`.
pub fn attractor(g: &GameArena, player: Player, target: &[bool]) -> (Vec<bool>, MemorylessStrategy) {
    let all = vec![true; g.num_vertices()];
    attractor_within(g, &all, player, target)
}

#[derive(Debug, Clone)]
pub struct ReachResult {
    /// Player 1 wins `Reach(T)` here.
    pub win1: Vec<bool>,
    /// Player 2 wins `Safe(V \ T)` here.
    pub win2: Vec<bool>,
    pub strat1: MemorylessStrategy,
    pub strat2: MemorylessStrategy,
}

/// Solves the arena's reachability objective for player 1.
pub fn solve_reachability(g: &GameArena) -> Result<ReachResult> {
    let target = g.target().ok_or(Error::MissingPayload("target"))?;
    Ok(solve_reachability_to(g, target))
}

pub fn solve_reachability_to(g: &GameArena, target: &[bool]) -> ReachResult {
    let (win1, strat1) = attractor(g, Player::P1, target);
    let win2: Vec<bool> = win1.iter().map(|b| !b).collect();
    let strat2 = stay_inside(g, Player::P2, &win2);
    ReachResult { win1, win2, strat1, strat2 }
}

/// Vertices where `player` can stay in `safe` forever, with a strategy.
pub fn solve_safety(g: &GameArena, player: Player, safe: &[bool]) -> (Vec<bool>, MemorylessStrategy) {
    let unsafe_: Vec<bool> = safe.iter().map(|b| !b).collect();
    let (bad, _) = attractor(g, player.opponent(), &unsafe_);
    let win: Vec<bool> = bad.iter().map(|b| !b).collect();
    let strat = stay_inside(g, player, &win);
    (win, strat)
}

/// Lowest-index successor inside `region` for each `player` vertex of `region`.
fn stay_inside(g: &GameArena, player: Player, region: &[bool]) -> MemorylessStrategy {
    let mut s = MemorylessStrategy::empty(player, g.num_vertices());
    for v in 0..g.num_vertices() {
        if region[v] && g.owner(v) == player {
            s.choice[v] = g.succ(v).iter().copied().find(|&u| region[u]);
        }
    }
    s
}

/// Vertices from which `player` forces infinitely many visits to `accepting`.
///
/// Repeated-attractor scheme, `O(|V|·|E|)`.
pub fn solve_buchi(g: &GameArena, player: Player, accepting: &[bool]) -> (Vec<bool>, MemorylessStrategy) {
    let n = g.num_vertices();
    let mut current = vec![true; n];
    loop {
        let goal: Vec<bool> = (0..n).map(|v| current[v] && accepting[v]).collect();
        let (reach, strat) = attractor_within(g, &current, player, &goal);
        let trap: Vec<bool> = (0..n).map(|v| current[v] && !reach[v]).collect();
        if !trap.iter().any(|&b| b) {
            let mut s = strat;
            for v in 0..n {
                if current[v] && accepting[v] && g.owner(v) == player {
                    s.choice[v] = g.succ(v).iter().copied().find(|&u| current[u]);
                }
            }
            return (current, s);
        }
        let (lost, _) = attractor_within(g, &current, player.opponent(), &trap);
        for v in 0..n {
            if lost[v] {
                current[v] = false;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParityResult {
    pub win_even: Vec<bool>,
    pub win_odd: Vec<bool>,
    /// Strategy of the even player, defined on its vertices in `win_even`.
    pub strategy: MemorylessStrategy,
}

/// Three-priority parity game by small progress measures.
///
/// Measures range over `0..=|p⁻¹(1)|` plus ⊤; each vertex is lifted at most
/// `|p⁻¹(1)| + 2` times, giving `O(|V|·|E|)` total work. Worklists run in
/// ascending vertex order.
pub fn solve_parity3(g: &GameArena, even: Player) -> Result<ParityResult> {
    let prio = g.priorities().ok_or(Error::MissingPayload("priority"))?;
    if prio.iter().any(|&p| p > 2) {
        return Err(Error::Invalid(vec!["priority above 2".into()]));
    }
    let n = g.num_vertices();
    let top = prio.iter().filter(|&&p| p == 1).count() as u32 + 1;
    let mut measure = vec![0u32; n];

    let prog = |measure: &[u32], v: usize, u: usize| -> u32 {
        let m = measure[u];
        if m == top {
            return top;
        }
        match prio[v] {
            0 => 0,
            1 => m + 1,
            _ => m,
        }
    };
    let best = |measure: &[u32], v: usize| -> u32 {
        let vals = g.succ(v).iter().map(|&u| prog(measure, v, u));
        if g.owner(v) == even {
            vals.min().unwrap()
        } else {
            vals.max().unwrap()
        }
    };

    // min-heap-free worklist: BTreeSet keeps ascending order deterministic
    let mut queued = vec![true; n];
    let mut work: std::collections::BTreeSet<usize> = (0..n).collect();
    while let Some(v) = work.pop_first() {
        queued[v] = false;
        let m = best(&measure, v);
        if m > measure[v] {
            measure[v] = m;
            for &p in g.pred(v) {
                if !queued[p] && measure[p] < top {
                    queued[p] = true;
                    work.insert(p);
                }
            }
        }
    }

    let win_even: Vec<bool> = measure.iter().map(|&m| m < top).collect();
    let win_odd: Vec<bool> = win_even.iter().map(|b| !b).collect();
    let mut strategy = MemorylessStrategy::empty(even, n);
    for v in 0..n {
        if win_even[v] && g.owner(v) == even {
            let mut choice = None;
            let mut lo = u32::MAX;
            for &u in g.succ(v) {
                if measure[u] < lo {
                    lo = measure[u];
                    choice = Some(u);
                }
            }
            strategy.choice[v] = choice;
        }
    }
    Ok(ParityResult { win_even, win_odd, strategy })
}

#[derive(Debug, Clone)]
pub struct ZielonkaResult {
    pub win_even: Vec<bool>,
    pub win_odd: Vec<bool>,
    pub strat_even: MemorylessStrategy,
    pub strat_odd: MemorylessStrategy,
}

/// Recursive attractor-decomposition solver for min-parity with any number
/// of priorities. Used as an oracle for [`solve_parity3`].
pub fn solve_parity_zielonka(g: &GameArena, even: Player) -> Result<ZielonkaResult> {
    let prio = g.priorities().ok_or(Error::MissingPayload("priority"))?;
    let n = g.num_vertices();
    let all = vec![true; n];
    let (win, choice) = zielonka(g, prio, even, &all);
    let mut strat_even = MemorylessStrategy::empty(even, n);
    let mut strat_odd = MemorylessStrategy::empty(even.opponent(), n);
    for v in 0..n {
        if g.owner(v) == even && win[0][v] {
            strat_even.choice[v] = choice[v];
        }
        if g.owner(v) != even && win[1][v] {
            strat_odd.choice[v] = choice[v];
        }
    }
    let [win_even, win_odd] = win;
    Ok(ZielonkaResult { win_even, win_odd, strat_even, strat_odd })
}

/// Returns the winning regions `[even, odd]` of the subgame `sub` and, for
/// every vertex of `sub` whose owner wins there, a winning move.
fn zielonka(g: &GameArena, prio: &[u8], even: Player, sub: &[bool]) -> ([Vec<bool>; 2], Vec<Option<usize>>) {
    let n = g.num_vertices();
    let mut choice = vec![None; n];
    let Some(d) = (0..n).filter(|&v| sub[v]).map(|v| prio[v]).min() else {
        return ([vec![false; n], vec![false; n]], choice);
    };
    let alpha = (d % 2) as usize;
    let player_of = |i: usize| if i == 0 { even } else { even.opponent() };
    let (pa, po) = (player_of(alpha), player_of(1 - alpha));

    let top: Vec<bool> = (0..n).map(|v| sub[v] && prio[v] == d).collect();
    let (a, a_strat) = attractor_within(g, sub, pa, &top);
    let rest: Vec<bool> = (0..n).map(|v| sub[v] && !a[v]).collect();
    let (w1, c1) = zielonka(g, prio, even, &rest);

    if !w1[1 - alpha].iter().any(|&b| b) {
        let mut win = [vec![false; n], vec![false; n]];
        win[alpha] = sub.to_vec();
        for v in 0..n {
            if !sub[v] || g.owner(v) != pa {
                continue;
            }
            choice[v] = if rest[v] {
                c1[v]
            } else if top[v] {
                g.succ(v).iter().copied().find(|&u| sub[u])
            } else {
                a_strat.choice[v]
            };
        }
        return (win, choice);
    }

    let (b, b_strat) = attractor_within(g, sub, po, &w1[1 - alpha]);
    let rest2: Vec<bool> = (0..n).map(|v| sub[v] && !b[v]).collect();
    let (w2, c2) = zielonka(g, prio, even, &rest2);
    let mut win = [vec![false; n], vec![false; n]];
    for v in 0..n {
        if !sub[v] {
            continue;
        }
        if b[v] {
            win[1 - alpha][v] = true;
            if g.owner(v) == po {
                choice[v] = if w1[1 - alpha][v] { c1[v] } else { b_strat.choice[v] };
            }
        } else {
            win[0][v] = w2[0][v];
            win[1][v] = w2[1][v];
            choice[v] = c2[v];
        }
    }
    (win, choice)
}

/// Objective checked by [`verify_strategy`].
#[derive(Debug, Clone, Copy)]
pub enum StrategyObjective<'a> {
    /// The strategy's player must reach the set on every play.
    Reach(&'a [bool]),
    /// The strategy's player must stay in the set forever.
    Safety(&'a [bool]),
    /// Min-parity over the arena's priorities; `even` names the even player.
    Parity { even: Player },
}

/// A finite stem followed by a cycle (the cycle may be empty for safety
/// violations, where the stem ends in the offending vertex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

/// Checks that `s` wins `objective` from every vertex of `claimed`.
///
/// The strategy's player is restricted to its chosen edge; the opponent keeps
/// all edges. Returns a counterexample play if the opponent can escape.
pub fn verify_strategy(
    g: &GameArena,
    s: &MemorylessStrategy,
    objective: StrategyObjective<'_>,
    claimed: &[bool],
) -> Result<std::result::Result<(), Lasso>> {
    let n = g.num_vertices();
    for v in 0..n {
        if let Some(u) = s.choice[v] {
            if !g.has_edge(v, u) {
                return Err(Error::BadStrategyEdge { from: v, to: u });
            }
        }
    }
    let moves = |v: usize| -> Vec<usize> {
        if g.owner(v) == s.player {
            s.choice[v].into_iter().collect()
        } else {
            g.succ(v).to_vec()
        }
    };
    // a strategy vertex with no choice is a dead end: report it as a stem
    let stop_at = |v: usize, stop: Option<&[bool]>| stop.is_some_and(|t| t[v]);

    let stop: Option<&[bool]> = match objective {
        StrategyObjective::Reach(t) => Some(t),
        _ => None,
    };
    // forward exploration of the restricted graph from `claimed`
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if claimed[v] {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    let stem_to = |parent: &[usize], v: usize| -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while parent[cur] != usize::MAX {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    };
    while let Some(v) = queue.pop_front() {
        if let StrategyObjective::Safety(safe) = objective {
            if !safe[v] {
                return Ok(Err(Lasso { stem: stem_to(&parent, v), cycle: vec![] }));
            }
        }
        if stop_at(v, stop) {
            continue;
        }
        let next = moves(v);
        if next.is_empty() {
            return Ok(Err(Lasso { stem: stem_to(&parent, v), cycle: vec![] }));
        }
        for u in next {
            if !seen[u] {
                seen[u] = true;
                parent[u] = v;
                queue.push_back(u);
            }
        }
    }

    // vertices allowed on a violating cycle, per threshold
    let find_cycle = |allowed: &dyn Fn(usize) -> bool, through: usize| -> Option<Vec<usize>> {
        // BFS from `through` back to itself inside `allowed`
        let mut par = vec![usize::MAX; n];
        let mut vis = vec![false; n];
        let mut q = VecDeque::new();
        for u in moves(through) {
            if allowed(u) && !vis[u] {
                vis[u] = true;
                par[u] = through;
                q.push_back(u);
            }
        }
        while let Some(v) = q.pop_front() {
            if v == through {
                let mut cyc = vec![];
                let mut cur = par[v];
                while cur != through {
                    cyc.push(cur);
                    cur = par[cur];
                }
                cyc.push(through);
                cyc.reverse();
                return Some(cyc);
            }
            for u in moves(v) {
                if allowed(u) && !vis[u] {
                    vis[u] = true;
                    par[u] = v;
                    q.push_back(u);
                }
            }
        }
        None
    };

    match objective {
        StrategyObjective::Safety(_) => Ok(Ok(())),
        StrategyObjective::Reach(t) => {
            for x in 0..n {
                if seen[x] && !t[x] {
                    if let Some(cycle) = find_cycle(&|u| seen[u] && !t[u], x) {
                        return Ok(Err(Lasso { stem: stem_to(&parent, x), cycle }));
                    }
                }
            }
            Ok(Ok(()))
        }
        StrategyObjective::Parity { even } => {
            let prio = g.priorities().ok_or(Error::MissingPayload("priority"))?;
            // the strategy's player needs every reachable cycle to have a
            // least priority of its own parity
            let bad_parity = if s.player == even { 1 } else { 0 };
            for x in 0..n {
                if seen[x] && prio[x] % 2 == bad_parity {
                    let q = prio[x];
                    if let Some(cycle) = find_cycle(&|u| seen[u] && prio[u] >= q, x) {
                        return Ok(Err(Lasso { stem: stem_to(&parent, x), cycle }));
                    }
                }
            }
            Ok(Ok(()))
        }
    }
}

/// Graphviz rendering. Player-1 vertices are boxes, player-2 vertices
/// diamonds; `label` supplies the decoded vertex text.
pub fn to_dot(g: &GameArena, label: &dyn Fn(usize) -> String) -> String {
    let mut out = String::from("digraph arena {\n");
    for v in 0..g.num_vertices() {
        let shape = match g.owner(v) {
            Player::P1 => "box",
            Player::P2 => "diamond",
        };
        let mut text = label(v);
        let mut extra = String::new();
        match g.payload() {
            Payload::Priority(p) => {
                let _ = write!(text, "\\np={}", p[v]);
            }
            Payload::Target(t) if t[v] => {
                text.push_str("\\ntarget");
                extra.push_str(", peripheries=2");
            }
            _ => {}
        }
        let text = text.replace('"', "\\\"");
        let _ = writeln!(out, "  v{v} [shape={shape}, label=\"{text}\"{extra}];");
    }
    for u in 0..g.num_vertices() {
        for &v in g.succ(u) {
            let _ = writeln!(out, "  v{u} -> v{v};");
        }
    }
    out.push_str("}\n");
    out
}
