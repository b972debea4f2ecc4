//! Labeled transition systems, alternating transition systems, their fair
//! variants, the text format for both, and the computed relation type.
//!
//! States, actions and observations are declared by name and canonicalized
//! to dense 0-based indices in declaration order.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Name of the single Agent-2 action of an embedded transition system.
pub const BOTTOM_ACTION: &str = "⊥";

/// A labeled alternating transition system with two agents.
///
/// `delta` is a dense `|W| × |A1| × |A2|` table; a cell is `Some` exactly when
/// both actions are enabled at the state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ats {
    pub obs: Vec<String>,
    pub states: Vec<String>,
    pub init: usize,
    pub actions1: Vec<String>,
    pub actions2: Vec<String>,
    pub label: Vec<usize>,
    /// `P1(w)`, ascending.
    pub enabled1: Vec<Vec<usize>>,
    /// `P2(w)`, ascending.
    pub enabled2: Vec<Vec<usize>>,
    pub delta: Vec<Option<usize>>,
}

impl Ats {
    /// Creates a system with the given alphabets and an empty transition table.
    pub fn with_shape(
        obs: Vec<String>,
        states: Vec<String>,
        actions1: Vec<String>,
        actions2: Vec<String>,
    ) -> Self {
        let n = states.len();
        let cells = n * actions1.len() * actions2.len();
        Ats {
            obs,
            states,
            init: 0,
            actions1,
            actions2,
            label: vec![0; n],
            enabled1: vec![Vec::new(); n],
            enabled2: vec![Vec::new(); n],
            delta: vec![None; cells],
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    #[inline]
    fn cell(&self, w: usize, a: usize, b: usize) -> usize {
        (w * self.actions1.len() + a) * self.actions2.len() + b
    }

    #[inline]
    pub fn delta(&self, w: usize, a: usize, b: usize) -> Option<usize> {
        self.delta.get(self.cell(w, a, b)).copied().flatten()
    }

    /// Transition target of an enabled triple. Panics on a disabled cell.
    #[inline]
    pub fn step(&self, w: usize, a: usize, b: usize) -> usize {
        self.delta(w, a, b)
            .unwrap_or_else(|| panic!("δ({w},{a},{b}) is not defined"))
    }

    pub fn set_delta(&mut self, w: usize, a: usize, b: usize, target: Option<usize>) {
        let c = self.cell(w, a, b);
        self.delta[c] = target;
    }

    pub fn is_enabled1(&self, w: usize, a: usize) -> bool {
        self.enabled1[w].binary_search(&a).is_ok()
    }

    /// `Succ(w,a)` by direct enumeration over `P2(w)`, ascending and deduplicated.
    pub fn successors(&self, w: usize, a: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.enabled2[w].iter().map(|&b| self.step(w, a, b)).collect();
        set.into_iter().collect()
    }

    /// Every invariant violation; empty iff the system is well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.num_states();
        let (na1, na2) = (self.actions1.len(), self.actions2.len());
        if n == 0 {
            out.push("no states".to_string());
            return out;
        }
        if self.init >= n {
            out.push(format!("init {} out of range", self.init));
        }
        if self.label.len() != n || self.enabled1.len() != n || self.enabled2.len() != n {
            out.push("per-state tables do not match the state count".to_string());
            return out;
        }
        if self.delta.len() != n * na1 * na2 {
            out.push("transition table has the wrong size".to_string());
            return out;
        }
        for w in 0..n {
            if self.label[w] >= self.obs.len() {
                out.push(format!("label of state {w} out of range"));
            }
            for (agent, enabled, count) in [(1, &self.enabled1[w], na1), (2, &self.enabled2[w], na2)] {
                if enabled.is_empty() {
                    out.push(format!("P{agent}({w}) empty"));
                }
                if enabled.iter().any(|&a| a >= count) {
                    out.push(format!("P{agent}({w}) has an undeclared action"));
                }
                if enabled.windows(2).any(|p| p[0] >= p[1]) {
                    out.push(format!("P{agent}({w}) is not strictly ascending"));
                }
            }
            for a in 0..na1 {
                for b in 0..na2 {
                    let on = self.enabled1[w].contains(&a) && self.enabled2[w].contains(&b);
                    match (on, self.delta(w, a, b)) {
                        (true, None) => out.push(format!("missing transition δ({w},{a},{b})")),
                        (false, Some(_)) => {
                            out.push(format!("δ({w},{a},{b}): transition on disabled action"))
                        }
                        (true, Some(t)) if t >= n => {
                            out.push(format!("δ({w},{a},{b}) = {t} is not a state"))
                        }
                        _ => {}
                    }
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }
}

/// An ATS with a Büchi fairness constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairAts {
    pub ats: Ats,
    /// Büchi states, ascending.
    pub fair: Vec<usize>,
}

impl FairAts {
    pub fn fair_mask(&self) -> Vec<bool> {
        mask(self.ats.num_states(), &self.fair)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = self.ats.validate();
        check_fair(&self.fair, self.ats.num_states(), &mut out);
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        as_result(self.validate())
    }
}

/// A labeled transition system. `succ[w]` is ascending and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ts {
    pub obs: Vec<String>,
    pub states: Vec<String>,
    pub init: usize,
    pub label: Vec<usize>,
    pub succ: Vec<Vec<usize>>,
}

impl Ts {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.num_states();
        if n == 0 {
            out.push("no states".to_string());
            return out;
        }
        if self.init >= n {
            out.push(format!("init {} out of range", self.init));
        }
        if self.label.len() != n || self.succ.len() != n {
            out.push("per-state tables do not match the state count".to_string());
            return out;
        }
        for w in 0..n {
            if self.label[w] >= self.obs.len() {
                out.push(format!("label of state {w} out of range"));
            }
            if self.succ[w].is_empty() {
                out.push(format!("state {w} has no outgoing edge"));
            }
            if self.succ[w].iter().any(|&t| t >= n) {
                out.push(format!("state {w} has an edge to an undeclared state"));
            }
            if self.succ[w].windows(2).any(|p| p[0] >= p[1]) {
                out.push(format!("successors of state {w} are not strictly ascending"));
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        as_result(self.validate())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairTs {
    pub ts: Ts,
    pub fair: Vec<usize>,
}

impl FairTs {
    pub fn fair_mask(&self) -> Vec<bool> {
        mask(self.ts.num_states(), &self.fair)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = self.ts.validate();
        check_fair(&self.fair, self.ts.num_states(), &mut out);
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        as_result(self.validate())
    }
}

fn mask(n: usize, members: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &w in members {
        m[w] = true;
    }
    m
}

fn check_fair(fair: &[usize], n: usize, out: &mut Vec<String>) {
    if fair.iter().any(|&w| w >= n) {
        out.push("fair set contains an undeclared state".to_string());
    }
    if fair.windows(2).any(|p| p[0] >= p[1]) {
        out.push("fair set is not strictly ascending".to_string());
    }
}

fn as_result(v: Vec<String>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(v))
    }
}

/// Any of the four system kinds the text format can describe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum System {
    Ts(Ts),
    FairTs(FairTs),
    Ats(Ats),
    FairAts(FairAts),
}

impl System {
    pub fn validate(&self) -> Vec<String> {
        match self {
            System::Ts(t) => t.validate(),
            System::FairTs(t) => t.validate(),
            System::Ats(a) => a.validate(),
            System::FairAts(a) => a.validate(),
        }
    }

    pub fn is_ts(&self) -> bool {
        matches!(self, System::Ts(_) | System::FairTs(_))
    }

    pub fn state_names(&self) -> &[String] {
        match self {
            System::Ts(t) => &t.states,
            System::FairTs(t) => &t.ts.states,
            System::Ats(a) => &a.states,
            System::FairAts(a) => &a.ats.states,
        }
    }

    pub fn init(&self) -> usize {
        match self {
            System::Ts(t) => t.init,
            System::FairTs(t) => t.ts.init,
            System::Ats(a) => a.init,
            System::FairAts(a) => a.ats.init,
        }
    }

    /// The system as an ATS, embedding transition systems.
    pub fn to_ats(&self) -> Result<Ats> {
        match self {
            System::Ts(t) => ts_to_ats(t),
            System::FairTs(t) => ts_to_ats(&t.ts),
            System::Ats(a) => Ok(a.clone()),
            System::FairAts(a) => Ok(a.ats.clone()),
        }
    }

    /// The system as a fair ATS. A system without a `fair` line is
    /// unconstrained: every state is a Büchi state.
    pub fn to_fair_ats(&self) -> Result<FairAts> {
        match self {
            System::FairAts(a) => Ok(a.clone()),
            System::FairTs(t) => Ok(FairAts { ats: ts_to_ats(&t.ts)?, fair: t.fair.clone() }),
            other => {
                let ats = other.to_ats()?;
                let fair = (0..ats.num_states()).collect();
                Ok(FairAts { ats, fair })
            }
        }
    }

    /// The system as a fair TS; fails for ATS inputs.
    pub fn to_fair_ts(&self) -> Result<FairTs> {
        match self {
            System::FairTs(t) => Ok(t.clone()),
            System::Ts(t) => Ok(FairTs { ts: t.clone(), fair: (0..t.num_states()).collect() }),
            _ => Err(Error::Unsupported("expected a transition system (`ts`)".into())),
        }
    }

    pub fn as_ts(&self) -> Result<&Ts> {
        match self {
            System::Ts(t) => Ok(t),
            System::FairTs(t) => Ok(&t.ts),
            _ => Err(Error::Unsupported("expected a transition system (`ts`)".into())),
        }
    }
}

/// Embeds a TS as an ATS with the singleton Agent-2 alphabet `{⊥}`.
///
/// Agent-1 action `a_i` at `w` moves to the `i`-th successor of `w` in
/// ascending index order.
pub fn ts_to_ats(ts: &Ts) -> Result<Ats> {
    ts.ensure_valid()?;
    let max_deg = ts.succ.iter().map(Vec::len).max().unwrap_or(0);
    let actions1 = (0..max_deg).map(|i| format!("a{i}")).collect();
    let mut ats = Ats::with_shape(
        ts.obs.clone(),
        ts.states.clone(),
        actions1,
        vec![BOTTOM_ACTION.to_string()],
    );
    ats.init = ts.init;
    ats.label = ts.label.clone();
    for (w, succ) in ts.succ.iter().enumerate() {
        ats.enabled1[w] = (0..succ.len()).collect();
        ats.enabled2[w] = vec![0];
        for (i, &t) in succ.iter().enumerate() {
            ats.set_delta(w, i, 0, Some(t));
        }
    }
    Ok(ats)
}

/// Maps right-system label indices onto left-system label indices.
///
/// Both systems must declare the same observation names (in any order).
pub fn label_translation(left_obs: &[String], right_obs: &[String]) -> Result<Vec<usize>> {
    let left: HashMap<&str, usize> =
        left_obs.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let l: BTreeSet<&str> = left_obs.iter().map(String::as_str).collect();
    let r: BTreeSet<&str> = right_obs.iter().map(String::as_str).collect();
    if l != r {
        let only_l: Vec<_> = l.difference(&r).copied().collect();
        let only_r: Vec<_> = r.difference(&l).copied().collect();
        return Err(Error::ObsMismatch(format!(
            "only left: {only_l:?}, only right: {only_r:?}"
        )));
    }
    Ok(right_obs.iter().map(|s| left[s.as_str()]).collect())
}

/// Label equality between states of two systems, by observation name.
#[derive(Debug, Clone)]
pub struct LabelMatch {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl LabelMatch {
    pub fn new(
        left_obs: &[String],
        left_label: &[usize],
        right_obs: &[String],
        right_label: &[usize],
    ) -> Result<Self> {
        let tr = label_translation(left_obs, right_obs)?;
        Ok(LabelMatch {
            left: left_label.to_vec(),
            right: right_label.iter().map(|&l| tr[l]).collect(),
        })
    }

    pub fn between(k: &Ats, kp: &Ats) -> Result<Self> {
        Self::new(&k.obs, &k.label, &kp.obs, &kp.label)
    }

    pub fn between_ts(k: &Ts, kp: &Ts) -> Result<Self> {
        Self::new(&k.obs, &k.label, &kp.obs, &kp.label)
    }

    #[inline]
    pub fn matches(&self, w: usize, wp: usize) -> bool {
        self.left[w] == self.right[wp]
    }

    /// Right label of `wp` expressed as a left label index.
    #[inline]
    pub fn right_label(&self, wp: usize) -> usize {
        self.right[wp]
    }

    #[inline]
    pub fn left_label(&self, w: usize) -> usize {
        self.left[w]
    }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

struct Tables {
    obs: HashMap<String, usize>,
    states: HashMap<String, usize>,
    act1: HashMap<String, usize>,
    act2: HashMap<String, usize>,
}

fn lookup(map: &HashMap<String, usize>, name: &str, what: &str, line: usize) -> Result<usize> {
    map.get(name).copied().ok_or_else(|| Error::Parse {
        line,
        msg: format!("undeclared {what} `{name}`"),
    })
}

fn declare(names: &[&str], what: &str, line: usize) -> Result<(Vec<String>, HashMap<String, usize>)> {
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.to_string(), i).is_some() {
            return Err(Error::Parse { line, msg: format!("duplicate {what} `{n}`") });
        }
    }
    Ok((names.iter().map(|s| s.to_string()).collect(), map))
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses the line-based system format.
///
/// The header (`ts` or `ats`) selects the kind; a `fair` line (possibly with
/// no names) makes it a fair system.
pub fn parse_system(text: &str) -> Result<System> {
    let mut is_ats: Option<bool> = None;
    let mut t = Tables {
        obs: HashMap::new(),
        states: HashMap::new(),
        act1: HashMap::new(),
        act2: HashMap::new(),
    };
    let mut obs: Option<Vec<String>> = None;
    let mut states: Option<Vec<String>> = None;
    let mut init: Option<usize> = None;
    let mut labels: Vec<Option<usize>> = Vec::new();
    // ats: per-state enabled action lists by local name
    let mut act1: Vec<Option<Vec<usize>>> = Vec::new();
    let mut act2: Vec<Option<Vec<usize>>> = Vec::new();
    let mut act1_names: Vec<String> = Vec::new();
    let mut act2_names: Vec<String> = Vec::new();
    let mut trans: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut trans_lines: Vec<(usize, usize, usize, usize, usize)> = Vec::new();
    let mut edges: Vec<BTreeSet<usize>> = Vec::new();
    let mut fair: Option<BTreeSet<usize>> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let (head, args) = (toks[0], &toks[1..]);
        let Some(ats_mode) = is_ats else {
            match (head, args.len()) {
                ("ats", 0) => is_ats = Some(true),
                ("ts", 0) => is_ats = Some(false),
                _ => return Err(perr(line, "expected header `ats` or `ts`")),
            }
            continue;
        };
        let need_states = |states: &Option<Vec<String>>| -> Result<()> {
            if states.is_none() {
                Err(perr(line, "`states` must be declared first"))
            } else {
                Ok(())
            }
        };
        match head {
            "obs" => {
                if obs.is_some() {
                    return Err(perr(line, "duplicate `obs` line"));
                }
                let (names, map) = declare(args, "observation", line)?;
                obs = Some(names);
                t.obs = map;
            }
            "states" => {
                if states.is_some() {
                    return Err(perr(line, "duplicate `states` line"));
                }
                if args.is_empty() {
                    return Err(perr(line, "`states` needs at least one name"));
                }
                let (names, map) = declare(args, "state", line)?;
                let n = names.len();
                states = Some(names);
                t.states = map;
                labels = vec![None; n];
                act1 = vec![None; n];
                act2 = vec![None; n];
                edges = vec![BTreeSet::new(); n];
            }
            "init" => {
                need_states(&states)?;
                if args.len() != 1 {
                    return Err(perr(line, "`init` takes one state"));
                }
                if init.is_some() {
                    return Err(perr(line, "duplicate `init` line"));
                }
                init = Some(lookup(&t.states, args[0], "state", line)?);
            }
            "label" => {
                need_states(&states)?;
                if obs.is_none() {
                    return Err(perr(line, "`obs` must be declared before `label`"));
                }
                if args.len() != 2 {
                    return Err(perr(line, "`label` takes a state and an observation"));
                }
                let w = lookup(&t.states, args[0], "state", line)?;
                let o = lookup(&t.obs, args[1], "observation", line)?;
                if labels[w].replace(o).is_some() {
                    return Err(perr(line, format!("duplicate `label` line for `{}`", args[0])));
                }
            }
            "act1" | "act2" => {
                if !ats_mode {
                    return Err(perr(line, format!("`{head}` is only allowed in `ats` files")));
                }
                need_states(&states)?;
                if args.len() < 2 {
                    return Err(perr(line, format!("`{head}` takes a state and at least one action")));
                }
                let w = lookup(&t.states, args[0], "state", line)?;
                let (map, names, slot) = if head == "act1" {
                    (&mut t.act1, &mut act1_names, &mut act1[w])
                } else {
                    (&mut t.act2, &mut act2_names, &mut act2[w])
                };
                if slot.is_some() {
                    return Err(perr(line, format!("duplicate `{head}` line for `{}`", args[0])));
                }
                let mut ids = BTreeSet::new();
                for name in &args[1..] {
                    let id = *map.entry(name.to_string()).or_insert_with(|| {
                        names.push(name.to_string());
                        names.len() - 1
                    });
                    if !ids.insert(id) {
                        return Err(perr(line, format!("action `{name}` listed twice")));
                    }
                }
                *slot = Some(ids.into_iter().collect());
            }
            "trans" => {
                if !ats_mode {
                    return Err(perr(line, "`trans` is only allowed in `ats` files"));
                }
                need_states(&states)?;
                if args.len() != 4 {
                    return Err(perr(line, "`trans` takes state, action1, action2, target"));
                }
                let w = lookup(&t.states, args[0], "state", line)?;
                let a = lookup(&t.act1, args[1], "agent-1 action", line)?;
                let b = lookup(&t.act2, args[2], "agent-2 action", line)?;
                let target = lookup(&t.states, args[3], "state", line)?;
                if trans.insert((w, a, b), target).is_some() {
                    return Err(perr(line, "duplicate `trans` line"));
                }
                trans_lines.push((line, w, a, b, target));
            }
            "edge" => {
                if ats_mode {
                    return Err(perr(line, "`edge` is only allowed in `ts` files"));
                }
                need_states(&states)?;
                if args.len() != 2 {
                    return Err(perr(line, "`edge` takes two states"));
                }
                let from = lookup(&t.states, args[0], "state", line)?;
                let to = lookup(&t.states, args[1], "state", line)?;
                if !edges[from].insert(to) {
                    return Err(perr(line, "duplicate `edge` line"));
                }
            }
            "fair" => {
                need_states(&states)?;
                let set = fair.get_or_insert_with(BTreeSet::new);
                for name in args {
                    set.insert(lookup(&t.states, name, "state", line)?);
                }
            }
            other => return Err(perr(line, format!("unknown directive `{other}`"))),
        }
    }

    let end = last_line.max(1);
    let Some(ats_mode) = is_ats else {
        return Err(perr(end, "empty input"));
    };
    let obs = obs.ok_or_else(|| perr(end, "missing `obs` line"))?;
    let states = states.ok_or_else(|| perr(end, "missing `states` line"))?;
    let init = init.ok_or_else(|| perr(end, "missing `init` line"))?;
    let label: Vec<usize> = labels
        .iter()
        .enumerate()
        .map(|(w, l)| l.ok_or_else(|| perr(end, format!("state {w} has no label"))))
        .collect::<Result<_>>()?;
    let fair: Option<Vec<usize>> = fair.map(|s| s.into_iter().collect());

    if ats_mode {
        let n = states.len();
        let mut enabled1 = Vec::with_capacity(n);
        let mut enabled2 = Vec::with_capacity(n);
        for w in 0..n {
            enabled1.push(act1[w].clone().ok_or_else(|| perr(end, format!("state {w} has no `act1` line")))?);
            enabled2.push(act2[w].clone().ok_or_else(|| perr(end, format!("state {w} has no `act2` line")))?);
        }
        let mut ats = Ats::with_shape(obs, states, act1_names, act2_names);
        ats.init = init;
        ats.label = label;
        ats.enabled1 = enabled1;
        ats.enabled2 = enabled2;
        for &(line, w, a, b, target) in &trans_lines {
            if !ats.enabled1[w].contains(&a) || !ats.enabled2[w].contains(&b) {
                return Err(perr(line, format!("transition on disabled action at state {w}")));
            }
            ats.set_delta(w, a, b, Some(target));
        }
        for w in 0..n {
            for &a in &ats.enabled1[w] {
                for &b in &ats.enabled2[w] {
                    if ats.delta(w, a, b).is_none() {
                        return Err(perr(
                            end,
                            format!(
                                "missing transition for ({}, {}, {})",
                                ats.states[w], ats.actions1[a], ats.actions2[b]
                            ),
                        ));
                    }
                }
            }
        }
        ats.ensure_valid()?;
        Ok(match fair {
            Some(fair) => System::FairAts(FairAts { ats, fair }),
            None => System::Ats(ats),
        })
    } else {
        let succ: Vec<Vec<usize>> = edges.into_iter().map(|s| s.into_iter().collect()).collect();
        if let Some(w) = succ.iter().position(Vec::is_empty) {
            return Err(perr(end, format!("state {w} has no outgoing edge")));
        }
        let ts = Ts { obs, states, init, label, succ };
        ts.ensure_valid()?;
        Ok(match fair {
            Some(fair) => System::FairTs(FairTs { ts, fair }),
            None => System::Ts(ts),
        })
    }
}

/// Canonical text form; `parse_system(&write_system(s)) == s`.
pub fn write_system(sys: &System) -> String {
    let mut out = String::new();
    let (ts, ats, fair) = match sys {
        System::Ts(t) => (Some(t), None, None),
        System::FairTs(t) => (Some(&t.ts), None, Some(&t.fair)),
        System::Ats(a) => (None, Some(a), None),
        System::FairAts(a) => (None, Some(&a.ats), Some(&a.fair)),
    };
    let (obs, states, init, label) = match (ts, ats) {
        (Some(t), _) => (&t.obs, &t.states, t.init, &t.label),
        (_, Some(a)) => (&a.obs, &a.states, a.init, &a.label),
        _ => unreachable!(),
    };
    out.push_str(if ts.is_some() { "ts\n" } else { "ats\n" });
    let _ = writeln!(out, "obs {}", obs.join(" "));
    let _ = writeln!(out, "states {}", states.join(" "));
    let _ = writeln!(out, "init {}", states[init]);
    for (w, &l) in label.iter().enumerate() {
        let _ = writeln!(out, "label {} {}", states[w], obs[l]);
    }
    if let Some(a) = ats {
        // action ids are re-assigned by first appearance on re-parse
        for w in 0..states.len() {
            let names: Vec<&str> = a.enabled1[w].iter().map(|&x| a.actions1[x].as_str()).collect();
            let _ = writeln!(out, "act1 {} {}", states[w], names.join(" "));
            let names: Vec<&str> = a.enabled2[w].iter().map(|&x| a.actions2[x].as_str()).collect();
            let _ = writeln!(out, "act2 {} {}", states[w], names.join(" "));
        }
        for w in 0..states.len() {
            for &x in &a.enabled1[w] {
                for &y in &a.enabled2[w] {
                    let _ = writeln!(
                        out,
                        "trans {} {} {} {}",
                        states[w],
                        a.actions1[x],
                        a.actions2[y],
                        states[a.step(w, x, y)]
                    );
                }
            }
        }
    }
    if let Some(t) = ts {
        for (w, succ) in t.succ.iter().enumerate() {
            for &v in succ {
                let _ = writeln!(out, "edge {} {}", states[w], states[v]);
            }
        }
    }
    if let Some(f) = fair {
        let names: Vec<&str> = f.iter().map(|&w| states[w].as_str()).collect();
        if names.is_empty() {
            out.push_str("fair\n");
        } else {
            let _ = writeln!(out, "fair {}", names.join(" "));
        }
    }
    out
}

/// Renumbers both action alphabets into first-appearance order (the order
/// `parse_system` assigns) and drops actions enabled nowhere, so that the
/// text round trip is the identity.
pub fn canonicalize_actions(a: &mut Ats) {
    fn order(enabled: &[Vec<usize>], count: usize) -> Vec<Option<usize>> {
        let mut map = vec![None; count];
        let mut next = 0;
        for list in enabled {
            for &x in list {
                if map[x].is_none() {
                    map[x] = Some(next);
                    next += 1;
                }
            }
        }
        map
    }
    let m1 = order(&a.enabled1, a.actions1.len());
    let m2 = order(&a.enabled2, a.actions2.len());
    let n1 = m1.iter().flatten().count();
    let n2 = m2.iter().flatten().count();
    let mut names1 = vec![String::new(); n1];
    let mut names2 = vec![String::new(); n2];
    for (old, new) in m1.iter().enumerate() {
        if let Some(new) = new {
            names1[*new] = a.actions1[old].clone();
        }
    }
    for (old, new) in m2.iter().enumerate() {
        if let Some(new) = new {
            names2[*new] = a.actions2[old].clone();
        }
    }
    let mut out = Ats::with_shape(a.obs.clone(), a.states.clone(), names1, names2);
    out.init = a.init;
    out.label = a.label.clone();
    for w in 0..a.num_states() {
        for &x in &a.enabled1[w] {
            for &y in &a.enabled2[w] {
                out.set_delta(w, m1[x].unwrap(), m2[y].unwrap(), a.delta(w, x, y));
            }
        }
        let mut e1: Vec<usize> = a.enabled1[w].iter().map(|&x| m1[x].unwrap()).collect();
        let mut e2: Vec<usize> = a.enabled2[w].iter().map(|&y| m2[y].unwrap()).collect();
        e1.sort_unstable();
        e2.sort_unstable();
        out.enabled1[w] = e1;
        out.enabled2[w] = e2;
    }
    *a = out;
}

// ---------------------------------------------------------------------------
// Relations
// ---------------------------------------------------------------------------

/// A computed relation `S ⊆ W × W'`, stored sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimRelation {
    left_size: usize,
    right_size: usize,
    pairs: Vec<(usize, usize)>,
}

impl SimRelation {
    pub fn new(
        left_size: usize,
        right_size: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        if let Some(&(w, wp)) = pairs.iter().find(|&&(w, wp)| w >= left_size || wp >= right_size) {
            return Err(Error::Invalid(vec![format!("pair ({w},{wp}) out of bounds")]));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(SimRelation { left_size, right_size, pairs })
    }

    /// Builds the relation from a row-major `|W| × |W'|` membership matrix.
    pub fn from_matrix(left_size: usize, right_size: usize, matrix: &[bool]) -> Self {
        debug_assert_eq!(matrix.len(), left_size * right_size);
        let pairs = matrix
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (i / right_size, i % right_size))
            .collect();
        SimRelation { left_size, right_size, pairs }
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, w: usize, wp: usize) -> bool {
        self.pairs.binary_search(&(w, wp)).is_ok()
    }

    pub fn to_matrix(&self) -> Vec<bool> {
        let mut m = vec![false; self.left_size * self.right_size];
        for &(w, wp) in &self.pairs {
            m[w * self.right_size + wp] = true;
        }
        m
    }

    /// Relation file with states written as their indices.
    pub fn to_text(&self) -> String {
        self.to_text_named(&index_names(self.left_size), &index_names(self.right_size))
    }

    pub fn to_text_named(&self, left: &[String], right: &[String]) -> String {
        let mut out = format!("# pairs={}\n", self.pairs.len());
        for &(w, wp) in &self.pairs {
            let _ = writeln!(out, "{}\t{}", left[w], right[wp]);
        }
        out
    }

    pub fn parse(text: &str, left: &[String], right: &[String]) -> Result<Self> {
        let lmap: HashMap<&str, usize> = left.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let rmap: HashMap<&str, usize> = right.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut lines = text.lines().enumerate();
        let declared: usize = match lines.next() {
            Some((_, h)) => h
                .strip_prefix("# pairs=")
                .and_then(|n| n.trim().parse().ok())
                .ok_or_else(|| perr(1, "expected `# pairs=<N>` header"))?,
            None => return Err(perr(1, "empty relation file")),
        };
        let mut pairs = Vec::with_capacity(declared);
        for (idx, line) in lines {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (l, r) = line
                .split_once('\t')
                .ok_or_else(|| perr(idx + 1, "expected `<left>\\t<right>`"))?;
            let w = *lmap.get(l).ok_or_else(|| perr(idx + 1, format!("unknown left state `{l}`")))?;
            let wp = *rmap.get(r).ok_or_else(|| perr(idx + 1, format!("unknown right state `{r}`")))?;
            pairs.push((w, wp));
        }
        if pairs.len() != declared {
            return Err(perr(1, format!("header declares {declared} pairs, found {}", pairs.len())));
        }
        SimRelation::new(left.len(), right.len(), pairs)
    }
}

pub fn index_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}
