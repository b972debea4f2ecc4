//! Seeded random systems.
//!
//! Draws come from ChaCha8 seeded with `seed`, split into independent word
//! streams: stream 0 shapes the transition structure, stream 1 the labels and
//! stream 2 the fair set. Changing `fair_density` therefore never changes
//! the structure or labels of a system.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::systems::{Ats, FairAts, FairTs, Ts};

const STREAM_STRUCTURE: u64 = 0;
const STREAM_LABELS: u64 = 1;
const STREAM_FAIR: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub n_states: usize,
    pub n_actions1: usize,
    pub n_actions2: usize,
    pub n_obs: usize,
    pub fair_density: f64,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(n_states: usize, n_actions1: usize, n_actions2: usize, n_obs: usize, seed: u64) -> Self {
        RandomSpec { n_states, n_actions1, n_actions2, n_obs, fair_density: 0.5, seed }
    }

    pub fn with_fair_density(mut self, d: f64) -> Self {
        self.fair_density = d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        for (name, v) in [
            ("n_states", self.n_states),
            ("n_actions1", self.n_actions1),
            ("n_actions2", self.n_actions2),
            ("n_obs", self.n_obs),
        ] {
            if v == 0 {
                errs.push(format!("{name} must be at least 1"));
            }
        }
        if self.n_actions1 > 63 || self.n_actions2 > 63 {
            errs.push("at most 63 actions per agent".into());
        }
        if !(0.0..=1.0).contains(&self.fair_density) {
            errs.push("fair_density must lie in [0, 1]".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errs))
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

/// Names `o0..`, `s0..`, `a0..`, `b0..`.
pub fn obs_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("o{i}")).collect()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Uniform non-empty subset of `0..k`, ascending.
fn nonempty_subset(rng: &mut ChaCha8Rng, k: usize) -> Vec<usize> {
    let mask: u64 = rng.gen_range(1..(1u64 << k));
    (0..k).filter(|i| mask >> i & 1 == 1).collect()
}

fn labels(spec: &RandomSpec) -> Vec<usize> {
    let mut rng = spec.rng(STREAM_LABELS);
    (0..spec.n_states).map(|_| rng.gen_range(0..spec.n_obs)).collect()
}

fn fair_set(spec: &RandomSpec) -> Vec<usize> {
    let mut rng = spec.rng(STREAM_FAIR);
    (0..spec.n_states).filter(|_| rng.gen_bool(spec.fair_density)).collect()
}

/// Uniform enabled-action subsets, uniform transition targets, uniform
/// labels and a Bernoulli(`fair_density`) fair set.
pub fn random_fair_ats(spec: &RandomSpec) -> Result<FairAts> {
    spec.validate()?;
    let n = spec.n_states;
    let mut ats = Ats::with_shape(
        obs_names(spec.n_obs),
        names("s", n),
        names("a", spec.n_actions1),
        names("b", spec.n_actions2),
    );
    let mut rng = spec.rng(STREAM_STRUCTURE);
    for w in 0..n {
        ats.enabled1[w] = nonempty_subset(&mut rng, spec.n_actions1);
        ats.enabled2[w] = nonempty_subset(&mut rng, spec.n_actions2);
    }
    for w in 0..n {
        for a in ats.enabled1[w].clone() {
            for b in ats.enabled2[w].clone() {
                let t = rng.gen_range(0..n);
                ats.set_delta(w, a, b, Some(t));
            }
        }
    }
    ats.label = labels(spec);
    Ok(FairAts { ats, fair: fair_set(spec) })
}

pub fn random_ats(spec: &RandomSpec) -> Result<Ats> {
    random_fair_ats(spec).map(|f| f.ats)
}

/// Random fair TS: each state gets a uniform non-empty set of successors of
/// size at most `n_actions1`.
pub fn random_fair_ts(spec: &RandomSpec) -> Result<FairTs> {
    spec.validate()?;
    let n = spec.n_states;
    let mut rng = spec.rng(STREAM_STRUCTURE);
    let max_deg = spec.n_actions1.min(n);
    let mut succ = Vec::with_capacity(n);
    for _ in 0..n {
        let deg = rng.gen_range(1..=max_deg);
        let mut s = rand::seq::index::sample(&mut rng, n, deg).into_vec();
        s.sort_unstable();
        succ.push(s);
    }
    let ts = Ts { obs: obs_names(spec.n_obs), states: names("s", n), init: 0, label: labels(spec), succ };
    Ok(FairTs { ts, fair: fair_set(spec) })
}

pub fn random_ts(spec: &RandomSpec) -> Result<Ts> {
    random_fair_ts(spec).map(|f| f.ts)
}

/// A fresh per-instance seed derived from a base seed and an index.
pub fn derive_seed(base: u64, i: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base.wrapping_add(i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
