//! Batch cross-checking of the three alternating-simulation routes.
//!
//! Each instance is a pair of random systems; all routes run on it and their
//! relations must coincide. Instances are independent, so a batch maps over
//! them with an [`Exec`] policy and reports in input order.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::random::{random_ats, RandomSpec};
use crate::relations::{altsim_basic, altsim_game_detail, altsim_iterative, IterOptions, IterStats};

#[derive(Debug, Clone)]
pub struct InstanceReport {
    pub left: RandomSpec,
    pub right: RandomSpec,
    pub pairs: usize,
    pub time_basic: Duration,
    pub time_game: Duration,
    pub time_iterative: Duration,
    pub game_vertices: usize,
    pub game_edges: usize,
    pub game_cells: usize,
    pub iter: IterStats,
}

/// Runs every route on one instance; disagreement is an error naming both seeds.
pub fn run_instance(left: RandomSpec, right: RandomSpec, opts: IterOptions) -> Result<InstanceReport> {
    let k = random_ats(&left)?;
    let kp = random_ats(&right)?;

    let t = Instant::now();
    let basic = altsim_basic(&k, &kp)?;
    let time_basic = t.elapsed();

    let t = Instant::now();
    let (game, _, report) = altsim_game_detail(&k, &kp)?;
    let time_game = t.elapsed();

    let t = Instant::now();
    let (iterative, iter) = altsim_iterative(&k, &kp, opts)?;
    let time_iterative = t.elapsed();

    if basic != game || basic != iterative {
        return Err(Error::Invariant(format!(
            "routes disagree on seeds {} / {}: basic={} game={} iterative={}",
            left.seed,
            right.seed,
            basic.len(),
            game.len(),
            iterative.len()
        )));
    }
    let violations = iter.ceiling_violations();
    if !violations.is_empty() {
        return Err(Error::Invariant(format!(
            "loop ceilings exceeded on seeds {} / {}: {violations:?}",
            left.seed, right.seed
        )));
    }
    Ok(InstanceReport {
        left,
        right,
        pairs: basic.len(),
        time_basic,
        time_game,
        time_iterative,
        game_vertices: report.vertices,
        game_edges: report.edges,
        game_cells: report.cells,
        iter,
    })
}

pub fn run_batch(
    instances: &[(RandomSpec, RandomSpec)],
    opts: IterOptions,
    exec: Exec,
) -> Vec<Result<InstanceReport>> {
    exec.map(instances, |&(l, r)| run_instance(l, r, opts))
}

/// Header of [`report_row`].
pub const REPORT_HEADER: &str = "n\tn_right\ta1\ta2\tseed_left\tseed_right\tpairs\tbasic_us\tgame_us\titerative_us\tgame_V\tgame_E\tgame_cells\titer_peak_cells\twhile\twhile_max\tsucc_pairs\tsucc_pairs_max\tstr_pairs\tstr_pairs_max";

/// One tab-separated report line.
pub fn report_row(r: &InstanceReport) -> String {
    let it = &r.iter;
    let c = &it.ceilings;
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        r.left.n_states,
        r.right.n_states,
        r.left.n_actions1,
        r.left.n_actions2,
        r.left.seed,
        r.right.seed,
        r.pairs,
        r.time_basic.as_micros(),
        r.time_game.as_micros(),
        r.time_iterative.as_micros(),
        r.game_vertices,
        r.game_edges,
        r.game_cells,
        it.peak_cells,
        it.while_iterations,
        c.while_iterations,
        it.succ_pairs,
        c.succ_pairs,
        it.str_pairs,
        c.str_pairs,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_instance_agrees() {
        let s = RandomSpec::new(1, 1, 1, 1, 3);
        let r = run_instance(s, s, IterOptions { assert_invariants: true }).unwrap();
        assert_eq!(r.pairs, 1);
        assert!(r.iter.ceiling_violations().is_empty());
        assert_eq!(report_row(&r).split('\t').count(), REPORT_HEADER.split('\t').count());
    }

    #[test]
    fn batch_order_and_policy_independent() {
        let inst: Vec<_> = (0..20)
            .map(|i| (RandomSpec::new(4, 2, 2, 2, i), RandomSpec::new(4, 2, 3, 2, 100 + i)))
            .collect();
        let seq: Vec<_> = run_batch(&inst, IterOptions::default(), Exec::Sequential)
            .into_iter()
            .map(|r| r.unwrap().pairs)
            .collect();
        let par: Vec<_> = run_batch(&inst, IterOptions::default(), Exec::Parallel)
            .into_iter()
            .map(|r| r.unwrap().pairs)
            .collect();
        assert_eq!(seq, par);
    }
}
