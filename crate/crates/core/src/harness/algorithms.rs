//! The comparators run on a shared pool: exhaustive GroundTruth, RAND and
//! SWAY itself.

use std::time::{Duration, Instant};

use rand::seq::index;

use crate::error::{Error, Result};
use crate::metrics::nondominated_filter;
use crate::problem::{evaluate, Candidate, EvaluationLedger, ProblemModel};
use crate::seed;
use crate::sway::{sway_with_stats, SwayConfig, SwayStats};

/// Evaluates every pool member; returns the non-dominated ones.
pub fn run_ground_truth(
    pool: &[Candidate],
    model: &dyn ProblemModel,
    ledger: &EvaluationLedger,
) -> Result<Vec<Candidate>> {
    let mut all = pool.to_vec();
    for c in all.iter_mut() {
        evaluate(model, c, ledger)?;
    }
    nondominated_filter(&all, model.objective_spec())
}

/// Evaluates `n` distinct pool members drawn uniformly; returns the
/// evaluated sample (not filtered).
pub fn rand_sample(
    pool: &[Candidate],
    model: &dyn ProblemModel,
    n: usize,
    ledger: &EvaluationLedger,
    seed: u64,
) -> Result<Vec<Candidate>> {
    if pool.is_empty() {
        return Err(Error::config("RAND needs a non-empty pool"));
    }
    let n = if n > pool.len() {
        log::warn!(
            "RAND size {n} exceeds the pool ({}); using the whole pool",
            pool.len()
        );
        pool.len()
    } else {
        n.max(1)
    };
    let mut picks = index::sample(&mut seed::rng(seed), pool.len(), n).into_vec();
    picks.sort_unstable();
    let mut out: Vec<Candidate> = picks.into_iter().map(|i| pool[i].clone()).collect();
    for c in out.iter_mut() {
        evaluate(model, c, ledger)?;
    }
    Ok(out)
}

/// RAND's front: the non-dominated members of [`rand_sample`].
pub fn run_rand(
    pool: &[Candidate],
    model: &dyn ProblemModel,
    n: usize,
    ledger: &EvaluationLedger,
    seed: u64,
) -> Result<Vec<Candidate>> {
    let sample = rand_sample(pool, model, n, ledger, seed)?;
    nondominated_filter(&sample, model.objective_spec())
}

#[derive(Clone, Debug)]
pub struct SwayRun {
    /// Every candidate SWAY kept, evaluated for reporting.
    pub output: Vec<Candidate>,
    /// Evaluations SWAY itself spent; reporting evaluations are not included.
    pub evaluations: u64,
    pub runtime: Duration,
    pub stats: SwayStats,
}

/// Runs SWAY on a copy of the pool, then evaluates its survivors on a
/// separate ledger so indicators can be computed.
pub fn run_sway(pool: &[Candidate], model: &dyn ProblemModel, cfg: &SwayConfig) -> Result<SwayRun> {
    let ledger = EvaluationLedger::new();
    let start = Instant::now();
    let (mut output, stats) = sway_with_stats(pool.to_vec(), model, cfg, &ledger)?;
    let runtime = start.elapsed();
    let reporting = EvaluationLedger::new();
    for c in output.iter_mut() {
        evaluate(model, c, &reporting)?;
    }
    Ok(SwayRun {
        output,
        evaluations: ledger.evaluations(),
        runtime,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::load_builtin;
    use crate::problem::pool_from;

    #[test]
    fn rand_is_deterministic_and_charges_n() {
        let model = load_builtin("osp2", 0).unwrap();
        let pool = pool_from(model.generate(200, 1).unwrap());
        let l1 = EvaluationLedger::new();
        let a = rand_sample(&pool, model.as_ref(), 50, &l1, 9).unwrap();
        let b = rand_sample(&pool, model.as_ref(), 50, &EvaluationLedger::new(), 9).unwrap();
        assert_eq!(l1.evaluations(), 50);
        let ids = |v: &[Candidate]| v.iter().map(|c| c.id).collect::<Vec<_>>();
        assert_eq!(ids(&a), ids(&b));
    }

    #[test]
    fn rand_over_whole_pool_matches_ground_truth() {
        let model = load_builtin("ground", 0).unwrap();
        let pool = pool_from(model.generate(120, 2).unwrap());
        let l = EvaluationLedger::new();
        let r = run_rand(&pool, model.as_ref(), 500, &l, 1).unwrap();
        assert_eq!(l.evaluations(), 120);
        let g = run_ground_truth(&pool, model.as_ref(), &EvaluationLedger::new()).unwrap();
        let ids = |v: &[Candidate]| v.iter().map(|c| c.id).collect::<Vec<_>>();
        assert_eq!(ids(&r), ids(&g));
    }

    #[test]
    fn single_rand_member() {
        let model = load_builtin("pom3b", 0).unwrap();
        let pool = pool_from(model.generate(30, 2).unwrap());
        let l = EvaluationLedger::new();
        assert_eq!(run_rand(&pool, model.as_ref(), 1, &l, 4).unwrap().len(), 1);
        assert_eq!(l.evaluations(), 1);
    }
}
