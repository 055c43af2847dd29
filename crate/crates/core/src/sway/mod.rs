//! Recursive cluster-and-prune sampling.
//!
//! The pool is split by decisions alone; only the representatives of each
//! split are evaluated, and the half whose representatives lose the
//! dominance vote is discarded.

mod binary;
mod continuous;

pub use binary::{
    annulus_of, jaccard_distance, radial_coordinates, split_binary, RadialCoordinate,
};
pub use continuous::{euclidean_distance, split_continuous};

use serde::{Deserialize, Serialize};

use crate::dominance::{better_with, Comparator, DominanceVerdict};
use crate::error::Result;
use crate::problem::{
    evaluate, normalize_decisions, Candidate, EvaluationLedger, ProblemModel, SpaceKind,
};
use crate::seed::{self, SwayRng};

/// Indices into the split's input list.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitResult {
    pub west_reps: Vec<usize>,
    pub east_reps: Vec<usize>,
    pub west_items: Vec<usize>,
    pub east_items: Vec<usize>,
    /// Per input item: projection onto the west-east axis (continuous) or angle θ (binary).
    pub keys: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SplitOutcome {
    Split(SplitResult),
    /// Nothing separates the items; the cluster is kept whole.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwayConfig {
    /// Clusters smaller than this stop splitting. `None` means `⌈√N⌉`.
    pub enough: Option<usize>,
    pub total_group: usize,
    pub seed: u64,
    pub comparator: Comparator,
}

impl Default for SwayConfig {
    fn default() -> Self {
        Self {
            enough: None,
            total_group: 10,
            seed: 0,
            comparator: Comparator::Binary,
        }
    }
}

impl SwayConfig {
    pub fn enough_for(&self, pool_size: usize) -> usize {
        self.enough
            .unwrap_or_else(|| (pool_size as f64).sqrt().ceil() as usize)
            .max(1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwayStats {
    pub splits: usize,
    pub degenerate: usize,
    pub ties: usize,
    pub max_depth: usize,
}

enum Points {
    Real(Vec<Vec<f64>>),
    Bits,
}

struct Run<'a> {
    pool: Vec<Candidate>,
    points: Points,
    model: &'a dyn ProblemModel,
    ledger: &'a EvaluationLedger,
    cfg: &'a SwayConfig,
    enough: usize,
    rng: SwayRng,
    stats: SwayStats,
}

impl Run<'_> {
    fn split(&mut self, idx: &[usize]) -> Result<SplitOutcome> {
        match &self.points {
            Points::Real(all) => {
                let pts: Vec<&[f64]> = idx.iter().map(|&i| all[i].as_slice()).collect();
                continuous::split_points(&pts, &mut self.rng)
            }
            Points::Bits => {
                let bits: Vec<&[bool]> = idx
                    .iter()
                    .map(|&i| self.pool[i].decisions().as_bits().unwrap_or(&[]))
                    .collect();
                binary::split_bits(&bits, self.cfg.total_group, &mut self.rng)
            }
        }
    }

    fn recurse(&mut self, idx: Vec<usize>, depth: usize) -> Result<Vec<usize>> {
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if idx.len() < self.enough || idx.len() < 4 {
            return Ok(idx);
        }
        let split = match self.split(&idx)? {
            SplitOutcome::Split(s) => s,
            SplitOutcome::Degenerate => {
                self.stats.degenerate += 1;
                return Ok(idx);
            }
        };
        self.stats.splits += 1;

        let global = |local: &[usize]| local.iter().map(|&i| idx[i]).collect::<Vec<_>>();
        let west_reps = global(&split.west_reps);
        let east_reps = global(&split.east_reps);
        for &i in west_reps.iter().chain(&east_reps) {
            evaluate(self.model, &mut self.pool[i], self.ledger)?;
        }
        let west: Vec<Candidate> = west_reps.iter().map(|&i| self.pool[i].clone()).collect();
        let east: Vec<Candidate> = east_reps.iter().map(|&i| self.pool[i].clone()).collect();
        let verdict = better_with(
            &west,
            &east,
            self.model.objective_spec(),
            self.cfg.comparator,
        )?;

        let west_items = global(&split.west_items);
        let east_items = global(&split.east_items);
        match verdict {
            DominanceVerdict::LeftBetter => self.recurse(west_items, depth + 1),
            DominanceVerdict::RightBetter => self.recurse(east_items, depth + 1),
            DominanceVerdict::Neither => {
                self.stats.ties += 1;
                let mut out = self.recurse(east_items, depth + 1)?;
                out.extend(self.recurse(west_items, depth + 1)?);
                Ok(out)
            }
        }
    }
}

/// Runs the sampler over `items` and returns the surviving subset.
/// Representatives come back with their objectives populated.
pub fn sway(
    items: Vec<Candidate>,
    model: &dyn ProblemModel,
    cfg: &SwayConfig,
    ledger: &EvaluationLedger,
) -> Result<Vec<Candidate>> {
    sway_with_stats(items, model, cfg, ledger).map(|(out, _)| out)
}

pub fn sway_with_stats(
    items: Vec<Candidate>,
    model: &dyn ProblemModel,
    cfg: &SwayConfig,
    ledger: &EvaluationLedger,
) -> Result<(Vec<Candidate>, SwayStats)> {
    let space = model.decision_space();
    let points = match space.kind() {
        SpaceKind::Continuous => Points::Real(
            items
                .iter()
                .map(|c| normalize_decisions(c, space))
                .collect::<Result<_>>()?,
        ),
        SpaceKind::Binary => {
            for c in &items {
                space.conforms(c.decisions())?;
            }
            Points::Bits
        }
    };
    let mut run = Run {
        enough: cfg.enough_for(items.len()),
        pool: items,
        points,
        model,
        ledger,
        cfg,
        rng: seed::rng(cfg.seed),
        stats: SwayStats::default(),
    };
    let all: Vec<usize> = (0..run.pool.len()).collect();
    let keep = run.recurse(all, 0)?;
    let mut pool: Vec<Option<Candidate>> = run.pool.into_iter().map(Some).collect();
    let out = keep
        .into_iter()
        .map(|i| pool[i].take().expect("sway keeps each item at most once"))
        .collect();
    Ok((out, run.stats))
}
