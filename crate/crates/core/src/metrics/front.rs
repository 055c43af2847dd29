use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dominance::{binary_dominates, dominates_min};
use crate::error::{Error, Result};
use crate::problem::{Candidate, ObjectiveSpec};

/// Objective vectors oriented as minimize, usually normalized to `[0, 1]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub points: Vec<Vec<f64>>,
}

impl Front {
    /// Wraps points without filtering.
    pub fn new(points: Vec<Vec<f64>>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dims(&self) -> Option<usize> {
        self.points.first().map(Vec::len)
    }

    /// Normalized, filtered front of evaluated candidates.
    pub fn from_candidates(cands: &[Candidate], spec: &ObjectiveSpec) -> Result<Self> {
        Ok(nondominated_points(normalize_objectives(cands, spec)?))
    }
}

/// Rescales every candidate's objectives to `[0, 1]`, minimize orientation.
pub fn normalize_objectives(cands: &[Candidate], spec: &ObjectiveSpec) -> Result<Vec<Vec<f64>>> {
    cands
        .iter()
        .map(|c| spec.normalize(c.require_objectives()?))
        .collect()
}

fn by_sum_then_lex(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| {
        a.1.iter()
            .zip(&b.1)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Non-dominated subset of minimize-oriented points, duplicates collapsed.
///
/// Points are visited in (sum, lexicographic) order, a linear extension of
/// dominance, so each point only needs checking against the archive built so far.
pub fn nondominated_points(points: Vec<Vec<f64>>) -> Front {
    let mut keyed: Vec<(f64, Vec<f64>)> = points
        .into_iter()
        .map(|p| (p.iter().sum::<f64>(), p))
        .collect();
    keyed.sort_by(by_sum_then_lex);
    let mut archive: Vec<Vec<f64>> = Vec::new();
    for (_, p) in keyed {
        if archive.iter().any(|q| *q == p || dominates_min(q, &p)) {
            continue;
        }
        archive.push(p);
    }
    Front::new(archive)
}

/// Members of `pop` not dominated by any other member, in raw objective units.
/// Candidates with identical objectives are collapsed to the first one.
pub fn nondominated_filter(pop: &[Candidate], spec: &ObjectiveSpec) -> Result<Vec<Candidate>> {
    let oriented: Vec<Vec<f64>> = pop
        .iter()
        .map(|c| {
            let o = c.require_objectives()?;
            spec.check_len(o)?;
            Ok(o.iter()
                .zip(spec.objectives())
                .map(|(v, obj)| obj.direction.to_minimize(*v))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..pop.len()).collect();
    let sums: Vec<f64> = oriented.iter().map(|p| p.iter().sum()).collect();
    order.sort_by(|&i, &j| {
        by_sum_then_lex(
            &(sums[i], oriented[i].clone()),
            &(sums[j], oriented[j].clone()),
        )
        .then(i.cmp(&j))
    });
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if kept
            .iter()
            .any(|&k| oriented[k] == oriented[i] || dominates_min(&oriented[k], &oriented[i]))
        {
            continue;
        }
        kept.push(i);
    }
    kept.sort_unstable();
    Ok(kept.into_iter().map(|i| pop[i].clone()).collect())
}

/// Union of every front, filtered.
pub fn reference_front(fronts: &[Front]) -> Front {
    nondominated_points(
        fronts
            .iter()
            .flat_map(|f| f.points.iter().cloned())
            .collect(),
    )
}

/// True iff no member of `front` dominates another under `spec`.
pub fn is_mutually_nondominated(pop: &[Candidate], spec: &ObjectiveSpec) -> Result<bool> {
    for a in pop {
        for b in pop {
            if binary_dominates(a.require_objectives()?, b.require_objectives()?, spec)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub(crate) fn check_unit(front: &Front, m: usize) -> Result<()> {
    for p in &front.points {
        if p.len() != m {
            return Err(Error::structural(format!(
                "front point has {} objectives, expected {m}",
                p.len()
            )));
        }
        if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Normalization(format!(
                "front point {p:?} lies outside the unit cube"
            )));
        }
    }
    Ok(())
}
