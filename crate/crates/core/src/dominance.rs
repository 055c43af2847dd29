//! Binary and continuous dominance, and the `better` vote that decides
//! which half of a split survives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Candidate, Direction, ObjectiveSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominanceVerdict {
    LeftBetter,
    RightBetter,
    Neither,
}

impl DominanceVerdict {
    pub fn flip(self) -> Self {
        match self {
            DominanceVerdict::LeftBetter => DominanceVerdict::RightBetter,
            DominanceVerdict::RightBetter => DominanceVerdict::LeftBetter,
            DominanceVerdict::Neither => DominanceVerdict::Neither,
        }
    }
}

/// Which pairwise test `better` uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    #[default]
    Binary,
    /// Exponential-loss comparison; needs calibrated objective bounds.
    Continuous,
}

fn check_pair(x: &[f64], y: &[f64], spec: &ObjectiveSpec) -> Result<()> {
    spec.check_len(x)?;
    spec.check_len(y)
}

/// Pareto dominance for vectors already oriented as minimize.
pub fn dominates_min(x: &[f64], y: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in x.iter().zip(y) {
        if a > b {
            return false;
        }
        if a < b {
            strict = true;
        }
    }
    strict
}

/// True iff `x` is no worse than `y` everywhere and strictly better somewhere.
pub fn binary_dominates(x: &[f64], y: &[f64], spec: &ObjectiveSpec) -> Result<bool> {
    check_pair(x, y, spec)?;
    let mut strict = false;
    for ((a, b), obj) in x.iter().zip(y).zip(spec.objectives()) {
        let (a, b) = match obj.direction {
            Direction::Minimize => (*a, *b),
            Direction::Maximize => (-*a, -*b),
        };
        if a > b {
            return Ok(false);
        }
        if a < b {
            strict = true;
        }
    }
    Ok(strict)
}

/// `loss(x, y) = Σ_j −exp(w_j (x_j − y_j) / n) / n` over objectives scaled to
/// `[0, 1]` by the spec's bounds. Smaller loss is better for `x`.
pub fn cdom_loss(x: &[f64], y: &[f64], spec: &ObjectiveSpec) -> Result<f64> {
    check_pair(x, y, spec)?;
    let xs = spec.scale(x)?;
    let ys = spec.scale(y)?;
    Ok(loss_scaled(&xs, &ys, spec))
}

fn loss_scaled(x: &[f64], y: &[f64], spec: &ObjectiveSpec) -> f64 {
    let n = x.len() as f64;
    x.iter()
        .zip(y)
        .zip(spec.objectives())
        .map(|((a, b), obj)| -(obj.weight() * (a - b) / n).exp() / n)
        .sum()
}

/// Continuous dominance: `x` wins iff `loss(y, x) > loss(x, y)`.
pub fn cdominates(x: &[f64], y: &[f64], spec: &ObjectiveSpec) -> Result<bool> {
    check_pair(x, y, spec)?;
    let xs = spec.scale(x)?;
    let ys = spec.scale(y)?;
    Ok(loss_scaled(&ys, &xs, spec) > loss_scaled(&xs, &ys, spec))
}

/// Majority vote over paired representatives using binary dominance.
pub fn better(
    west: &[Candidate],
    east: &[Candidate],
    spec: &ObjectiveSpec,
) -> Result<DominanceVerdict> {
    better_with(west, east, spec, Comparator::Binary)
}

/// Pairs `west[i]` with `east[i]`; whichever side wins strictly more pairs is better.
pub fn better_with(
    west: &[Candidate],
    east: &[Candidate],
    spec: &ObjectiveSpec,
    comparator: Comparator,
) -> Result<DominanceVerdict> {
    if west.len() != east.len() {
        return Err(Error::structural(format!(
            "representative lists differ in length ({} vs {})",
            west.len(),
            east.len()
        )));
    }
    let dom = |a: &[f64], b: &[f64]| match comparator {
        Comparator::Binary => binary_dominates(a, b, spec),
        Comparator::Continuous => cdominates(a, b, spec),
    };
    let (mut west_wins, mut east_wins) = (0usize, 0usize);
    for (w, e) in west.iter().zip(east) {
        let wo = w.require_objectives()?;
        let eo = e.require_objectives()?;
        if dom(eo, wo)? {
            east_wins += 1;
        } else if dom(wo, eo)? {
            west_wins += 1;
        }
    }
    Ok(match east_wins.cmp(&west_wins) {
        std::cmp::Ordering::Greater => DominanceVerdict::RightBetter,
        std::cmp::Ordering::Less => DominanceVerdict::LeftBetter,
        std::cmp::Ordering::Equal => DominanceVerdict::Neither,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Decisions, Objective};

    fn min2() -> ObjectiveSpec {
        ObjectiveSpec::new(vec![Objective::minimize("a"), Objective::minimize("b")])
    }

    fn cand(id: usize, o: &[f64]) -> Candidate {
        Candidate::evaluated(id, Decisions::Real(vec![0.0]), o.to_vec())
    }

    #[test]
    fn binary_examples() {
        let s = min2();
        assert!(binary_dominates(&[1.0, 2.0], &[2.0, 3.0], &s).unwrap());
        assert!(!binary_dominates(&[1.0, 2.0], &[1.0, 2.0], &s).unwrap());
        assert!(!binary_dominates(&[1.0, 3.0], &[2.0, 2.0], &s).unwrap());
        assert!(!binary_dominates(&[2.0, 2.0], &[1.0, 3.0], &s).unwrap());
        assert!(binary_dominates(&[1.0], &[2.0], &s).is_err());
    }

    #[test]
    fn maximize_flips_direction() {
        let s = ObjectiveSpec::new(vec![Objective::maximize("a"), Objective::minimize("b")]);
        assert!(binary_dominates(&[3.0, 1.0], &[2.0, 1.0], &s).unwrap());
        assert!(!binary_dominates(&[2.0, 1.0], &[3.0, 1.0], &s).unwrap());
    }

    #[test]
    fn cdom_equal_points() {
        let mut s = min2();
        s.set_bounds(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let l = cdom_loss(&[0.3, 0.3], &[0.3, 0.3], &s).unwrap();
        assert!((l + 1.0).abs() < 1e-12);
        assert!(!cdominates(&[0.3, 0.3], &[0.3, 0.3], &s).unwrap());
    }

    #[test]
    fn cdom_single_maximize() {
        let mut s = ObjectiveSpec::new(vec![Objective::maximize("a")]);
        s.set_bounds(&[(0.0, 1.0)]).unwrap();
        let xy = cdom_loss(&[1.0], &[0.0], &s).unwrap();
        let yx = cdom_loss(&[0.0], &[1.0], &s).unwrap();
        assert!((xy + std::f64::consts::E).abs() < 1e-12);
        assert!((yx + (-1.0f64).exp()).abs() < 1e-12);
        assert!(cdominates(&[1.0], &[0.0], &s).unwrap());
    }

    #[test]
    fn cdom_needs_bounds() {
        assert!(matches!(
            cdom_loss(&[0.0, 0.0], &[1.0, 1.0], &min2()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn better_votes() {
        let s = min2();
        let w = [cand(0, &[2.0, 2.0])];
        let e = [cand(1, &[1.0, 1.0])];
        assert_eq!(better(&w, &e, &s).unwrap(), DominanceVerdict::RightBetter);
        assert_eq!(better(&e, &w, &s).unwrap(), DominanceVerdict::LeftBetter);

        let w = [
            cand(0, &[2.0, 2.0]),
            cand(1, &[2.0, 2.0]),
            cand(2, &[0.0, 0.0]),
        ];
        let e = [
            cand(3, &[1.0, 1.0]),
            cand(4, &[1.0, 1.0]),
            cand(5, &[1.0, 1.0]),
        ];
        assert_eq!(better(&w, &e, &s).unwrap(), DominanceVerdict::RightBetter);

        let w = [cand(0, &[2.0, 2.0]), cand(1, &[0.0, 0.0])];
        let e = [cand(2, &[1.0, 1.0]), cand(3, &[1.0, 1.0])];
        assert_eq!(better(&w, &e, &s).unwrap(), DominanceVerdict::Neither);

        let w = [cand(0, &[1.0, 2.0])];
        let e = [cand(1, &[2.0, 1.0])];
        assert_eq!(better(&w, &e, &s).unwrap(), DominanceVerdict::Neither);
    }

    #[test]
    fn better_rejects_unevaluated() {
        let w = [Candidate::new(7, Decisions::Real(vec![0.0]))];
        let e = [cand(1, &[1.0, 1.0])];
        assert!(matches!(
            better(&w, &e, &min2()),
            Err(Error::Unevaluated(7))
        ));
    }
}
