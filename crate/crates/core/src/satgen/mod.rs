//! DIMACS ingestion and diverse valid-assignment sampling.

mod dimacs;
mod dpll;
mod external;

pub use dimacs::{parse_dimacs, to_dimacs, Assignment, Cnf};
pub use dpll::Dpll;
pub use external::ExternalSolver;

use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

/// Attempts per requested sample before a duplicate is accepted.
pub const DUPLICATE_RETRIES: usize = 50;

/// `count` satisfying assignments. Attempt `k` solves with seed
/// `split(seed, k)`; duplicates are redrawn up to [`DUPLICATE_RETRIES`] times.
pub fn sample_valid(cnf: &Cnf, count: usize, seed: u64) -> Result<Vec<Assignment>> {
    if count == 0 {
        return Err(Error::config("sample count must be at least 1"));
    }
    let mut solver = Dpll::new(cnf);
    let mut seen: HashSet<Vec<bool>> = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    let mut attempt = 0u64;
    let mut duplicates_accepted = 0usize;
    while out.len() < count {
        let mut tries = 0;
        loop {
            let mut rng = seed::rng(seed::split(seed, attempt));
            attempt += 1;
            let bits = solver.solve(&mut rng)?.ok_or(Error::Unsatisfiable)?;
            tries += 1;
            if seen.insert(bits.clone()) {
                out.push(Assignment::new(bits));
                break;
            }
            if tries >= DUPLICATE_RETRIES {
                duplicates_accepted += 1;
                out.push(Assignment::new(bits));
                break;
            }
        }
    }
    if duplicates_accepted > 0 {
        log::warn!(
            "accepted {duplicates_accepted} duplicate assignments after {DUPLICATE_RETRIES} retries each; \
             the formula has few distinct solutions"
        );
    }
    Ok(out)
}

/// Fraction of uniformly random assignments that satisfy every clause.
pub fn random_validity_rate(cnf: &Cnf, trials: usize, seed: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let mut rng = seed::rng(seed);
    let mut bits = vec![false; cnf.variable_count];
    let mut valid = 0usize;
    for _ in 0..trials {
        for b in bits.iter_mut() {
            *b = rng.gen_bool(0.5);
        }
        if cnf.clauses.iter().all(|c| Cnf::clause_satisfied(c, &bits)) {
            valid += 1;
        }
    }
    valid as f64 / trials as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_clause_forces_value() {
        let cnf = Cnf::new(3, vec![vec![1]]).unwrap();
        let s = sample_valid(&cnf, 3, 9).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|a| a.bits[0]));
    }

    #[test]
    fn exactly_one_of_two() {
        let cnf = Cnf::new(2, vec![vec![1, 2], vec![-1, -2]]).unwrap();
        let s = sample_valid(&cnf, 10, 1).unwrap();
        assert_eq!(s.len(), 10);
        for a in &s {
            assert!(a.bits == [true, false] || a.bits == [false, true]);
        }
        let distinct: HashSet<_> = s.iter().map(|a| a.bits.clone()).collect();
        assert_eq!(distinct.len(), 2);
    }

    #[test]
    fn unsat_is_an_error() {
        let cnf = Cnf::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert!(matches!(
            sample_valid(&cnf, 1, 0),
            Err(Error::Unsatisfiable)
        ));
    }

    #[test]
    fn deterministic_under_seed() {
        let cnf = Cnf::new(6, vec![vec![1, 2, -3], vec![-4, 5], vec![6, -1]]).unwrap();
        assert_eq!(
            sample_valid(&cnf, 20, 4).unwrap(),
            sample_valid(&cnf, 20, 4).unwrap()
        );
        assert_ne!(
            sample_valid(&cnf, 20, 4).unwrap(),
            sample_valid(&cnf, 20, 5).unwrap()
        );
    }

    #[test]
    fn validity_rate_examples() {
        let empty = Cnf::new(5, vec![]).unwrap();
        assert_eq!(random_validity_rate(&empty, 100, 0), 1.0);
        let unit = Cnf::new(1, vec![vec![1]]).unwrap();
        let trials = 20_000;
        let rate = random_validity_rate(&unit, trials, 3);
        let sigma = (0.25 / trials as f64).sqrt();
        assert!((rate - 0.5).abs() < 3.0 * sigma);
    }
}
