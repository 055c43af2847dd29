use std::collections::BTreeSet;

use proptest::prelude::*;
use sway_core::models::spl::{spl_valid, SplModel, BUILTIN_MODELS};
use sway_core::satgen::{parse_dimacs, random_validity_rate, sample_valid, to_dimacs, Cnf};
use sway_core::Error;

fn enumerate(cnf: &Cnf) -> BTreeSet<Vec<bool>> {
    (0u32..1 << cnf.variable_count)
        .map(|m| {
            (0..cnf.variable_count)
                .map(|i| m >> i & 1 == 1)
                .collect::<Vec<bool>>()
        })
        .filter(|b| cnf.satisfied_by(b).unwrap())
        .collect()
}

#[test]
fn samples_are_valid_on_every_shipped_model() {
    for (name, _) in BUILTIN_MODELS {
        let m = SplModel::builtin(name, 0).unwrap();
        let samples = sample_valid(m.cnf(), 10_000, 3).unwrap();
        assert_eq!(samples.len(), 10_000);
        assert!(
            samples.iter().all(|a| spl_valid(&a.bits, m.cnf())),
            "{name}"
        );
    }
}

#[test]
fn mobile_phone_support_is_every_product() {
    let m = SplModel::builtin("mobile_phone", 0).unwrap();
    let products = enumerate(m.cnf());
    assert_eq!(products.len(), 15);
    let seen: BTreeSet<Vec<bool>> = (0..1000)
        .map(|s| sample_valid(m.cnf(), 1, s).unwrap().remove(0).bits)
        .collect();
    assert_eq!(seen, products);
}

#[test]
fn random_assignments_rarely_satisfy_constrained_models() {
    for name in ["spl49", "spl330", "spl1638"] {
        let m = SplModel::builtin(name, 0).unwrap();
        assert!(random_validity_rate(m.cnf(), 20_000, 1) < 0.01, "{name}");
    }
}

#[test]
fn unsatisfiable_formulas_are_reported() {
    let cnf = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
    assert!(matches!(
        sample_valid(&cnf, 1, 0),
        Err(Error::Unsatisfiable)
    ));
}

#[test]
fn malformed_dimacs_is_rejected() {
    assert!(parse_dimacs("p cnf 2 1\n1 3 0\n").is_err());
    assert!(parse_dimacs("1 2 0\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn samples_of_random_satisfiable_formulas_are_valid(
        clauses in prop::collection::vec(prop::collection::vec((1i32..=8, any::<bool>()), 1..4), 1..20),
        s in any::<u64>(),
    ) {
        let clauses: Vec<Vec<i32>> = clauses.into_iter().map(|c| c.into_iter().map(|(v, neg)| if neg { -v } else { v }).collect()).collect();
        let cnf = Cnf::new(8, clauses).unwrap();
        let all = enumerate(&cnf);
        match sample_valid(&cnf, 5, s) {
            Ok(got) => {
                prop_assert!(!all.is_empty());
                for a in got {
                    prop_assert!(all.contains(&a.bits));
                }
            }
            Err(Error::Unsatisfiable) => prop_assert!(all.is_empty()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
        prop_assert_eq!(parse_dimacs(&to_dimacs(&cnf)).unwrap().clauses, cnf.clauses);
    }
}
