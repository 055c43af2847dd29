//! Software product-line configuration over a CNF feature model, with five
//! objectives: constraint violations, selected features, known defects,
//! total cost and selected features with prior use.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{DecisionSpace, Decisions, Objective, ObjectiveSpec, ProblemModel};
use crate::satgen::{parse_dimacs, sample_valid, Cnf};
use crate::seed;

/// Shipped feature models: `(name, DIMACS text)`.
pub const BUILTIN_MODELS: [(&str, &str); 4] = [
    (
        "mobile_phone",
        include_str!("../../data/spl/mobile_phone.dimacs"),
    ),
    ("spl49", include_str!("../../data/spl/spl49.dimacs")),
    ("spl330", include_str!("../../data/spl/spl330.dimacs")),
    ("spl1638", include_str!("../../data/spl/spl1638.dimacs")),
];

/// Synthetic models shipped under `data/spl`, sized after [`PUBLIC_MODEL_SIZES`]:
/// `(name, features, clauses, generator seed)`.
pub const SYNTHETIC_MODELS: [(&str, usize, usize, u64); 3] = [
    ("spl49", 49, 81, 49),
    ("spl330", 330, 506, 330),
    ("spl1638", 1638, 5228, 1638),
];

/// Sizes of the public feature models these benchmarks are modelled on:
/// `(name, features, constraints)`.
pub const PUBLIC_MODEL_SIZES: [(&str, usize, usize); 5] = [
    ("webportal", 49, 81),
    ("eshop", 330, 506),
    ("fiasco", 1638, 5228),
    ("freebsd", 1396, 62138),
    ("linux", 6888, 343944),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureAttributes {
    pub cost: Vec<f64>,
    pub defects: Vec<u32>,
    pub used_before: Vec<bool>,
}

impl FeatureAttributes {
    pub fn len(&self) -> usize {
        self.cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cost.is_empty()
    }
}

/// Cost ~ U[5, 15]; used before ~ Bernoulli(0.5); defects ~ U{0..10}, or
/// U{0..3} for features used before.
pub fn generate_attributes(feature_count: usize, model_seed: u64) -> FeatureAttributes {
    let mut rng = seed::rng(model_seed);
    let mut attrs = FeatureAttributes {
        cost: Vec::with_capacity(feature_count),
        defects: Vec::with_capacity(feature_count),
        used_before: Vec::with_capacity(feature_count),
    };
    for _ in 0..feature_count {
        let cost = rng.gen_range(5.0..=15.0);
        let used = rng.gen_bool(0.5);
        let defects = if used {
            rng.gen_range(0..=3)
        } else {
            rng.gen_range(0..=10)
        };
        attrs.cost.push(cost);
        attrs.used_before.push(used);
        attrs.defects.push(defects);
    }
    attrs
}

/// True iff every clause has a satisfied literal.
pub fn spl_valid(assignment: &[bool], cnf: &Cnf) -> bool {
    assignment.len() == cnf.variable_count
        && cnf
            .clauses
            .iter()
            .all(|c| Cnf::clause_satisfied(c, assignment))
}

#[derive(Clone, Debug)]
pub struct SplModel {
    name: String,
    cnf: Cnf,
    attrs: FeatureAttributes,
    space: DecisionSpace,
    spec: ObjectiveSpec,
}

impl SplModel {
    pub fn new(name: impl Into<String>, cnf: Cnf, attrs: FeatureAttributes) -> Result<Self> {
        let name = name.into();
        if attrs.len() != cnf.variable_count
            || attrs.defects.len() != attrs.len()
            || attrs.used_before.len() != attrs.len()
        {
            return Err(Error::model(format!(
                "{name}: attribute table covers {} features, model has {}",
                attrs.len(),
                cnf.variable_count
            )));
        }
        let names: Vec<String> = (0..cnf.variable_count).map(|v| cnf.name(v)).collect();
        // Feature names in the wild are not always unique; fall back to indices.
        let unique = {
            let mut seen = std::collections::HashSet::new();
            names.iter().all(|n| seen.insert(n.as_str()))
        };
        let names = if unique {
            names
        } else {
            (0..cnf.variable_count)
                .map(|v| format!("x{}", v + 1))
                .collect()
        };
        let space = DecisionSpace::binary(name.clone(), names)?;
        let spec = ObjectiveSpec::new(vec![
            Objective::minimize("violations"),
            Objective::maximize("features"),
            Objective::minimize("defects"),
            Objective::minimize("cost"),
            Objective::maximize("used_before"),
        ]);
        Ok(Self {
            name,
            cnf,
            attrs,
            space,
            spec,
        })
    }

    pub fn builtin(name: &str, model_seed: u64) -> Result<Self> {
        let (n, text) = BUILTIN_MODELS
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::model(format!("no built-in product-line model named {name}")))?;
        let cnf = parse_dimacs(text)?;
        let attrs = generate_attributes(cnf.variable_count, model_seed);
        Self::new(*n, cnf, attrs)
    }

    pub fn from_file(path: &Path, model_seed: u64) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        let cnf = parse_dimacs(&text)?;
        let attrs = generate_attributes(cnf.variable_count, model_seed);
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "spl".into());
        Self::new(name, cnf, attrs)
    }

    pub fn cnf(&self) -> &Cnf {
        &self.cnf
    }

    pub fn attributes(&self) -> &FeatureAttributes {
        &self.attrs
    }
}

/// Objective vector of a (possibly invalid) assignment.
pub fn spl_evaluate(assignment: &[bool], model: &SplModel) -> Result<Vec<f64>> {
    let violations = model.cnf.violations(assignment)?;
    let mut features = 0usize;
    let mut defects = 0u64;
    let mut cost = 0.0;
    let mut used = 0usize;
    for (i, _) in assignment.iter().enumerate().filter(|(_, &b)| b) {
        features += 1;
        defects += u64::from(model.attrs.defects[i]);
        cost += model.attrs.cost[i];
        used += usize::from(model.attrs.used_before[i]);
    }
    Ok(vec![
        violations as f64,
        features as f64,
        defects as f64,
        cost,
        used as f64,
    ])
}

impl ProblemModel for SplModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn decision_space(&self) -> &DecisionSpace {
        &self.space
    }

    fn objective_spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    fn compute(&self, decisions: &Decisions) -> Result<Vec<f64>> {
        let bits = decisions
            .as_bits()
            .ok_or_else(|| Error::structural("product-line decisions must be bits"))?;
        spl_evaluate(bits, self)
    }

    fn check_valid(&self, decisions: &Decisions) -> Result<()> {
        self.space.conforms(decisions)?;
        let bits = decisions.as_bits().unwrap_or(&[]);
        if let Some(i) = self
            .cnf
            .clauses
            .iter()
            .position(|c| !Cnf::clause_satisfied(c, bits))
        {
            let clause: Vec<String> = self.cnf.clauses[i]
                .iter()
                .map(|&l| {
                    let n = self.cnf.name(l.unsigned_abs() as usize - 1);
                    if l < 0 {
                        format!("¬{n}")
                    } else {
                        n
                    }
                })
                .collect();
            return Err(Error::Validity(format!(
                "{}: clause {} ({}) is violated",
                self.name,
                i + 1,
                clause.join(" ∨ ")
            )));
        }
        Ok(())
    }

    fn generate(&self, count: usize, seed: u64) -> Result<Vec<Decisions>> {
        Ok(sample_valid(&self.cnf, count, seed)?
            .into_iter()
            .map(|a| Decisions::Bits(a.bits))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{evaluate, Candidate, EvaluationLedger};

    fn toy(costs: &[f64]) -> SplModel {
        let n = costs.len();
        let cnf = Cnf::new(n, vec![]).unwrap();
        let attrs = FeatureAttributes {
            cost: costs.to_vec(),
            defects: vec![1; n],
            used_before: vec![true; n],
        };
        SplModel::new("toy", cnf, attrs).unwrap()
    }

    #[test]
    fn all_selected_sums_costs() {
        let m = toy(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let o = spl_evaluate(&[true; 5], &m).unwrap();
        assert_eq!(o, vec![0.0, 5.0, 5.0, 15.0, 5.0]);
        assert!(spl_evaluate(&[true; 4], &m).is_err());
    }

    #[test]
    fn empty_selection_with_mandatory_root() {
        let m = SplModel::builtin("spl49", 0).unwrap();
        let o = spl_evaluate(&[false; 49], &m).unwrap();
        assert!(o[0] > 0.0);
        assert_eq!(&o[1..], &[0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn evaluate_rejects_invalid_products() {
        let m = SplModel::builtin("spl49", 0).unwrap();
        let mut c = Candidate::new(0, Decisions::Bits(vec![false; 49]));
        let ledger = EvaluationLedger::new();
        match evaluate(&m, &mut c, &ledger) {
            Err(Error::Validity(msg)) => assert!(msg.contains("root")),
            other => panic!("{other:?}"),
        }
        assert_eq!(ledger.evaluations(), 0);
    }

    #[test]
    fn attributes_follow_their_distributions() {
        let a = generate_attributes(2000, 4);
        assert_eq!(a, generate_attributes(2000, 4));
        for i in 0..a.len() {
            assert!((5.0..=15.0).contains(&a.cost[i]));
            assert!(a.defects[i] <= if a.used_before[i] { 3 } else { 10 });
        }
    }

    #[test]
    fn empty_cnf_accepts_everything() {
        let cnf = Cnf::new(3, vec![]).unwrap();
        assert!(spl_valid(&[true, false, true], &cnf));
    }
}
