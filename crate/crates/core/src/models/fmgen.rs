//! Deterministic random feature models in CNF form.
//!
//! A tree of mandatory, optional, or- and alternative-groups is encoded
//! clause by clause, then cross-tree `requires`/`excludes` constraints are
//! added until the clause count reaches the target. Cross-tree constraints
//! are only accepted when they hold in a set of witness products drawn from
//! the tree alone, which keeps the formula satisfiable.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::satgen::{sample_valid, Cnf};
use crate::seed;

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureModelSpec {
    pub name: String,
    pub features: usize,
    /// Total clause count. Groups fall back to optional features when the
    /// tree would overshoot; a budget below the feature count is exceeded.
    pub clauses: usize,
    pub seed: u64,
    /// Products every cross-tree constraint must admit.
    pub witnesses: usize,
}

impl FeatureModelSpec {
    pub fn new(name: impl Into<String>, features: usize, clauses: usize, seed: u64) -> Self {
        Self {
            name: name.into(),
            features,
            clauses,
            seed,
            witnesses: 16,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Group {
    Mandatory,
    Optional,
    Or,
    Alternative,
}

pub fn generate_feature_model(spec: &FeatureModelSpec) -> Result<Cnf> {
    let n = spec.features;
    if n < 2 {
        return Err(Error::config("a feature model needs at least two features"));
    }
    let mut rng = seed::rng(spec.seed);
    let mut clauses: Vec<Vec<i32>> = vec![vec![1]];
    let mut parent = vec![0usize; n];
    let mut names = vec![None; n];
    names[0] = Some("root".to_string());

    let mut frontier: Vec<usize> = vec![0];
    let mut next = 1;
    let mut cursor = 0;
    while next < n {
        let p = frontier[cursor % frontier.len()];
        cursor += 1;
        let groups = rng.gen_range(1..=3);
        for _ in 0..groups {
            if next >= n {
                break;
            }
            let kind = match rng.gen_range(0..10) {
                0..=2 => Group::Mandatory,
                3..=5 => Group::Optional,
                6..=7 => Group::Or,
                _ => Group::Alternative,
            };
            let mut size = match kind {
                Group::Mandatory | Group::Optional => 1,
                Group::Or | Group::Alternative => rng.gen_range(2..=4).min(n - next).max(1),
            };
            let extra = match kind {
                Group::Optional => 0,
                Group::Mandatory | Group::Or => 1,
                Group::Alternative => 1 + size * (size - 1) / 2,
            };
            // Every remaining feature still needs its parent clause.
            let mut kind = kind;
            if clauses.len() + extra + (n - next) > spec.clauses {
                kind = Group::Optional;
                size = 1;
            }
            let members: Vec<usize> = (next..next + size).collect();
            next += size;
            let pl = p as i32 + 1;
            for &c in &members {
                parent[c] = p;
                names[c] = Some(format!("f{c}"));
                clauses.push(vec![-(c as i32 + 1), pl]);
                frontier.push(c);
            }
            match kind {
                Group::Optional => {}
                Group::Mandatory => clauses.push(vec![-pl, members[0] as i32 + 1]),
                // A one-member group at the end of the feature budget is just mandatory.
                Group::Or | Group::Alternative if members.len() == 1 => {
                    clauses.push(vec![-pl, members[0] as i32 + 1]);
                }
                Group::Or | Group::Alternative => {
                    let mut c = vec![-pl];
                    c.extend(members.iter().map(|&m| m as i32 + 1));
                    clauses.push(c);
                    if kind == Group::Alternative {
                        for (i, &a) in members.iter().enumerate() {
                            for &b in &members[i + 1..] {
                                clauses.push(vec![-(a as i32 + 1), -(b as i32 + 1)]);
                            }
                        }
                    }
                }
            }
        }
    }

    let tree = Cnf::new(n, clauses.clone())?;
    let witnesses: Vec<Vec<bool>> =
        sample_valid(&tree, spec.witnesses.max(1), seed::split(spec.seed, 1))?
            .into_iter()
            .map(|a| a.bits)
            .collect();

    let is_ancestor = |a: usize, mut b: usize| {
        while b != 0 {
            b = parent[b];
            if b == a {
                return true;
            }
        }
        false
    };
    let mut candidates: Vec<usize> = (1..n).collect();
    let mut attempts = 0usize;
    while clauses.len() < spec.clauses {
        attempts += 1;
        if attempts > 200 * spec.clauses {
            return Err(Error::model(format!(
                "{}: could not place enough cross-tree constraints",
                spec.name
            )));
        }
        candidates.shuffle(&mut rng);
        let (a, b) = (candidates[0], candidates[1]);
        if is_ancestor(a, b) || is_ancestor(b, a) {
            continue;
        }
        let clause = if rng.gen_bool(0.5) {
            vec![-(a as i32 + 1), b as i32 + 1]
        } else {
            vec![-(a as i32 + 1), -(b as i32 + 1)]
        };
        if witnesses.iter().all(|w| Cnf::clause_satisfied(&clause, w)) && !clauses.contains(&clause)
        {
            clauses.push(clause);
        }
    }
    Cnf::new(n, clauses)?.with_names(names)
}
