//! SWAY: sample a large candidate pool, recursively bi-cluster it by
//! decisions, evaluate only cluster representatives and prune dominated
//! halves. Includes the XOMO, POM3 and product-line benchmark models, a
//! DIMACS/DPLL sampler, Pareto-front quality indicators and an experiment
//! harness with RAND, GroundTruth and NSGA-II comparators.

pub mod dominance;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod models;
pub mod problem;
pub mod satgen;
pub mod seed;
pub mod sway;

pub use error::{Error, Result};
pub use problem::{
    evaluate, normalize_decisions, Candidate, DecisionSpace, Decisions, DimensionSpec, Direction,
    EvaluationLedger, Objective, ObjectiveSpec, ProblemModel, SpaceKind,
};
