//! Experiment configuration, the comparison algorithms and result output.

pub mod algorithms;
pub mod config;
pub mod experiment;
pub mod nsga2;
pub mod report;

pub use algorithms::{rand_sample, run_ground_truth, run_rand, run_sway, SwayRun};
pub use config::{Algorithm, ExperimentConfig, ModelSource, RandSize};
pub use experiment::{
    run_experiment, run_experiment_with, write_results, AlgorithmSummary, Comparison, RunRecord,
    RunReport,
};
pub use nsga2::{crowding_distance, fast_nondominated_sort, run_nsga2, Nsga2Outcome, Nsga2Params};
pub use report::{write_report, BoxStats};
