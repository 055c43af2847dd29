//! Pareto-front quality indicators and significance testing.

mod front;
mod hv;
mod indicators;
pub mod stats;

pub use front::{
    is_mutually_nondominated, nondominated_filter, nondominated_points, normalize_objectives,
    reference_front, Front,
};
pub use hv::{covered, exact as hv_exact, hv, hv_estimate, HvConfig, HvEstimate, HvMode};
pub use indicators::{gd, gs, pfs};
pub use stats::{cliffs_delta, median, wilcoxon_exact, wilcoxon_rank_sum, RankSumResult};
