//! Certified bounds on `eta_n` and `zeta_n` by interval dynamics, and the
//! trichotomy verdict.

mod config;
mod dynamics;
mod eta;
mod files;
mod report;
mod segments;
mod zeta;

pub use config::{refine_depth, JobShard, MapChoice, RunConfig};
pub use dynamics::{first_return_iterate, iterate_map, CycleDynamics, Orbit, Status};
pub use eta::{eta_both, eta_from_measures, eta_lower, eta_report, eta_sets, eta_upper, EtaSets};
pub use files::{endpoint_paths, read_endpoints, write_endpoints, EndpointStage};
pub use report::{recursive_inequality_check, recursive_window, trichotomy, BoundReport, RecursiveCheck, TrichotomyVerdict, Window};
pub use segments::SegmentSet;
pub use zeta::{
    preimage_levels, preimage_stage, preimage_tree, preimages, reduce_stage, return_stage, zeta_lower, zeta_lower_from_measure, zeta_lower_report, zeta_lower_set, zeta_nm_lower,
    zeta_upper, zeta_upper_report,
};

use crate::renorm::RenormError;
use crate::rigor::IInterval;

#[derive(Debug, thiserror::Error)]
pub enum AttractorError {
    #[error("{0:?} is not certainly inside one branch of T_n ∪ J_n")]
    BranchAmbiguous(IInterval),
    #[error("level {n} is below the minimum {min}")]
    BadLevel { n: usize, min: usize },
    #[error(transparent)]
    Renorm(#[from] RenormError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Format(String),
}

#[cfg(test)]
mod tests;
