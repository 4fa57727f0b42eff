//! Solvers for the fair maximum coverage problem: select exactly (or at most)
//! `k` sets from a colored, weighted set system so that the covered weight is
//! maximized while the per-color counts of covered elements stay (approximately)
//! balanced.
//!
//! The crate is organized around one input type, [`FmcInstance`], and a family
//! of solvers that all report their output through [`Solution`] and
//! [`FairnessReport`]:
//!
//! * [`oracle`]: brute-force exact feasibility and optima, the ground truth
//!   every other solver is measured against;
//! * [`randomized`]: LP relaxation plus dependent rounding, with a coverage
//!   guess loop and min-sigma boosting;
//! * [`iterated`]: deterministic iterated rounding for graphs and general
//!   set systems;
//! * [`special`]: greedy and pipage k-cover baselines and the solvers for
//!   segregated and balanced instances;
//! * [`geometry`]: the shifted-grid algorithm for unit-disk coverage of
//!   colored point clouds in the plane.

pub mod bitset;
pub mod desk;
pub mod generate;
pub mod geometry;
pub mod instance;
pub mod iterated;
pub mod lp;
pub mod oracle;
pub mod randomized;
pub mod rng;
pub mod rounding;
pub mod special;

pub use instance::{
    ColoredGraph, FairnessReport, FmcInstance, GraphTranslation, InstanceStats, Solution,
};
pub use oracle::OracleResult;

/// Crate-wide error type. Validation messages name the violated invariant and
/// the offending (1-based) index so they can be surfaced verbatim.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("lp failure: {0}")]
    Lp(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid parameter: {0}")]
    Param(String),
}

pub type Result<T> = std::result::Result<T, Error>;
