//! Successive-linearization model predictive control of melt-pool area:
//! condenses the affine [`gpdyn::Linearization`] into a dense QP over the
//! input horizon with hard input/rate constraints and soft state bounds,
//! solves it with a deterministic dual coordinate-ascent method, and emits
//! the next laser command with optional temperature feedforward.

mod config;
mod controller;
mod qp;
mod solver;

pub use config::{MpcConfig, MPC_CONFIG_SCHEMA_VERSION};
pub use controller::{control_step, feedforward_term, ControlOutput};
pub use qp::{build_qp, QpProblem};
pub use solver::{solve_qp, QpSolution, SolverConfig, SolverStatus};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MpcError {
    #[error("invalid controller configuration: {0}")]
    InvalidConfig(String),
    #[error("linearization or state is not finite")]
    NonFinite,
}
