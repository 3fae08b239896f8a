//! End-to-end experiment orchestration: training-data generation on the
//! surrogate plant, model training and validation, open- and closed-loop
//! runs with per-step CSV logs, control performance metrics, plot-data
//! emission, and a newline-delimited JSON co-simulation bridge for external
//! plant solvers.

mod closed_loop;
mod config;
mod cosim;
mod metrics;
mod pipeline;
mod plotdata;
mod runcsv;

pub use closed_loop::{
    report_json, run_closed_loop, write_plant_csv, ClosedLoopOptions, RunReport,
};
pub use config::{
    AppConfig, ControlTestConfig, SolverSettings, TrainingConfig, APP_CONFIG_SCHEMA_VERSION,
};
pub use cosim::{config_hash, cosim_serve, CosimMessage, SessionSummary, COSIM_PROTOCOL_VERSION};
pub use metrics::{compute_metrics, default_windows, track_ranges, MetricsWindows, RunMetrics};
pub use pipeline::{
    control_test_plan, generate_case_logs, train_from_logs, validate_model, TrainedArtifacts,
    ValidationReport,
};
pub use plotdata::{emit_run_series, emit_scatter, RunSeries};
pub use runcsv::{mask_solve_time, read_run_csv, write_run_csv, RunRecord, RUN_CSV_HEADER};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("empty series")]
    EmptySeries,
    #[error("set point must be > 0, got {0}")]
    InvalidSetPoint(f64),
    #[error("unknown series name '{0}'")]
    UnknownSeries(String),
    #[error("run log malformed: {0}")]
    MalformedLog(String),
    #[error("config file invalid: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Plant(#[from] thermal_plant::PlantError),
    #[error(transparent)]
    Dyn(#[from] gpdyn::DynError),
    #[error(transparent)]
    Mpc(#[from] mpc_control::MpcError),
    #[error(transparent)]
    Datagen(#[from] scan_datagen::DatagenError),
    #[error(transparent)]
    Gp(#[from] gp_core::GpError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
