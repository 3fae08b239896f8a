//! Fixed-grid finite-difference surrogate of a laser-melting thermal plant:
//! explicit 3-D transient conduction on a node grid driven by a Gaussian
//! volumetric heat source, with melt-pool-area and lookahead-temperature
//! sensors and a scan runner that executes [`scan_datagen::ScanPlan`]s.

mod field;
mod log;
mod params;
mod scan;
mod sensors;
mod source;
mod step;

pub use field::{BeamState, BoundaryMode, ThermalField};
pub use log::{read_csv, write_csv, write_field_snapshot, SCAN_CSV_HEADER};
pub use params::{LaserParams, MaterialParams};
pub use scan::{field_for_plan, run_scan, run_scan_full, GridConfig, SimConfig, StepRecord};
pub use sensors::{lookahead_temp, melt_area};
pub use source::heat_source_eval;
pub use step::{thermal_step, StepStats};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlantError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("beam at ({x_mm}, {y_mm}) mm is outside the domain")]
    BeamOutsideDomain { x_mm: f64, y_mm: f64 },
    #[error("non-finite temperature at step {step}: thermal solve unstable")]
    UnstableSolve { step: usize },
    #[error("domain too small: {0}")]
    DomainTooSmall(String),
    #[error("controller aborted at step {step}: {message}")]
    ControllerAborted {
        step: usize,
        message: String,
        /// Log of every step completed before the abort.
        partial: Vec<StepRecord>,
    },
    #[error("scan log malformed: {0}")]
    MalformedLog(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
