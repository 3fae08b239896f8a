//! Scan-plan generation for multi-track laser melting experiments:
//! power/speed waveforms, the nine-case training matrix, and seeded
//! train/validation splitting.

mod cases;
mod plan;
mod split;
mod waveform;

pub use cases::{make_case, CaseDefaults, NUM_CASES};
pub use plan::{ScanPlan, Track};
pub use split::{split_indices, subsample_split};
pub use waveform::{Waveform, WaveformKind};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("case id {0} is out of range 1..=9")]
    InvalidCaseId(usize),
    #[error("train count {train} exceeds total {total}")]
    TrainCountExceedsTotal { train: usize, total: usize },
    #[error("invalid scan plan: {0}")]
    InvalidPlan(String),
    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),
}
