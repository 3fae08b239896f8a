//! GP one-step dynamics model of melt-pool area: assembles transition
//! samples from scan logs, standardizes inputs and targets, trains a
//! [`gp_core::TrainedGP`] over `(area, temp, power, speed)` transitions, and
//! provides one-step prediction, multi-step rollout, and the affine
//! linearization consumed by the controller.

mod io;
mod model;
mod normalize;
mod sample;

pub use io::{load_model_json, save_model_json, MODEL_FORMAT_VERSION};
pub use model::{train_dynamics, DynModel, Linearization, TrainConfig};
pub use normalize::Normalizer;
pub use sample::{build_samples, build_samples_with, DynSample, SampleOptions};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynError {
    #[error("need at least {needed} samples, got {got}")]
    NotEnoughSamples { needed: usize, got: usize },
    #[error("input dimension '{0}' has zero spread in the training set")]
    DegenerateSpread(&'static str),
    #[error("scan log is not time-ordered at record {0}")]
    UnorderedLog(usize),
    #[error("scan log mixes sample periods: {a} s vs {b} s at record {at}")]
    MixedPeriod { a: f64, b: f64, at: usize },
    #[error("sequence length mismatch: {temps} temperatures vs {inputs} inputs")]
    LengthMismatch { temps: usize, inputs: usize },
    #[error("model file version {got} is not supported (expected {expected})")]
    UnsupportedVersion { expected: u32, got: u32 },
    #[error(transparent)]
    Gp(#[from] gp_core::GpError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
