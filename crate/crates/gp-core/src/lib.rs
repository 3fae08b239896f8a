//! Exact Gaussian-process regression with a squared-exponential kernel.
//!
//! The model is a zero-mean GP over `n`-dimensional inputs with covariance
//! `k(x, x') = sigma_f^2 * exp(-0.5 * (x - x')^T L^-1 (x - x'))` where
//! `L = diag(l_1, ..., l_n)`, plus i.i.d. Gaussian observation noise with
//! standard deviation `sigma_n`. Inference goes through a Cholesky factor of
//! `K_Y = K(X, X) + sigma_n^2 I`; hyperparameters are selected by maximizing
//! the log marginal likelihood with a multi-start gradient ascent.

mod error;
mod io;
mod kernel;
mod likelihood;
mod model;
mod optimize;

pub use error::GpError;
pub use io::{load_json, save_json, FORMAT_VERSION};
pub use kernel::kernel_eval;
pub use likelihood::log_marginal_grad;
pub use model::{Dataset, Hyperparams, Prediction, TrainedGP};
pub use optimize::{optimize_hyperparams, OptConfig, OptOutcome};
