use crate::error::GpError;
use crate::model::Hyperparams;

/// Squared-exponential kernel between two points.
///
/// `k(x, x') = sigma_f^2 * exp(-0.5 * sum_d (x_d - x'_d)^2 / l_d)`
/// where `l_d` are the diagonal entries of the lengthscale matrix.
pub fn kernel_eval(x: &[f64], x_prime: &[f64], hp: &Hyperparams) -> Result<f64, GpError> {
    let n = hp.lengthscales.len();
    if x.len() != n {
        return Err(GpError::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if x_prime.len() != n {
        return Err(GpError::DimensionMismatch {
            expected: n,
            got: x_prime.len(),
        });
    }
    if !x.iter().chain(x_prime.iter()).all(|v| v.is_finite()) {
        return Err(GpError::NonFinite { context: "kernel input" });
    }
    Ok(kernel_eval_unchecked(x, x_prime, hp))
}

/// Kernel evaluation without argument validation, for inner loops over
/// already-validated training data.
pub(crate) fn kernel_eval_unchecked(x: &[f64], x_prime: &[f64], hp: &Hyperparams) -> f64 {
    let mut quad = 0.0;
    for d in 0..hp.lengthscales.len() {
        let diff = x[d] - x_prime[d];
        quad += diff * diff / hp.lengthscales[d];
    }
    hp.sigma_f * hp.sigma_f * (-0.5 * quad).exp()
}
