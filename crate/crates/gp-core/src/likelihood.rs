use nalgebra::DMatrix;

use crate::error::GpError;
use crate::kernel::kernel_eval_unchecked;
use crate::model::{cholesky_with_jitter, covariance_matrix, Dataset, Hyperparams};

/// Gradient of the log marginal likelihood in log-parameterization, ordered
/// `[d/d log sigma_f, d/d log sigma_n, d/d log l_1, ..., d/d log l_n]`.
///
/// Uses `dL/d theta_j = 0.5 tr((alpha alpha^T - K_Y^-1) dK_Y/d theta_j)`.
pub fn log_marginal_grad(data: &Dataset, hp: &Hyperparams) -> Result<Vec<f64>, GpError> {
    hp.validate()?;
    if hp.input_dim() != data.input_dim() {
        return Err(GpError::DimensionMismatch {
            expected: hp.input_dim(),
            got: data.input_dim(),
        });
    }
    let m = data.len();
    let n = hp.input_dim();
    let k_y = covariance_matrix(data, hp);
    let (l, _) = cholesky_with_jitter(&k_y, 0.0)?;

    let z = l
        .solve_lower_triangular(data.targets())
        .expect("triangular solve on a valid Cholesky factor");
    let alpha = l
        .tr_solve_lower_triangular(&z)
        .expect("triangular solve on a valid Cholesky factor");

    // K_Y^-1 via triangular solves against the identity.
    let eye = DMatrix::<f64>::identity(m, m);
    let w = l
        .solve_lower_triangular(&eye)
        .expect("triangular solve on a valid Cholesky factor");
    let k_inv = l
        .tr_solve_lower_triangular(&w)
        .expect("triangular solve on a valid Cholesky factor");

    // A = alpha alpha^T - K_Y^-1; grad_j = 0.5 * sum(A .* dK/dtheta_j).
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            a[(i, j)] = alpha[i] * alpha[j] - k_inv[(i, j)];
        }
    }

    let rows: Vec<Vec<f64>> = (0..m).map(|i| data.row(i)).collect();
    let noise = hp.sigma_n * hp.sigma_n;

    let mut grad = vec![0.0; n + 2];
    for i in 0..m {
        for j in 0..m {
            let kf = kernel_eval_unchecked(&rows[i], &rows[j], hp);
            let aij = a[(i, j)];
            // d k / d log sigma_f = 2 kf
            grad[0] += 0.5 * aij * 2.0 * kf;
            for d in 0..n {
                let diff = rows[i][d] - rows[j][d];
                // d k / d log l_d = kf * diff^2 / (2 l_d)
                grad[2 + d] += 0.5 * aij * kf * diff * diff / (2.0 * hp.lengthscales[d]);
            }
        }
        // d K_Y / d log sigma_n = 2 sigma_n^2 I
        grad[1] += 0.5 * a[(i, i)] * 2.0 * noise;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(sigma_f: f64, sigma_n: f64, ls: &[f64]) -> Hyperparams {
        Hyperparams::new(sigma_f, sigma_n, ls.to_vec()).unwrap()
    }

    #[test]
    fn stationary_when_target_squared_equals_covariance() {
        // m = 1, y = sqrt(2), sigma_f = sigma_n = 1: K_Y = 2 = y^2.
        let data = Dataset::from_rows(&[vec![0.0]], &[2.0f64.sqrt()]).unwrap();
        let g = log_marginal_grad(&data, &hp(1.0, 1.0, &[1.0])).unwrap();
        assert!(g[0].abs() < 1e-12, "sigma_f component {}", g[0]);
        assert!(g[1].abs() < 1e-12, "sigma_n component {}", g[1]);
    }

    #[test]
    fn lengthscale_gradient_vanishes_for_single_observation() {
        let data = Dataset::from_rows(&[vec![3.0, -1.0]], &[5.0]).unwrap();
        let g = log_marginal_grad(&data, &hp(1.3, 0.2, &[0.7, 2.0])).unwrap();
        assert!(g[2].abs() < 1e-14);
        assert!(g[3].abs() < 1e-14);
    }
}
