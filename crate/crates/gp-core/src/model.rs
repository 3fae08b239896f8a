use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::GpError;
use crate::kernel::kernel_eval_unchecked;

/// Kernel and noise hyperparameters.
///
/// `lengthscales` holds the diagonal entries of the lengthscale matrix, so
/// each entry carries squared input units: the kernel quadratic form is
/// `sum_d (x_d - x'_d)^2 / l_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub sigma_f: f64,
    pub sigma_n: f64,
    pub lengthscales: Vec<f64>,
}

impl Hyperparams {
    pub fn new(sigma_f: f64, sigma_n: f64, lengthscales: Vec<f64>) -> Result<Self, GpError> {
        let hp = Hyperparams {
            sigma_f,
            sigma_n,
            lengthscales,
        };
        hp.validate()?;
        Ok(hp)
    }

    pub fn validate(&self) -> Result<(), GpError> {
        if !self.sigma_f.is_finite() || self.sigma_f <= 0.0 {
            return Err(GpError::InvalidHyperparams(format!(
                "sigma_f must be finite and > 0, got {}",
                self.sigma_f
            )));
        }
        if !self.sigma_n.is_finite() || self.sigma_n < 0.0 {
            return Err(GpError::InvalidHyperparams(format!(
                "sigma_n must be finite and >= 0, got {}",
                self.sigma_n
            )));
        }
        if self.lengthscales.is_empty() {
            return Err(GpError::InvalidHyperparams(
                "lengthscales must be non-empty".into(),
            ));
        }
        for (d, l) in self.lengthscales.iter().enumerate() {
            if !l.is_finite() || *l <= 0.0 {
                return Err(GpError::InvalidHyperparams(format!(
                    "lengthscale {d} must be finite and > 0, got {l}"
                )));
            }
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.lengthscales.len()
    }
}

/// Training inputs (one row per observation) and scalar targets.
#[derive(Debug, Clone)]
pub struct Dataset {
    inputs: DMatrix<f64>,
    targets: DVector<f64>,
}

impl Dataset {
    pub fn new(inputs: DMatrix<f64>, targets: DVector<f64>) -> Result<Self, GpError> {
        if inputs.nrows() == 0 {
            return Err(GpError::EmptyDataset);
        }
        if inputs.nrows() != targets.len() {
            return Err(GpError::DimensionMismatch {
                expected: inputs.nrows(),
                got: targets.len(),
            });
        }
        if !inputs.iter().all(|v| v.is_finite()) {
            return Err(GpError::NonFinite { context: "dataset inputs" });
        }
        if !targets.iter().all(|v| v.is_finite()) {
            return Err(GpError::NonFinite { context: "dataset targets" });
        }
        Ok(Dataset { inputs, targets })
    }

    /// Build from one row-slice per observation.
    pub fn from_rows(rows: &[Vec<f64>], targets: &[f64]) -> Result<Self, GpError> {
        if rows.is_empty() {
            return Err(GpError::EmptyDataset);
        }
        let n = rows[0].len();
        for r in rows {
            if r.len() != n {
                return Err(GpError::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        let inputs = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        let targets = DVector::from_column_slice(targets);
        Dataset::new(inputs, targets)
    }

    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn targets(&self) -> &DVector<f64> {
        &self.targets
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.inputs.row(i).iter().copied().collect()
    }
}

/// Posterior mean and variance of the latent function at one query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

/// A fitted GP: dataset, hyperparameters, the lower Cholesky factor of
/// `K_Y = K(X, X) + sigma_n^2 I`, and the weight vector `alpha = K_Y^-1 Y`.
///
/// Immutable after `fit`; concurrent read-only prediction is safe.
#[derive(Debug, Clone)]
pub struct TrainedGP {
    dataset: Dataset,
    hyperparams: Hyperparams,
    chol_l: DMatrix<f64>,
    alpha: DVector<f64>,
    jitter_used: f64,
}

/// Jitter escalation ladder: starting level when the caller passes 0.
pub(crate) const JITTER_FLOOR: f64 = 1e-12;
/// Largest diagonal jitter tried before reporting failure.
pub(crate) const JITTER_CEIL: f64 = 1e-6;

/// Covariance matrix `K(X, X) + sigma_n^2 I` for a dataset.
pub(crate) fn covariance_matrix(data: &Dataset, hp: &Hyperparams) -> DMatrix<f64> {
    let m = data.len();
    let noise = hp.sigma_n * hp.sigma_n;
    let mut k = DMatrix::zeros(m, m);
    let rows: Vec<Vec<f64>> = (0..m).map(|i| data.row(i)).collect();
    for i in 0..m {
        for j in 0..=i {
            let v = kernel_eval_unchecked(&rows[i], &rows[j], hp);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    for i in 0..m {
        k[(i, i)] += noise;
    }
    k
}

/// Cholesky with diagonal jitter escalation. Returns the lower factor and the
/// jitter that was actually added (0 when the plain factorization succeeds).
pub(crate) fn cholesky_with_jitter(
    k: &DMatrix<f64>,
    start_jitter: f64,
) -> Result<(DMatrix<f64>, f64), GpError> {
    if let Some(c) = nalgebra::Cholesky::new(k.clone()) {
        return Ok((c.unpack(), 0.0));
    }
    let mut jitter = if start_jitter > 0.0 {
        start_jitter
    } else {
        JITTER_FLOOR
    };
    while jitter <= JITTER_CEIL * (1.0 + 1e-12) {
        let mut kj = k.clone();
        for i in 0..kj.nrows() {
            kj[(i, i)] += jitter;
        }
        if let Some(c) = nalgebra::Cholesky::new(kj) {
            return Ok((c.unpack(), jitter));
        }
        jitter *= 10.0;
    }
    Err(GpError::FactorizationFailed {
        max_jitter: JITTER_CEIL,
    })
}

fn solve_lower(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    l.solve_lower_triangular(b)
        .expect("triangular solve on a valid Cholesky factor")
}

fn solve_upper_from_lower(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    l.tr_solve_lower_triangular(b)
        .expect("triangular solve on a valid Cholesky factor")
}

impl TrainedGP {
    /// Fit the GP: factorize `K_Y` and solve for the weight vector.
    ///
    /// `jitter` is the starting diagonal jitter used only if the plain
    /// factorization fails; escalation stops at 1e-6 and then errors.
    pub fn fit(data: Dataset, hp: Hyperparams, jitter: f64) -> Result<Self, GpError> {
        hp.validate()?;
        if hp.input_dim() != data.input_dim() {
            return Err(GpError::DimensionMismatch {
                expected: hp.input_dim(),
                got: data.input_dim(),
            });
        }
        if !(jitter >= 0.0) {
            return Err(GpError::InvalidHyperparams(format!(
                "jitter must be >= 0, got {jitter}"
            )));
        }
        let k = covariance_matrix(&data, &hp);
        let (l, jitter_used) = cholesky_with_jitter(&k, jitter)?;
        let z = solve_lower(&l, data.targets());
        let alpha = solve_upper_from_lower(&l, &z);
        Ok(TrainedGP {
            dataset: data,
            hyperparams: hp,
            chol_l: l,
            alpha,
            jitter_used,
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hyperparams
    }

    /// Lower Cholesky factor of `K_Y` (with any jitter that was added).
    pub fn chol_l(&self) -> &DMatrix<f64> {
        &self.chol_l
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn jitter_used(&self) -> f64 {
        self.jitter_used
    }

    pub fn input_dim(&self) -> usize {
        self.hyperparams.input_dim()
    }

    fn check_query(&self, x_star: &[f64]) -> Result<(), GpError> {
        if x_star.len() != self.input_dim() {
            return Err(GpError::DimensionMismatch {
                expected: self.input_dim(),
                got: x_star.len(),
            });
        }
        if !x_star.iter().all(|v| v.is_finite()) {
            return Err(GpError::NonFinite { context: "query point" });
        }
        Ok(())
    }

    fn kernel_vector(&self, x_star: &[f64]) -> DVector<f64> {
        DVector::from_fn(self.dataset.len(), |i, _| {
            kernel_eval_unchecked(x_star, &self.dataset.row(i), &self.hyperparams)
        })
    }

    /// Posterior mean and variance at `x_star` via triangular solves.
    pub fn predict(&self, x_star: &[f64]) -> Result<Prediction, GpError> {
        self.check_query(x_star)?;
        let k_star = self.kernel_vector(x_star);
        let mean = k_star.dot(&self.alpha);
        let v = solve_lower(&self.chol_l, &k_star);
        let prior = self.hyperparams.sigma_f * self.hyperparams.sigma_f;
        let mut variance = prior - v.dot(&v);
        if variance < 0.0 {
            debug_assert!(
                variance >= -1e-12 * prior.max(1.0),
                "variance {variance} below numerical slack for prior {prior}"
            );
            variance = 0.0;
        }
        Ok(Prediction { mean, variance })
    }

    /// Log marginal likelihood of the training targets.
    ///
    /// `-0.5 Y^T K_Y^-1 Y - 0.5 log|K_Y| - (m/2) log(2 pi)` with the
    /// log-determinant taken from the Cholesky diagonal. The constant term
    /// uses the observation count m.
    pub fn log_marginal(&self) -> f64 {
        let m = self.dataset.len() as f64;
        let data_fit = -0.5 * self.dataset.targets().dot(&self.alpha);
        let log_det_half: f64 = (0..self.dataset.len())
            .map(|i| self.chol_l[(i, i)].ln())
            .sum();
        data_fit - log_det_half - 0.5 * m * (2.0 * std::f64::consts::PI).ln()
    }

    /// Gradient of the posterior mean with respect to the query point:
    /// `sum_i alpha_i k(x*, x_i) L^-1 (x_i - x*)`.
    pub fn predict_mean_grad(&self, x_star: &[f64]) -> Result<DVector<f64>, GpError> {
        self.check_query(x_star)?;
        let n = self.input_dim();
        let mut grad = DVector::zeros(n);
        for i in 0..self.dataset.len() {
            let xi = self.dataset.row(i);
            let k = kernel_eval_unchecked(x_star, &xi, &self.hyperparams);
            let w = self.alpha[i] * k;
            for d in 0..n {
                grad[d] += w * (xi[d] - x_star[d]) / self.hyperparams.lengthscales[d];
            }
        }
        Ok(grad)
    }
}
