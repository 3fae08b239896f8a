use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GpError;
use crate::likelihood::log_marginal_grad;
use crate::model::{Dataset, Hyperparams, TrainedGP};

/// Settings for marginal-likelihood maximization.
#[derive(Debug, Clone)]
pub struct OptConfig {
    pub max_iters: usize,
    /// Convergence tolerance on the max-norm of the log-space gradient.
    pub tol: f64,
    /// Number of starts: the first is the caller's init, the rest are
    /// seeded random perturbations of it.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            max_iters: 200,
            tol: 1e-5,
            restarts: 5,
            seed: 0,
        }
    }
}

/// Result of a hyperparameter search.
#[derive(Debug, Clone)]
pub struct OptOutcome {
    pub hyperparams: Hyperparams,
    pub log_marginal: f64,
    pub grad_inf_norm: f64,
    /// True when the gradient tolerance was met at the returned point.
    pub converged: bool,
    pub iterations: usize,
}

// Guard rails on the log-space search box, sized for standardized data.
// The noise floor keeps K_Y well-conditioned enough for stable prediction.
const LOG_SIGMA_F_RANGE: (f64, f64) = (-7.0, 3.0);
const LOG_SIGMA_N_RANGE: (f64, f64) = (-9.0, 3.0);
const LOG_LENGTHSCALE_RANGE: (f64, f64) = (-10.0, 10.0);

fn to_log_vec(hp: &Hyperparams) -> Vec<f64> {
    let mut v = vec![hp.sigma_f.ln(), hp.sigma_n.ln()];
    v.extend(hp.lengthscales.iter().map(|l| l.ln()));
    v
}

fn from_log_vec(v: &[f64]) -> Hyperparams {
    Hyperparams {
        sigma_f: v[0].exp(),
        sigma_n: v[1].exp(),
        lengthscales: v[2..].iter().map(|l| l.exp()).collect(),
    }
}

fn clamp_log_vec(v: &mut [f64]) {
    v[0] = v[0].clamp(LOG_SIGMA_F_RANGE.0, LOG_SIGMA_F_RANGE.1);
    v[1] = v[1].clamp(LOG_SIGMA_N_RANGE.0, LOG_SIGMA_N_RANGE.1);
    for x in v[2..].iter_mut() {
        *x = x.clamp(LOG_LENGTHSCALE_RANGE.0, LOG_LENGTHSCALE_RANGE.1);
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn eval(data: &Dataset, theta: &[f64]) -> Result<(f64, Vec<f64>), GpError> {
    let hp = from_log_vec(theta);
    let gp = TrainedGP::fit(data.clone(), hp.clone(), 0.0)?;
    let grad = log_marginal_grad(data, &hp)?;
    Ok((gp.log_marginal(), grad))
}

/// Maximize the log marginal likelihood by gradient ascent in log-space with
/// backtracking line search and multiple seeded starts.
///
/// The returned point always scores at least as well as `init`; deterministic
/// for a fixed seed. Errors only if every start fails factorization.
pub fn optimize_hyperparams(
    data: &Dataset,
    init: &Hyperparams,
    cfg: &OptConfig,
) -> Result<OptOutcome, GpError> {
    init.validate()?;
    if init.sigma_n <= 0.0 {
        return Err(GpError::InvalidHyperparams(
            "optimizer works in log-space; init.sigma_n must be > 0".into(),
        ));
    }
    if init.input_dim() != data.input_dim() {
        return Err(GpError::DimensionMismatch {
            expected: init.input_dim(),
            got: data.input_dim(),
        });
    }
    let restarts = cfg.restarts.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base = {
        let mut v = to_log_vec(init);
        clamp_log_vec(&mut v);
        v
    };

    let mut best: Option<OptOutcome> = None;
    let mut failed_starts = 0usize;

    for r in 0..restarts {
        let mut theta = base.clone();
        if r > 0 {
            for x in theta.iter_mut() {
                *x += rng.gen_range(-2.0..2.0);
            }
            clamp_log_vec(&mut theta);
        }

        let (mut f, mut g) = match eval(data, &theta) {
            Ok(v) => v,
            Err(_) => {
                failed_starts += 1;
                continue;
            }
        };
        let mut iterations = 0usize;
        let mut converged = inf_norm(&g) <= cfg.tol;

        while !converged && iterations < cfg.max_iters {
            iterations += 1;
            let mut step = 1.0 / (1.0 + inf_norm(&g));
            let mut accepted = false;
            for _ in 0..40 {
                let mut cand = theta.clone();
                for (c, gi) in cand.iter_mut().zip(g.iter()) {
                    *c += step * gi;
                }
                clamp_log_vec(&mut cand);
                let ascent: f64 = cand
                    .iter()
                    .zip(theta.iter())
                    .zip(g.iter())
                    .map(|((c, t), gi)| (c - t) * gi)
                    .sum();
                if ascent <= 0.0 {
                    break;
                }
                if let Ok((fc, gc)) = eval(data, &cand) {
                    if fc > f + 1e-4 * ascent {
                        theta = cand;
                        f = fc;
                        g = gc;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            converged = inf_norm(&g) <= cfg.tol;
        }

        let outcome = OptOutcome {
            hyperparams: from_log_vec(&theta),
            log_marginal: f,
            grad_inf_norm: inf_norm(&g),
            converged,
            iterations,
        };
        match &best {
            Some(b) if b.log_marginal >= outcome.log_marginal => {}
            _ => best = Some(outcome),
        }
    }

    best.ok_or(GpError::AllRestartsFailed {
        restarts: failed_starts,
    })
}
