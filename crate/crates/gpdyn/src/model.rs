use gp_core::{optimize_hyperparams, Dataset, Hyperparams, OptConfig, TrainedGP};
use serde::{Deserialize, Serialize};

use crate::normalize::Normalizer;
use crate::sample::DynSample;
use crate::DynError;

/// Training settings for the dynamics GP.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub opt: OptConfig,
    pub sample_period_s: f64,
    /// Starting hyperparameters in normalized units.
    pub init_sigma_f: f64,
    pub init_sigma_n: f64,
    pub init_lengthscale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            opt: OptConfig::default(),
            sample_period_s: 50e-6,
            init_sigma_f: 1.0,
            init_sigma_n: 0.1,
            init_lengthscale: 1.0,
        }
    }
}

/// The learned one-step dynamics `x_{k+1} = f(x_k, T_k, p_k, v_k)`:
/// a GP over standardized transitions plus the standardization statistics.
/// Immutable after training; prediction from shared references is safe.
#[derive(Debug, Clone)]
pub struct DynModel {
    gp: TrainedGP,
    normalizer: Normalizer,
    sample_period_s: f64,
}

/// First-order local model `x' = a_d x + b_d . (p, v) + c_d` at an operating
/// point; exact there by construction of the affine offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub a_d: f64,
    pub b_d: [f64; 2],
    pub c_d: f64,
}

/// Fit the normalizer and GP on training transitions. Deterministic for a
/// fixed optimizer seed.
pub fn train_dynamics(samples: &[DynSample], cfg: &TrainConfig) -> Result<DynModel, DynError> {
    if samples.len() < 2 {
        return Err(DynError::NotEnoughSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let normalizer = Normalizer::fit(samples)?;
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| normalizer.normalize_input(s.input()).to_vec())
        .collect();
    let targets: Vec<f64> = samples
        .iter()
        .map(|s| normalizer.normalize_target(s.next_area_mm2))
        .collect();
    let data = Dataset::from_rows(&rows, &targets)?;
    let init = Hyperparams::new(
        cfg.init_sigma_f,
        cfg.init_sigma_n,
        vec![cfg.init_lengthscale; 4],
    )?;
    let outcome = optimize_hyperparams(&data, &init, &cfg.opt)?;
    let gp = TrainedGP::fit(data, outcome.hyperparams, 0.0)?;
    Ok(DynModel {
        gp,
        normalizer,
        sample_period_s: cfg.sample_period_s,
    })
}

impl DynModel {
    pub(crate) fn from_parts(
        gp: TrainedGP,
        normalizer: Normalizer,
        sample_period_s: f64,
    ) -> Result<Self, DynError> {
        if gp.input_dim() != 4 {
            return Err(DynError::Gp(gp_core::GpError::DimensionMismatch {
                expected: 4,
                got: gp.input_dim(),
            }));
        }
        Ok(DynModel {
            gp,
            normalizer,
            sample_period_s,
        })
    }

    pub fn gp(&self) -> &TrainedGP {
        &self.gp
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    pub fn sample_period_s(&self) -> f64 {
        self.sample_period_s
    }

    /// One-step prediction of the next melt-pool area, clamped below at 0.
    pub fn predict_next(&self, area: f64, temp: f64, power: f64, speed: f64) -> f64 {
        let z = self.normalizer.normalize_input([area, temp, power, speed]);
        let mean = self
            .gp
            .predict(&z)
            .expect("4-dimensional query on a 4-dimensional model")
            .mean;
        self.normalizer.denormalize_target(mean).max(0.0)
    }

    /// Iterate [`DynModel::predict_next`] over measured temperature and input
    /// sequences of equal length N; returns N+1 areas starting at `x0`.
    pub fn rollout(
        &self,
        x0: f64,
        temps: &[f64],
        inputs: &[(f64, f64)],
    ) -> Result<Vec<f64>, DynError> {
        if temps.len() != inputs.len() {
            return Err(DynError::LengthMismatch {
                temps: temps.len(),
                inputs: inputs.len(),
            });
        }
        let mut areas = Vec::with_capacity(temps.len() + 1);
        areas.push(x0);
        let mut x = x0;
        for (t, (p, v)) in temps.iter().zip(inputs) {
            x = self.predict_next(x, *t, *p, *v);
            areas.push(x);
        }
        Ok(areas)
    }

    /// Affine local model at `(area, temp, power, speed)`: gradients of the
    /// posterior mean chained through the standardization scaling, with the
    /// temperature treated as a frozen measured disturbance.
    pub fn linearize(&self, area: f64, temp: f64, power: f64, speed: f64) -> Linearization {
        let z = self.normalizer.normalize_input([area, temp, power, speed]);
        let grad = self
            .gp
            .predict_mean_grad(&z)
            .expect("4-dimensional query on a 4-dimensional model");
        let sy = self.normalizer.target_std;
        let a_d = sy * grad[0] / self.normalizer.input_std[0];
        let b_d = [
            sy * grad[2] / self.normalizer.input_std[2],
            sy * grad[3] / self.normalizer.input_std[3],
        ];
        let next = self.predict_next(area, temp, power, speed);
        let c_d = next - a_d * area - b_d[0] * power - b_d[1] * speed;
        Linearization { a_d, b_d, c_d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_samples(n: usize) -> Vec<DynSample> {
        // A smooth nonlinear map with mild deterministic observation noise,
        // so the fitted hyperparameters stay well-conditioned.
        (0..n)
            .map(|i| {
                let area = 0.02 + 0.002 * (i % 7) as f64;
                let temp = 360.0 + 8.0 * (i % 5) as f64;
                let power = 200.0 + 10.0 * (i % 11) as f64;
                let speed = 700.0 + 20.0 * (i % 6) as f64;
                let next = 0.5 * area + 1e-4 * (power - 200.0) + 2e-5 * (temp - 360.0)
                    - 1e-5 * (speed - 700.0)
                    + 2e-8 * (power - 250.0) * (power - 250.0)
                    + 0.01
                    + 3e-4 * (7.0 * i as f64).sin();
                DynSample {
                    area_mm2: area,
                    temp_k: temp,
                    power_w: power,
                    speed_mm_s: speed,
                    next_area_mm2: next,
                }
            })
            .collect()
    }

    fn quick_cfg(seed: u64) -> TrainConfig {
        TrainConfig {
            opt: OptConfig {
                max_iters: 60,
                restarts: 2,
                seed,
                ..OptConfig::default()
            },
            ..TrainConfig::default()
        }
    }

    #[test]
    fn rollout_degenerate_horizons() {
        let model = train_dynamics(&synthetic_samples(40), &quick_cfg(1)).unwrap();
        let r = model.rollout(0.02, &[], &[]).unwrap();
        assert_eq!(r, vec![0.02]);
        let r = model.rollout(0.02, &[400.0], &[(250.0, 800.0)]).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1], model.predict_next(0.02, 400.0, 250.0, 800.0));
    }

    #[test]
    fn rollout_rejects_length_mismatch() {
        let model = train_dynamics(&synthetic_samples(40), &quick_cfg(1)).unwrap();
        assert!(matches!(
            model.rollout(0.02, &[400.0, 401.0], &[(250.0, 800.0)]),
            Err(DynError::LengthMismatch { temps: 2, inputs: 1 })
        ));
    }

    #[test]
    fn linearization_is_exact_at_the_expansion_point() {
        let model = train_dynamics(&synthetic_samples(40), &quick_cfg(2)).unwrap();
        for (x, t, p, v) in [
            (0.022, 380.0, 240.0, 760.0),
            (0.03, 365.0, 210.0, 820.0),
            (0.025, 390.0, 300.0, 700.0),
        ] {
            let lin = model.linearize(x, t, p, v);
            let local = lin.a_d * x + lin.b_d[0] * p + lin.b_d[1] * v + lin.c_d;
            let exact = model.predict_next(x, t, p, v);
            assert!(
                (local - exact).abs() <= 1e-12,
                "local {local} vs exact {exact}"
            );
        }
    }

    #[test]
    fn linearization_matches_finite_differences() {
        let model = train_dynamics(&synthetic_samples(40), &quick_cfg(3)).unwrap();
        let (x, t, p, v) = (0.024, 375.0, 255.0, 790.0);
        let lin = model.linearize(x, t, p, v);
        // Central differences at 1e-3 of each dimension's spread.
        let hx = 1e-3 * model.normalizer().input_std[0];
        let hp = 1e-3 * model.normalizer().input_std[2];
        let hv = 1e-3 * model.normalizer().input_std[3];
        let fd_a =
            (model.predict_next(x + hx, t, p, v) - model.predict_next(x - hx, t, p, v)) / (2.0 * hx);
        let fd_p = (model.predict_next(x, t, p + hp, v) - model.predict_next(x, t, p - hp, v))
            / (2.0 * hp);
        let fd_v = (model.predict_next(x, t, p, v + hv) - model.predict_next(x, t, p, v - hv))
            / (2.0 * hv);
        assert!((lin.a_d - fd_a).abs() / fd_a.abs().max(1e-9) < 1e-4, "a_d {} fd {fd_a}", lin.a_d);
        assert!((lin.b_d[0] - fd_p).abs() / fd_p.abs().max(1e-9) < 1e-4, "b_p {} fd {fd_p}", lin.b_d[0]);
        assert!((lin.b_d[1] - fd_v).abs() / fd_v.abs().max(1e-9) < 1e-4, "b_v {} fd {fd_v}", lin.b_d[1]);
    }

    #[test]
    fn prediction_composes_normalize_gp_denormalize() {
        let model = train_dynamics(&synthetic_samples(40), &quick_cfg(4)).unwrap();
        let raw = [0.026, 377.0, 262.0, 745.0];
        let z = model.normalizer().normalize_input(raw);
        let by_hand = model
            .normalizer()
            .denormalize_target(model.gp().predict(&z).unwrap().mean)
            .max(0.0);
        assert_eq!(model.predict_next(raw[0], raw[1], raw[2], raw[3]), by_hand);
    }

    #[test]
    fn far_inputs_revert_to_mean_training_target() {
        let samples = synthetic_samples(40);
        let model = train_dynamics(&samples, &quick_cfg(5)).unwrap();
        let mean_target =
            samples.iter().map(|s| s.next_area_mm2).sum::<f64>() / samples.len() as f64;
        let far = model.predict_next(10.0, 5000.0, 1e4, 1e5);
        assert!(
            (far - mean_target).abs() <= 1e-6 * mean_target.abs().max(1.0),
            "far prediction {far} vs mean target {mean_target}"
        );
    }

    #[test]
    fn training_is_deterministic_given_seed() {
        let samples = synthetic_samples(50);
        let a = train_dynamics(&samples, &quick_cfg(7)).unwrap();
        let b = train_dynamics(&samples, &quick_cfg(7)).unwrap();
        assert_eq!(a.gp().hyperparams(), b.gp().hyperparams());
    }
}
