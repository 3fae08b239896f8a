use serde::{Deserialize, Serialize};

use crate::sample::DynSample;
use crate::DynError;

const INPUT_NAMES: [&str; 4] = ["area", "temp", "power", "speed"];

/// Per-dimension standardization statistics for the 4 inputs and the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub input_mean: [f64; 4],
    pub input_std: [f64; 4],
    pub target_mean: f64,
    pub target_std: f64,
}

impl Normalizer {
    /// Fit means and (population) standard deviations on training samples.
    /// A dimension with zero spread is an error.
    pub fn fit(samples: &[DynSample]) -> Result<Self, DynError> {
        if samples.len() < 2 {
            return Err(DynError::NotEnoughSamples {
                needed: 2,
                got: samples.len(),
            });
        }
        let m = samples.len() as f64;
        let mut input_mean = [0.0; 4];
        let mut target_mean = 0.0;
        for s in samples {
            for (acc, v) in input_mean.iter_mut().zip(s.input()) {
                *acc += v;
            }
            target_mean += s.next_area_mm2;
        }
        input_mean.iter_mut().for_each(|v| *v /= m);
        target_mean /= m;

        let mut input_var = [0.0; 4];
        let mut target_var = 0.0;
        for s in samples {
            for (acc, (v, mu)) in input_var.iter_mut().zip(s.input().into_iter().zip(input_mean)) {
                *acc += (v - mu) * (v - mu);
            }
            target_var += (s.next_area_mm2 - target_mean) * (s.next_area_mm2 - target_mean);
        }
        let mut input_std = [0.0; 4];
        for d in 0..4 {
            input_std[d] = (input_var[d] / m).sqrt();
            if !(input_std[d] > 0.0) {
                return Err(DynError::DegenerateSpread(INPUT_NAMES[d]));
            }
        }
        let target_std = (target_var / m).sqrt();
        if !(target_std > 0.0) {
            return Err(DynError::DegenerateSpread("next_area"));
        }
        Ok(Normalizer {
            input_mean,
            input_std,
            target_mean,
            target_std,
        })
    }

    pub fn normalize_input(&self, raw: [f64; 4]) -> [f64; 4] {
        let mut z = [0.0; 4];
        for d in 0..4 {
            z[d] = (raw[d] - self.input_mean[d]) / self.input_std[d];
        }
        z
    }

    pub fn denormalize_input(&self, z: [f64; 4]) -> [f64; 4] {
        let mut raw = [0.0; 4];
        for d in 0..4 {
            raw[d] = z[d] * self.input_std[d] + self.input_mean[d];
        }
        raw
    }

    pub fn normalize_target(&self, y: f64) -> f64 {
        (y - self.target_mean) / self.target_std
    }

    pub fn denormalize_target(&self, z: f64) -> f64 {
        z * self.target_std + self.target_mean
    }
}
