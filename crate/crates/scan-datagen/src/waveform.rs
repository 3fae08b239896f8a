use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::DatagenError;

const PROFILE_COMPONENTS: usize = 4;
const PROFILE_FREQ_RANGE_HZ: (f64, f64) = (100.0, 1000.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveformKind {
    Constant,
    Sinusoid,
    SeededProfile,
}

/// A scalar command waveform: constant, sinusoid, or a seeded band-limited
/// profile. Evaluated values are always clamped to `[clamp_min, clamp_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub kind: WaveformKind,
    pub base: f64,
    pub amplitude: f64,
    pub frequency_hz: f64,
    pub seed: u64,
    pub clamp_min: f64,
    pub clamp_max: f64,
}

impl Waveform {
    pub fn constant(base: f64, clamp: (f64, f64)) -> Self {
        Waveform {
            kind: WaveformKind::Constant,
            base,
            amplitude: 0.0,
            frequency_hz: 0.0,
            seed: 0,
            clamp_min: clamp.0,
            clamp_max: clamp.1,
        }
    }

    pub fn sinusoid(base: f64, amplitude: f64, frequency_hz: f64, clamp: (f64, f64)) -> Self {
        Waveform {
            kind: WaveformKind::Sinusoid,
            base,
            amplitude,
            frequency_hz,
            seed: 0,
            clamp_min: clamp.0,
            clamp_max: clamp.1,
        }
    }

    pub fn seeded_profile(base: f64, amplitude: f64, seed: u64, clamp: (f64, f64)) -> Self {
        Waveform {
            kind: WaveformKind::SeededProfile,
            base,
            amplitude,
            frequency_hz: 0.0,
            seed,
            clamp_min: clamp.0,
            clamp_max: clamp.1,
        }
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        if !(self.clamp_min <= self.clamp_max) {
            return Err(DatagenError::InvalidWaveform(format!(
                "clamp bounds inverted: [{}, {}]",
                self.clamp_min, self.clamp_max
            )));
        }
        let fields = [self.base, self.amplitude, self.frequency_hz];
        if !fields.iter().all(|v| v.is_finite()) {
            return Err(DatagenError::InvalidWaveform("non-finite field".into()));
        }
        Ok(())
    }

    /// Evaluate at time `t` seconds. Deterministic: seeded-profile components
    /// are re-derived from the seed on every call.
    pub fn eval(&self, t: f64) -> f64 {
        let raw = match self.kind {
            WaveformKind::Constant => self.base,
            WaveformKind::Sinusoid => {
                self.base
                    + self.amplitude * (2.0 * std::f64::consts::PI * self.frequency_hz * t).sin()
            }
            WaveformKind::SeededProfile => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut s = 0.0;
                for _ in 0..PROFILE_COMPONENTS {
                    let f = rng.gen_range(PROFILE_FREQ_RANGE_HZ.0..PROFILE_FREQ_RANGE_HZ.1);
                    let phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                    s += (2.0 * std::f64::consts::PI * f * t + phase).sin();
                }
                self.base + self.amplitude * s / PROFILE_COMPONENTS as f64
            }
        };
        raw.clamp(self.clamp_min, self.clamp_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_returns_base_everywhere() {
        let w = Waveform::constant(250.0, (0.0, 350.0));
        for t in [0.0, 1e-5, 0.3, 7.0] {
            assert_eq!(w.eval(t), 250.0);
        }
    }

    #[test]
    fn sinusoid_starts_at_base() {
        let w = Waveform::sinusoid(250.0, 50.0, 500.0, (0.0, 350.0));
        assert_relative_eq!(w.eval(0.0), 250.0, max_relative = 1e-15);
        // Quarter period of 500 Hz: peak.
        assert_relative_eq!(w.eval(0.0005), 300.0, max_relative = 1e-9);
    }

    #[test]
    fn seeded_profile_is_reproducible() {
        let w = Waveform::seeded_profile(800.0, 200.0, 42, (400.0, 1200.0));
        let a: Vec<f64> = (0..50).map(|i| w.eval(i as f64 * 5e-5)).collect();
        let b: Vec<f64> = (0..50).map(|i| w.eval(i as f64 * 5e-5)).collect();
        assert_eq!(a, b);
        // Different seeds give different curves.
        let w2 = Waveform::seeded_profile(800.0, 200.0, 43, (400.0, 1200.0));
        assert!(a.iter().enumerate().any(|(i, v)| (v - w2.eval(i as f64 * 5e-5)).abs() > 1e-9));
    }

    #[test]
    fn profile_moves_away_from_base() {
        let w = Waveform::seeded_profile(250.0, 50.0, 7, (0.0, 350.0));
        let spread = (0..200)
            .map(|i| (w.eval(i as f64 * 5e-5) - 250.0).abs())
            .fold(0.0f64, f64::max);
        assert!(spread > 5.0, "profile barely deviates: {spread}");
    }
}
