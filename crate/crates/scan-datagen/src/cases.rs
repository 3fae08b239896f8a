use serde::{Deserialize, Serialize};

use crate::{DatagenError, ScanPlan, Waveform};

pub const NUM_CASES: usize = 9;

/// Shared parameters for the nine-case training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseDefaults {
    pub power_w: f64,
    pub speed_mm_s: f64,
    pub track_length_mm: f64,
    pub hatch_mm: f64,
    pub sample_period_s: f64,
    pub origin_mm: [f64; 2],
    pub power_clamp_w: (f64, f64),
    pub speed_clamp_mm_s: (f64, f64),
    /// Sinusoidal power: amplitude (W) and frequency (Hz).
    pub power_sin: (f64, f64),
    /// Sinusoidal speed: amplitude (mm/s) and frequency (Hz).
    pub speed_sin: (f64, f64),
    /// Profile power/speed excursion amplitudes.
    pub power_profile_amp_w: f64,
    pub speed_profile_amp_mm_s: f64,
    /// Base seed; per-case profile seeds are derived from it.
    pub seed: u64,
}

impl Default for CaseDefaults {
    fn default() -> Self {
        CaseDefaults {
            power_w: 250.0,
            speed_mm_s: 800.0,
            track_length_mm: 5.0,
            hatch_mm: 0.1,
            sample_period_s: 50e-6,
            origin_mm: [0.0, 0.0],
            power_clamp_w: (0.0, 350.0),
            speed_clamp_mm_s: (400.0, 1200.0),
            power_sin: (50.0, 500.0),
            speed_sin: (200.0, 300.0),
            power_profile_amp_w: 60.0,
            speed_profile_amp_mm_s: 250.0,
            seed: 0,
        }
    }
}

impl CaseDefaults {
    fn profile_seed(&self, case_id: usize, channel: u64) -> u64 {
        self.seed
            .wrapping_mul(1_000_003)
            .wrapping_add(case_id as u64 * 16 + channel)
    }
}

/// Build one of the nine training scan plans.
///
/// Cases 1-4 are single 5 mm tracks with constant/sinusoidal power and speed
/// combinations; 5-7 are constant double tracks at hatch 0.1/0.15/0.05 mm;
/// 8 pairs sinusoidal power with a seeded speed profile; 9 uses seeded
/// profiles on both channels.
pub fn make_case(case_id: usize, defaults: &CaseDefaults) -> Result<ScanPlan, DatagenError> {
    let d = defaults;
    let p_const = Waveform::constant(d.power_w, d.power_clamp_w);
    let v_const = Waveform::constant(d.speed_mm_s, d.speed_clamp_mm_s);
    let p_sin = Waveform::sinusoid(d.power_w, d.power_sin.0, d.power_sin.1, d.power_clamp_w);
    let v_sin = Waveform::sinusoid(
        d.speed_mm_s,
        d.speed_sin.0,
        d.speed_sin.1,
        d.speed_clamp_mm_s,
    );
    let p_profile = |case: usize| {
        Waveform::seeded_profile(
            d.power_w,
            d.power_profile_amp_w,
            d.profile_seed(case, 0),
            d.power_clamp_w,
        )
    };
    let v_profile = |case: usize| {
        Waveform::seeded_profile(
            d.speed_mm_s,
            d.speed_profile_amp_mm_s,
            d.profile_seed(case, 1),
            d.speed_clamp_mm_s,
        )
    };

    let (n_tracks, hatch, power, speed) = match case_id {
        1 => (1, d.hatch_mm, p_const, v_const),
        2 => (1, d.hatch_mm, p_sin, v_const),
        3 => (1, d.hatch_mm, p_const, v_sin),
        4 => (1, d.hatch_mm, p_sin, v_sin),
        5 => (2, 0.1, p_const, v_const),
        6 => (2, 0.15, p_const, v_const),
        7 => (2, 0.05, p_const, v_const),
        8 => (2, 0.1, p_sin, v_profile(8)),
        9 => (2, 0.1, p_profile(9), v_profile(9)),
        _ => return Err(DatagenError::InvalidCaseId(case_id)),
    };

    ScanPlan::parallel_tracks(
        d.origin_mm,
        d.track_length_mm,
        n_tracks,
        hatch,
        true,
        power,
        speed,
        d.sample_period_s,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::WaveformKind;

    #[test]
    fn case_1_is_constant_single_track() {
        let p = make_case(1, &CaseDefaults::default()).unwrap();
        assert_eq!(p.tracks.len(), 1);
        assert_eq!(p.power.kind, WaveformKind::Constant);
        assert_eq!(p.power.base, 250.0);
        assert_eq!(p.speed.kind, WaveformKind::Constant);
        assert_eq!(p.speed.base, 800.0);
        assert!((p.tracks[0].length_mm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn case_4_is_doubly_sinusoidal_single_track() {
        let p = make_case(4, &CaseDefaults::default()).unwrap();
        assert_eq!(p.tracks.len(), 1);
        assert_eq!(p.power.kind, WaveformKind::Sinusoid);
        assert_eq!(p.speed.kind, WaveformKind::Sinusoid);
    }

    #[test]
    fn case_7_is_double_track_tight_hatch() {
        let p = make_case(7, &CaseDefaults::default()).unwrap();
        assert_eq!(p.tracks.len(), 2);
        assert!((p.hatch_mm - 0.05).abs() < 1e-12);
    }

    #[test]
    fn hatch_variants_match_table() {
        let d = CaseDefaults::default();
        assert!((make_case(5, &d).unwrap().hatch_mm - 0.1).abs() < 1e-12);
        assert!((make_case(6, &d).unwrap().hatch_mm - 0.15).abs() < 1e-12);
    }

    #[test]
    fn case_generation_is_pure() {
        let d = CaseDefaults::default();
        for id in 1..=NUM_CASES {
            assert_eq!(make_case(id, &d).unwrap(), make_case(id, &d).unwrap());
        }
    }

    #[test]
    fn rejects_out_of_range_ids() {
        let d = CaseDefaults::default();
        assert!(matches!(make_case(0, &d), Err(DatagenError::InvalidCaseId(0))));
        assert!(matches!(make_case(10, &d), Err(DatagenError::InvalidCaseId(10))));
    }
}
