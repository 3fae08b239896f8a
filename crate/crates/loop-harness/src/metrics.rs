use std::ops::Range;

use serde::{Deserialize, Serialize};

use thermal_plant::StepRecord;

use crate::HarnessError;

/// Control performance summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    /// Peak excess above the set point, percent of the set point.
    pub max_overshoot_pct: f64,
    /// Peak dip below the set point, percent of the set point.
    pub max_undershoot_pct: f64,
    /// RMS tracking error over the steady windows, percent of the set point.
    pub steady_rmse_pct: f64,
}

/// Step-index windows the metrics are evaluated over.
#[derive(Debug, Clone, Default)]
pub struct MetricsWindows {
    /// Overshoot/undershoot search windows.
    pub peak: Vec<Range<usize>>,
    /// Steady-state RMSE windows (start-up transients excluded).
    pub steady: Vec<Range<usize>>,
}

/// Overshoot, undershoot and steady-state RMSE of an area series against a
/// set point. Overshoot and undershoot use the excess convention
/// `(extreme - set point) / set point` and clamp at zero.
pub fn compute_metrics(
    series: &[f64],
    x_ref: f64,
    windows: &MetricsWindows,
) -> Result<RunMetrics, HarnessError> {
    if series.is_empty() {
        return Err(HarnessError::EmptySeries);
    }
    if !(x_ref > 0.0) {
        return Err(HarnessError::InvalidSetPoint(x_ref));
    }
    let mut max_val = f64::NEG_INFINITY;
    let mut min_val = f64::INFINITY;
    for w in &windows.peak {
        for i in w.clone() {
            if let Some(v) = series.get(i) {
                max_val = max_val.max(*v);
                min_val = min_val.min(*v);
            }
        }
    }
    let (overshoot, undershoot) = if max_val.is_finite() {
        (
            ((max_val - x_ref) / x_ref * 100.0).max(0.0),
            ((x_ref - min_val) / x_ref * 100.0).max(0.0),
        )
    } else {
        (0.0, 0.0)
    };

    let mut sq_sum = 0.0;
    let mut n = 0usize;
    for w in &windows.steady {
        for i in w.clone() {
            if let Some(v) = series.get(i) {
                sq_sum += (v - x_ref) * (v - x_ref);
                n += 1;
            }
        }
    }
    let rmse = if n > 0 {
        (sq_sum / n as f64).sqrt() / x_ref * 100.0
    } else {
        0.0
    };
    Ok(RunMetrics {
        max_overshoot_pct: overshoot,
        max_undershoot_pct: undershoot,
        steady_rmse_pct: rmse,
    })
}

/// Step-index range of each track in a scan log, detected from jumps in the
/// cross-scan coordinate or direction reversals.
pub fn track_ranges(records: &[StepRecord]) -> Vec<Range<usize>> {
    let mut ranges = Vec::new();
    if records.is_empty() {
        return ranges;
    }
    let mut start = 0usize;
    for i in 1..records.len() {
        let dt = records[i].time_s - records[i - 1].time_s;
        let step_mm = records[i - 1].speed_mm_s * dt * 1.5 + 1e-9;
        let jump = (records[i].x_mm - records[i - 1].x_mm)
            .hypot(records[i].y_mm - records[i - 1].y_mm);
        if jump > step_mm {
            ranges.push(start..i);
            start = i;
        }
    }
    ranges.push(start..records.len());
    ranges
}

/// Default windows for a run: steady RMSE excludes the first
/// `startup_exclusion_s` of every track; peaks are searched from the end of
/// the first track's start-up to the end of the run.
pub fn default_windows(
    records: &[StepRecord],
    sample_period_s: f64,
    startup_exclusion_s: f64,
) -> MetricsWindows {
    let skip = (startup_exclusion_s / sample_period_s).ceil() as usize;
    let tracks = track_ranges(records);
    let mut windows = MetricsWindows::default();
    for r in &tracks {
        let s = (r.start + skip).min(r.end);
        windows.steady.push(s..r.end);
    }
    if let Some(first) = tracks.first() {
        let peak_start = (first.start + skip).min(records.len());
        windows.peak.push(peak_start..records.len());
    }
    windows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_windows(n: usize) -> MetricsWindows {
        MetricsWindows {
            peak: vec![0..n],
            steady: vec![0..n],
        }
    }

    #[test]
    fn constant_series_at_set_point_scores_zero() {
        let series = vec![0.09; 50];
        let m = compute_metrics(&series, 0.09, &full_windows(50)).unwrap();
        assert_eq!(m.max_overshoot_pct, 0.0);
        assert_eq!(m.max_undershoot_pct, 0.0);
        assert_eq!(m.steady_rmse_pct, 0.0);
    }

    #[test]
    fn excess_convention_matches_reference_value() {
        // Peak 0.117 against set point 0.09 is a 30% overshoot.
        let mut series = vec![0.09; 20];
        series[7] = 0.117;
        let m = compute_metrics(&series, 0.09, &full_windows(20)).unwrap();
        assert!((m.max_overshoot_pct - 30.0).abs() < 1e-9, "{}", m.max_overshoot_pct);
    }

    #[test]
    fn constant_offset_rmse_is_the_relative_offset() {
        let series = vec![0.09 + 0.009; 40];
        let m = compute_metrics(&series, 0.09, &full_windows(40)).unwrap();
        assert!((m.steady_rmse_pct - 10.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_empty_series_and_bad_set_point() {
        assert!(matches!(
            compute_metrics(&[], 0.09, &MetricsWindows::default()),
            Err(HarnessError::EmptySeries)
        ));
        assert!(matches!(
            compute_metrics(&[0.1], 0.0, &MetricsWindows::default()),
            Err(HarnessError::InvalidSetPoint(_))
        ));
    }

    #[test]
    fn windows_restrict_the_measurement() {
        let mut series = vec![0.09; 30];
        series[2] = 0.2; // inside the excluded start-up
        let windows = MetricsWindows {
            peak: vec![5..30],
            steady: vec![5..30],
        };
        let m = compute_metrics(&series, 0.09, &windows).unwrap();
        assert_eq!(m.max_overshoot_pct, 0.0);
    }
}
