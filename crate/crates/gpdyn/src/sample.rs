use serde::{Deserialize, Serialize};
use thermal_plant::StepRecord;

use crate::DynError;

/// One state transition: plant state and inputs at step k, area at k+1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynSample {
    pub area_mm2: f64,
    pub temp_k: f64,
    pub power_w: f64,
    pub speed_mm_s: f64,
    pub next_area_mm2: f64,
}

impl DynSample {
    /// Canonical GP input order.
    pub fn input(&self) -> [f64; 4] {
        [self.area_mm2, self.temp_k, self.power_w, self.speed_mm_s]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SampleOptions {
    /// Drop pairs whose records lie on different tracks (detected by a jump
    /// in the cross-scan coordinate).
    pub exclude_track_transitions: bool,
}

/// Pair consecutive records into transitions. Transition pairs are retained
/// by default; see [`build_samples_with`] to drop them.
pub fn build_samples(log: &[StepRecord]) -> Result<Vec<DynSample>, DynError> {
    build_samples_with(log, SampleOptions::default())
}

pub fn build_samples_with(
    log: &[StepRecord],
    opts: SampleOptions,
) -> Result<Vec<DynSample>, DynError> {
    if log.len() < 2 {
        return Ok(Vec::new());
    }
    let period = log[1].time_s - log[0].time_s;
    for i in 1..log.len() {
        if log[i].time_s <= log[i - 1].time_s || log[i].step <= log[i - 1].step {
            return Err(DynError::UnorderedLog(i));
        }
        let dt = log[i].time_s - log[i - 1].time_s;
        if (dt - period).abs() > 1e-9 * period.max(1e-12) {
            return Err(DynError::MixedPeriod {
                a: period,
                b: dt,
                at: i,
            });
        }
    }
    let mut samples = Vec::with_capacity(log.len() - 1);
    for pair in log.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if opts.exclude_track_transitions {
            // Tracks run parallel to an axis; a jump in either coordinate
            // larger than one step of travel marks a transition.
            let step_mm = a.speed_mm_s * period * 1.5 + 1e-9;
            let jump = (b.x_mm - a.x_mm).hypot(b.y_mm - a.y_mm);
            if jump > step_mm {
                continue;
            }
        }
        samples.push(DynSample {
            area_mm2: a.melt_area_mm2,
            temp_k: a.lookahead_t_k,
            power_w: a.power_w,
            speed_mm_s: a.speed_mm_s,
            next_area_mm2: b.melt_area_mm2,
        });
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(step: usize, time_s: f64, x_mm: f64, y_mm: f64, area: f64) -> StepRecord {
        StepRecord {
            step,
            time_s,
            x_mm,
            y_mm,
            power_w: 250.0,
            speed_mm_s: 800.0,
            melt_area_mm2: area,
            lookahead_t_k: 400.0,
            lookahead_clamped: false,
        }
    }

    #[test]
    fn three_records_make_two_samples() {
        let log = vec![
            record(0, 0.0, 0.0, 0.0, 0.1),
            record(1, 5e-5, 0.04, 0.0, 0.2),
            record(2, 1e-4, 0.08, 0.0, 0.3),
        ];
        let s = build_samples(&log).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].area_mm2, 0.1);
        assert_eq!(s[0].next_area_mm2, 0.2);
        assert_eq!(s[1].area_mm2, 0.2);
        assert_eq!(s[1].next_area_mm2, 0.3);
    }

    #[test]
    fn degenerate_logs_yield_empty_sequences() {
        assert!(build_samples(&[]).unwrap().is_empty());
        assert!(build_samples(&[record(0, 0.0, 0.0, 0.0, 0.1)]).unwrap().is_empty());
    }

    #[test]
    fn rejects_unordered_and_mixed_period_logs() {
        let log = vec![
            record(0, 0.0, 0.0, 0.0, 0.1),
            record(1, -1e-5, 0.04, 0.0, 0.2),
        ];
        assert!(matches!(build_samples(&log), Err(DynError::UnorderedLog(1))));
        let log = vec![
            record(0, 0.0, 0.0, 0.0, 0.1),
            record(1, 5e-5, 0.04, 0.0, 0.2),
            record(2, 2e-4, 0.08, 0.0, 0.3),
        ];
        assert!(matches!(build_samples(&log), Err(DynError::MixedPeriod { .. })));
    }

    #[test]
    fn transition_pairs_are_kept_by_default_and_droppable() {
        let log = vec![
            record(0, 0.0, 4.96, 0.0, 0.1),
            record(1, 5e-5, 5.0, 0.0, 0.2),
            // Jump to the next track: y moves by the hatch.
            record(2, 1e-4, 5.0, 0.1, 0.3),
            record(3, 1.5e-4, 4.96, 0.1, 0.4),
        ];
        let all = build_samples(&log).unwrap();
        assert_eq!(all.len(), 3);
        let filtered = build_samples_with(
            &log,
            SampleOptions {
                exclude_track_transitions: true,
            },
        )
        .unwrap();
        assert_eq!(filtered.len(), 2);
    }
}
