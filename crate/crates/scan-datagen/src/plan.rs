use serde::{Deserialize, Serialize};

use crate::{DatagenError, Waveform};

/// One straight scan segment in millimetres on the top surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub start_mm: [f64; 2],
    pub end_mm: [f64; 2],
}

impl Track {
    pub fn length_mm(&self) -> f64 {
        let dx = self.end_mm[0] - self.start_mm[0];
        let dy = self.end_mm[1] - self.start_mm[1];
        (dx * dx + dy * dy).sqrt()
    }

    /// Unit scan direction.
    pub fn direction(&self) -> [f64; 2] {
        let len = self.length_mm();
        [
            (self.end_mm[0] - self.start_mm[0]) / len,
            (self.end_mm[1] - self.start_mm[1]) / len,
        ]
    }
}

/// A complete scan experiment: track geometry plus power and speed commands
/// sampled at `sample_period_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPlan {
    pub schema_version: u32,
    pub tracks: Vec<Track>,
    pub hatch_mm: f64,
    pub bidirectional: bool,
    pub power: Waveform,
    pub speed: Waveform,
    pub sample_period_s: f64,
}

pub const PLAN_SCHEMA_VERSION: u32 = 1;

impl ScanPlan {
    /// Parallel tracks along +x starting at `origin_mm`, offset by `hatch_mm`
    /// in +y, alternating direction when `bidirectional`.
    pub fn parallel_tracks(
        origin_mm: [f64; 2],
        track_length_mm: f64,
        n_tracks: usize,
        hatch_mm: f64,
        bidirectional: bool,
        power: Waveform,
        speed: Waveform,
        sample_period_s: f64,
    ) -> Result<Self, DatagenError> {
        if n_tracks == 0 {
            return Err(DatagenError::InvalidPlan("plan needs at least one track".into()));
        }
        let mut tracks = Vec::with_capacity(n_tracks);
        for i in 0..n_tracks {
            let y = origin_mm[1] + i as f64 * hatch_mm;
            let (x0, x1) = if bidirectional && i % 2 == 1 {
                (origin_mm[0] + track_length_mm, origin_mm[0])
            } else {
                (origin_mm[0], origin_mm[0] + track_length_mm)
            };
            tracks.push(Track {
                start_mm: [x0, y],
                end_mm: [x1, y],
            });
        }
        let plan = ScanPlan {
            schema_version: PLAN_SCHEMA_VERSION,
            tracks,
            hatch_mm,
            bidirectional,
            power,
            speed,
            sample_period_s,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        if self.tracks.is_empty() {
            return Err(DatagenError::InvalidPlan("no tracks".into()));
        }
        if !(self.sample_period_s > 0.0) {
            return Err(DatagenError::InvalidPlan(format!(
                "sample period must be > 0, got {}",
                self.sample_period_s
            )));
        }
        for (i, t) in self.tracks.iter().enumerate() {
            if !(t.length_mm() > 0.0) {
                return Err(DatagenError::InvalidPlan(format!("track {i} has zero length")));
            }
        }
        if self.tracks.len() > 1 {
            if !(self.hatch_mm > 0.0) {
                return Err(DatagenError::InvalidPlan(
                    "multi-track plan needs hatch > 0".into(),
                ));
            }
            for i in 1..self.tracks.len() {
                let spacing = (self.tracks[i].start_mm[1] - self.tracks[i - 1].start_mm[1]).abs();
                if (spacing - self.hatch_mm).abs() > 1e-9 {
                    return Err(DatagenError::InvalidPlan(format!(
                        "tracks {} and {} are {spacing} mm apart, hatch is {}",
                        i - 1,
                        i,
                        self.hatch_mm
                    )));
                }
            }
        }
        self.power.validate()?;
        self.speed.validate()?;
        Ok(())
    }

    /// Total path length in millimetres.
    pub fn total_length_mm(&self) -> f64 {
        self.tracks.iter().map(Track::length_mm).sum()
    }

    /// Bounding box of all track endpoints: `([x_min, y_min], [x_max, y_max])`.
    pub fn bounds_mm(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for t in &self.tracks {
            for p in [t.start_mm, t.end_mm] {
                for d in 0..2 {
                    lo[d] = lo[d].min(p[d]);
                    hi[d] = hi[d].max(p[d]);
                }
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(n: usize, hatch: f64, bidir: bool) -> ScanPlan {
        ScanPlan::parallel_tracks(
            [0.0, 0.0],
            5.0,
            n,
            hatch,
            bidir,
            Waveform::constant(250.0, (0.0, 350.0)),
            Waveform::constant(800.0, (400.0, 1200.0)),
            50e-6,
        )
        .unwrap()
    }

    #[test]
    fn parallel_tracks_alternate_direction_when_bidirectional() {
        let p = plan(3, 0.1, true);
        assert_eq!(p.tracks[0].direction(), [1.0, 0.0]);
        assert_eq!(p.tracks[1].direction(), [-1.0, 0.0]);
        assert_eq!(p.tracks[2].direction(), [1.0, 0.0]);
    }

    #[test]
    fn consecutive_spacing_equals_hatch() {
        let p = plan(4, 0.15, true);
        for i in 1..4 {
            let gap = p.tracks[i].start_mm[1] - p.tracks[i - 1].start_mm[1];
            assert!((gap - 0.15).abs() < 1e-12);
        }
    }

    #[test]
    fn validate_rejects_wrong_spacing() {
        let mut p = plan(2, 0.1, true);
        p.tracks[1].start_mm[1] = 0.2;
        p.tracks[1].end_mm[1] = 0.2;
        assert!(p.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = plan(2, 0.1, true);
        let text = serde_json::to_string(&p).unwrap();
        let q: ScanPlan = serde_json::from_str(&text).unwrap();
        assert_eq!(p, q);
    }
}
