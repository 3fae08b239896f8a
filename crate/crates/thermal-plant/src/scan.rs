use serde::{Deserialize, Serialize};

use scan_datagen::ScanPlan;

use crate::field::{BeamState, BoundaryMode, ThermalField};
use crate::params::{LaserParams, MaterialParams};
use crate::sensors::melt_area;
use crate::step::thermal_step;
use crate::PlantError;

/// Grid sizing around the scan tracks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub cell_size_um: f64,
    pub margin_x_mm: f64,
    pub margin_y_mm: f64,
    pub depth_mm: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        // 20 um cells: the steady melt pool is ~10-20 um deep, and coarser
        // grids leave its area dominated by sub-cell interpolation.
        GridConfig {
            cell_size_um: 20.0,
            margin_x_mm: 1.0,
            margin_y_mm: 0.65,
            depth_mm: 0.8,
        }
    }
}

/// Plant configuration for one scan run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid: GridConfig,
    pub material: MaterialParams,
    pub laser: LaserParams,
    pub boundary: BoundaryMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            grid: GridConfig::default(),
            material: MaterialParams::default(),
            laser: LaserParams::default(),
            boundary: BoundaryMode::SubstrateAmbient,
        }
    }
}

/// One sample of the plant state and the input applied over the following
/// sampling interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub time_s: f64,
    pub x_mm: f64,
    pub y_mm: f64,
    pub power_w: f64,
    pub speed_mm_s: f64,
    pub melt_area_mm2: f64,
    pub lookahead_t_k: f64,
    /// True when the lookahead sample point fell outside the domain and was
    /// clamped to the boundary. Not part of the CSV schema.
    #[serde(default)]
    pub lookahead_clamped: bool,
}

/// Position reached by walking `dist_mm` along the scan path starting from
/// `dist_along` on track `track_idx`; follows subsequent tracks so the
/// lookahead sensor sees the next laser spot across transitions.
fn path_position(plan: &ScanPlan, track_idx: usize, dist_along: f64, dist_mm: f64) -> [f64; 2] {
    let mut idx = track_idx;
    let mut along = dist_along + dist_mm;
    loop {
        let track = &plan.tracks[idx];
        let len = track.length_mm();
        if along <= len || idx + 1 >= plan.tracks.len() {
            let along_capped = along.min(len);
            let dir = track.direction();
            return [
                track.start_mm[0] + dir[0] * along_capped,
                track.start_mm[1] + dir[1] * along_capped,
            ];
        }
        along -= len;
        idx += 1;
    }
}

/// Build the plant field sized for a plan.
pub fn field_for_plan(plan: &ScanPlan, sim: &SimConfig) -> Result<ThermalField, PlantError> {
    let (lo, hi) = plan.bounds_mm();
    let min_margin_mm = 5.0 * sim.laser.beam_radius_um * 1e-3;
    if sim.grid.margin_x_mm < min_margin_mm || sim.grid.margin_y_mm < min_margin_mm {
        return Err(PlantError::DomainTooSmall(format!(
            "margins ({}, {}) mm below the 5 r_s minimum {} mm",
            sim.grid.margin_x_mm, sim.grid.margin_y_mm, min_margin_mm
        )));
    }
    let extents = [
        hi[0] - lo[0] + 2.0 * sim.grid.margin_x_mm,
        hi[1] - lo[1] + 2.0 * sim.grid.margin_y_mm,
        sim.grid.depth_mm,
    ];
    let origin = [lo[0] - sim.grid.margin_x_mm, lo[1] - sim.grid.margin_y_mm];
    ThermalField::uniform(
        sim.grid.cell_size_um,
        extents,
        origin,
        sim.material.ambient_temp_k,
        sim.boundary,
    )
}

/// Execute a scan plan at the plan's sample period.
///
/// Each step measures the melt area and lookahead temperature, queries the
/// controller (when present) with `(k, x_k, T_k)` for `(power, speed)` --
/// clamped to the plan's waveform bounds -- or evaluates the plan waveforms,
/// records the step, then advances the plant by one sampling interval.
/// A controller error aborts the run; the partial log rides in the error.
pub fn run_scan(
    plan: &ScanPlan,
    controller: Option<&mut dyn FnMut(usize, f64, f64) -> Result<(f64, f64), String>>,
    sim: &SimConfig,
) -> Result<Vec<StepRecord>, PlantError> {
    run_scan_full(plan, controller, sim).map(|(records, _)| records)
}

/// [`run_scan`] that also returns the final temperature field.
pub fn run_scan_full(
    plan: &ScanPlan,
    mut controller: Option<&mut dyn FnMut(usize, f64, f64) -> Result<(f64, f64), String>>,
    sim: &SimConfig,
) -> Result<(Vec<StepRecord>, ThermalField), PlantError> {
    plan.validate()
        .map_err(|e| PlantError::InvalidParameter(e.to_string()))?;
    sim.material.validate()?;
    sim.laser.validate()?;
    let mut field = field_for_plan(plan, sim)?;
    let dt = plan.sample_period_s;
    let mut records: Vec<StepRecord> = Vec::new();
    let mut time_s = 0.0;
    let mut step = 0usize;

    for (track_idx, track) in plan.tracks.iter().enumerate() {
        let dir = track.direction();
        let len = track.length_mm();
        let mut along = 0.0f64;
        let mut beam = BeamState {
            position_mm: track.start_mm,
            direction: dir,
            power_w: 0.0,
            speed_mm_s: plan.speed.eval(time_s),
        };
        while along < len - 1e-9 {
            let x_k = melt_area(&field, &beam, sim.material.melt_temp_k, sim.laser.beam_radius_um * 1e-3)?;
            let plan_speed = plan.speed.eval(time_s);
            let look_dist = plan_speed * dt + sim.laser.beam_radius_um * 1e-3;
            let look_pos = path_position(plan, track_idx, along, look_dist);
            let (t_k, clamped) = field.surface_temp_at(look_pos[0], look_pos[1]);

            let (power, speed) = match controller.as_deref_mut() {
                Some(cb) => {
                    let (p, v) = cb(step, x_k, t_k).map_err(|message| {
                        PlantError::ControllerAborted {
                            step,
                            message,
                            partial: records.clone(),
                        }
                    })?;
                    (
                        p.clamp(plan.power.clamp_min, plan.power.clamp_max),
                        v.clamp(plan.speed.clamp_min, plan.speed.clamp_max),
                    )
                }
                None => (plan.power.eval(time_s), plan_speed),
            };

            records.push(StepRecord {
                step,
                time_s,
                x_mm: beam.position_mm[0],
                y_mm: beam.position_mm[1],
                power_w: power,
                speed_mm_s: speed,
                melt_area_mm2: x_k,
                lookahead_t_k: t_k,
                lookahead_clamped: clamped,
            });

            beam.power_w = power;
            beam.speed_mm_s = speed;
            thermal_step(&mut field, &mut beam, dt, &sim.material, &sim.laser).map_err(
                |e| match e {
                    PlantError::UnstableSolve { .. } => PlantError::UnstableSolve { step },
                    other => other,
                },
            )?;
            along += speed * dt;
            time_s += dt;
            step += 1;
        }
    }
    Ok((records, field))
}
