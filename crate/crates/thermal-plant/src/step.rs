use crate::field::{BeamState, BoundaryMode, ThermalField};
use crate::params::{LaserParams, MaterialParams};
use crate::source::{axis_weights, depth_weights};
use crate::PlantError;

/// Stability margin on the explicit substep: `dt_sub <= 0.9 h^2 / (6 alpha)`.
const STABILITY_MARGIN: f64 = 0.9;
/// Lateral source cutoff in beam radii; the Gaussian is below 1e-26 beyond it.
const SOURCE_CUTOFF_RADII: f64 = 4.5;

/// Telemetry from one plant step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub substeps: usize,
    /// Energy summed over the discrete source, in joules.
    pub deposited_energy_j: f64,
}

/// Largest stable substep for the 7-point explicit stencil.
pub(crate) fn max_stable_dt(cell_size_m: f64, material: &MaterialParams) -> f64 {
    STABILITY_MARGIN * cell_size_m * cell_size_m / (6.0 * material.diffusivity_m2_s())
}

/// Advance conduction by `dt` seconds with automatic substepping and advance
/// the beam by `v dt` along its direction. Deterministic; errors if the beam
/// leaves the domain or the solve produces non-finite temperatures.
pub fn thermal_step(
    field: &mut ThermalField,
    beam: &mut BeamState,
    dt: f64,
    material: &MaterialParams,
    laser: &LaserParams,
) -> Result<StepStats, PlantError> {
    if !(dt > 0.0) {
        return Err(PlantError::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    material.validate()?;
    laser.validate()?;
    beam.validate()?;
    if !field.contains_mm(beam.position_mm[0], beam.position_mm[1]) {
        return Err(PlantError::BeamOutsideDomain {
            x_mm: beam.position_mm[0],
            y_mm: beam.position_mm[1],
        });
    }

    let h = field.cell_size_m();
    let n_sub = (dt / max_stable_dt(h, material)).ceil().max(1.0) as usize;
    let dt_sub = dt / n_sub as f64;
    let mut deposited = 0.0;

    for _ in 0..n_sub {
        diffuse(field, material, dt_sub);
        deposited += deposit_source(field, beam, material, laser, dt_sub);
        let step_mm = beam.speed_mm_s * dt_sub;
        beam.position_mm[0] += beam.direction[0] * step_mm;
        beam.position_mm[1] += beam.direction[1] * step_mm;
    }

    if !field.temps().iter().all(|t| t.is_finite()) {
        return Err(PlantError::UnstableSolve { step: 0 });
    }
    Ok(StepStats {
        substeps: n_sub,
        deposited_energy_j: deposited,
    })
}

/// One forward-Euler conduction substep. Insulated faces use zero-flux
/// ghosts (ghost equals the face node), which conserves the discrete
/// enthalpy exactly; Dirichlet nodes are pinned to ambient.
fn diffuse(field: &mut ThermalField, material: &MaterialParams, dt: f64) {
    let (nx, ny, nz) = field.dims();
    let h = field.cell_size_m();
    let r = material.diffusivity_m2_s() * dt / (h * h);
    let boundary = field.boundary();
    let ambient = material.ambient_temp_k;
    let sx = 1usize;
    let sy = nx;
    let sz = nx * ny;

    let (old, new) = field.update_buffers();

    // Interior nodes: branch-free 7-point update.
    for k in 1..nz.saturating_sub(1) {
        for j in 1..ny.saturating_sub(1) {
            let base = (k * ny + j) * nx;
            for i in 1..nx - 1 {
                let c = base + i;
                let tc = old[c];
                let lap = old[c - sx] + old[c + sx] + old[c - sy] + old[c + sy] + old[c - sz]
                    + old[c + sz]
                    - 6.0 * tc;
                new[c] = tc + r * lap;
            }
        }
    }

    // Boundary shells.
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let on_side = i == 0 || i == nx - 1 || j == 0 || j == ny - 1;
                let on_bottom = k == nz - 1;
                let on_top = k == 0;
                if !(on_side || on_bottom || on_top) {
                    continue;
                }
                let c = (k * ny + j) * nx + i;
                if boundary == BoundaryMode::SubstrateAmbient && (on_side || on_bottom) {
                    new[c] = ambient;
                    continue;
                }
                let tc = old[c];
                let mut lap = 0.0;
                if i > 0 {
                    lap += old[c - sx] - tc;
                }
                if i < nx - 1 {
                    lap += old[c + sx] - tc;
                }
                if j > 0 {
                    lap += old[c - sy] - tc;
                }
                if j < ny - 1 {
                    lap += old[c + sy] - tc;
                }
                if k > 0 {
                    lap += old[c - sz] - tc;
                }
                if k < nz - 1 {
                    lap += old[c + sz] - tc;
                }
                new[c] = tc + r * lap;
            }
        }
    }
}

/// Deposit the cell-integrated Gaussian source for one substep; returns the
/// deposited energy in joules. Power not covered by the domain (a clipped
/// tail) is dropped, matching what the grid can represent.
fn deposit_source(
    field: &mut ThermalField,
    beam: &BeamState,
    material: &MaterialParams,
    laser: &LaserParams,
    dt: f64,
) -> f64 {
    if beam.power_w <= 0.0 {
        return 0.0;
    }
    let (nx, ny, nz) = field.dims();
    let h = field.cell_size_m();
    let rs = laser.beam_radius_m();
    let c = laser.penetration_depth_m();
    let origin = [field.origin_mm()[0] * 1e-3, field.origin_mm()[1] * 1e-3];
    let bx = beam.position_mm[0] * 1e-3;
    let by = beam.position_mm[1] * 1e-3;
    let cutoff = SOURCE_CUTOFF_RADII * rs;

    let (i0, wx) = axis_weights(|i| origin[0] + i as f64 * h, nx, bx, h, rs, cutoff);
    let (j0, wy) = axis_weights(|j| origin[1] + j as f64 * h, ny, by, h, rs, cutoff);
    let wz = depth_weights(nz, h, c, 6.0 * c);
    if wx.is_empty() || wy.is_empty() || wz.is_empty() {
        return 0.0;
    }

    let absorbed = laser.absorptivity * beam.power_w;
    let heat_capacity = material.density_kg_m3 * material.specific_heat_j_kg_k * h * h * h;
    let mut deposited_power = 0.0;
    let temps = field.temps_mut();
    for (dk, wzk) in wz.iter().enumerate() {
        for (dj, wyj) in wy.iter().enumerate() {
            let row = (dk * ny + j0 + dj) * nx + i0;
            for (di, wxi) in wx.iter().enumerate() {
                let p_node = absorbed * wxi * wyj * wzk;
                temps[row + di] += p_node * dt / heat_capacity;
                deposited_power += p_node;
            }
        }
    }
    deposited_power * dt
}
