use serde::{Deserialize, Serialize};

use crate::PlantError;

/// Boundary treatment of the fixed grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryMode {
    /// Top surface adiabatic; sides and bottom held at ambient to emulate a
    /// large substrate.
    SubstrateAmbient,
    /// Zero flux through every face; used for conservation checks.
    AllInsulated,
}

/// Laser spot state on the top surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamState {
    pub position_mm: [f64; 2],
    pub direction: [f64; 2],
    pub power_w: f64,
    pub speed_mm_s: f64,
}

impl BeamState {
    pub fn validate(&self) -> Result<(), PlantError> {
        let norm = (self.direction[0].powi(2) + self.direction[1].powi(2)).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(PlantError::InvalidParameter(format!(
                "beam direction must be unit length, norm is {norm}"
            )));
        }
        if !(self.power_w >= 0.0) {
            return Err(PlantError::InvalidParameter(format!(
                "beam power must be >= 0, got {}",
                self.power_w
            )));
        }
        if !(self.speed_mm_s > 0.0) {
            return Err(PlantError::InvalidParameter(format!(
                "beam speed must be > 0, got {}",
                self.speed_mm_s
            )));
        }
        Ok(())
    }
}

/// Node-centred 3-D temperature grid. The top surface is the plane z = 0 and
/// material occupies z <= 0; node (i, j, k) sits at
/// `(x0 + i h, y0 + j h, -k h)`.
#[derive(Debug, Clone)]
pub struct ThermalField {
    nx: usize,
    ny: usize,
    nz: usize,
    cell_size_m: f64,
    /// Position of node (0, 0, 0) in metres (x, y); z is always 0 at k = 0.
    origin_m: [f64; 2],
    temps: Vec<f64>,
    scratch: Vec<f64>,
    boundary: BoundaryMode,
}

impl ThermalField {
    /// Uniform-temperature field covering `extents_mm = [Lx, Ly, Lz]` with
    /// its top-surface rectangle anchored at `origin_mm`.
    pub fn uniform(
        cell_size_um: f64,
        extents_mm: [f64; 3],
        origin_mm: [f64; 2],
        temperature_k: f64,
        boundary: BoundaryMode,
    ) -> Result<Self, PlantError> {
        if !(cell_size_um > 0.0) {
            return Err(PlantError::InvalidParameter(format!(
                "cell size must be > 0, got {cell_size_um}"
            )));
        }
        for (axis, l) in ["x", "y", "z"].iter().zip(extents_mm) {
            if !(l > 0.0) {
                return Err(PlantError::InvalidParameter(format!(
                    "extent {axis} must be > 0, got {l}"
                )));
            }
        }
        let h = cell_size_um * 1e-6;
        let n_of = |l_mm: f64| ((l_mm * 1e-3 / h).round() as usize).max(1) + 1;
        let nx = n_of(extents_mm[0]);
        let ny = n_of(extents_mm[1]);
        let nz = n_of(extents_mm[2]);
        Ok(ThermalField {
            nx,
            ny,
            nz,
            cell_size_m: h,
            origin_m: [origin_mm[0] * 1e-3, origin_mm[1] * 1e-3],
            temps: vec![temperature_k; nx * ny * nz],
            scratch: vec![temperature_k; nx * ny * nz],
            boundary,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }

    pub fn cell_size_um(&self) -> f64 {
        self.cell_size_m * 1e6
    }

    pub fn cell_size_m(&self) -> f64 {
        self.cell_size_m
    }

    pub fn extents_mm(&self) -> [f64; 3] {
        [
            (self.nx - 1) as f64 * self.cell_size_m * 1e3,
            (self.ny - 1) as f64 * self.cell_size_m * 1e3,
            (self.nz - 1) as f64 * self.cell_size_m * 1e3,
        ]
    }

    pub fn origin_mm(&self) -> [f64; 2] {
        [self.origin_m[0] * 1e3, self.origin_m[1] * 1e3]
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.ny + j) * self.nx + i
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.temps[self.index(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let idx = self.index(i, j, k);
        self.temps[idx] = value;
    }

    pub fn temps(&self) -> &[f64] {
        &self.temps
    }

    pub fn temps_mut(&mut self) -> &mut [f64] {
        &mut self.temps
    }

    /// Swap the live buffer into scratch and hand out `(old, new)` views for
    /// one stencil sweep. Every node of `new` must be written by the caller.
    pub(crate) fn update_buffers(&mut self) -> (&[f64], &mut [f64]) {
        std::mem::swap(&mut self.temps, &mut self.scratch);
        let ThermalField { temps, scratch, .. } = self;
        (scratch.as_slice(), temps.as_mut_slice())
    }

    /// Node position in metres.
    pub fn node_pos_m(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin_m[0] + i as f64 * self.cell_size_m,
            self.origin_m[1] + j as f64 * self.cell_size_m,
            -(k as f64) * self.cell_size_m,
        ]
    }

    /// Fractional grid coordinate of an (x, y) point in metres; `None` when
    /// outside the top-surface rectangle.
    pub fn grid_coord(&self, x_m: f64, y_m: f64) -> Option<(f64, f64)> {
        let gx = (x_m - self.origin_m[0]) / self.cell_size_m;
        let gy = (y_m - self.origin_m[1]) / self.cell_size_m;
        let eps = 1e-9;
        if gx < -eps || gy < -eps || gx > (self.nx - 1) as f64 + eps || gy > (self.ny - 1) as f64 + eps
        {
            return None;
        }
        Some((
            gx.clamp(0.0, (self.nx - 1) as f64),
            gy.clamp(0.0, (self.ny - 1) as f64),
        ))
    }

    pub fn contains_mm(&self, x_mm: f64, y_mm: f64) -> bool {
        self.grid_coord(x_mm * 1e-3, y_mm * 1e-3).is_some()
    }

    /// Bilinear interpolation of the top-surface (k = 0) temperature;
    /// the point is clamped to the domain and the flag reports clamping.
    pub fn surface_temp_at(&self, x_mm: f64, y_mm: f64) -> (f64, bool) {
        let x = x_mm * 1e-3;
        let y = y_mm * 1e-3;
        let clamped = self.grid_coord(x, y).is_none();
        let gx = ((x - self.origin_m[0]) / self.cell_size_m).clamp(0.0, (self.nx - 1) as f64);
        let gy = ((y - self.origin_m[1]) / self.cell_size_m).clamp(0.0, (self.ny - 1) as f64);
        let i0 = (gx.floor() as usize).min(self.nx - 2);
        let j0 = (gy.floor() as usize).min(self.ny - 2);
        let fx = gx - i0 as f64;
        let fy = gy - j0 as f64;
        let t00 = self.at(i0, j0, 0);
        let t10 = self.at(i0 + 1, j0, 0);
        let t01 = self.at(i0, j0 + 1, 0);
        let t11 = self.at(i0 + 1, j0 + 1, 0);
        let t = t00 * (1.0 - fx) * (1.0 - fy)
            + t10 * fx * (1.0 - fy)
            + t01 * (1.0 - fx) * fy
            + t11 * fx * fy;
        (t, clamped)
    }

    /// Total enthalpy `sum rho c_p T V` over all nodes, in joules.
    pub fn enthalpy_j(&self, density_kg_m3: f64, specific_heat: f64) -> f64 {
        let v = self.cell_size_m.powi(3);
        let sum: f64 = self.temps.iter().sum();
        density_kg_m3 * specific_heat * v * sum
    }
}
