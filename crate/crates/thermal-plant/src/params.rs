use serde::{Deserialize, Serialize};

use crate::PlantError;

/// Constant effective thermal properties of the workpiece.
///
/// Defaults are handbook-informed values for a nickel superalloy substrate;
/// they are configuration, not calibrated ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub density_kg_m3: f64,
    pub specific_heat_j_kg_k: f64,
    pub conductivity_w_m_k: f64,
    pub melt_temp_k: f64,
    pub ambient_temp_k: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            density_kg_m3: 8440.0,
            specific_heat_j_kg_k: 620.0,
            conductivity_w_m_k: 20.0,
            melt_temp_k: 1563.0,
            ambient_temp_k: 353.0,
        }
    }
}

impl MaterialParams {
    pub fn validate(&self) -> Result<(), PlantError> {
        let positive = [
            ("density", self.density_kg_m3),
            ("specific_heat", self.specific_heat_j_kg_k),
            ("conductivity", self.conductivity_w_m_k),
            ("melt_temp", self.melt_temp_k),
            ("ambient_temp", self.ambient_temp_k),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(PlantError::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.melt_temp_k <= self.ambient_temp_k {
            return Err(PlantError::InvalidParameter(format!(
                "melt_temp {} must exceed ambient {}",
                self.melt_temp_k, self.ambient_temp_k
            )));
        }
        Ok(())
    }

    /// Thermal diffusivity `k / (rho c_p)` in m^2/s.
    pub fn diffusivity_m2_s(&self) -> f64 {
        self.conductivity_w_m_k / (self.density_kg_m3 * self.specific_heat_j_kg_k)
    }
}

/// Laser beam and absorption parameters of the volumetric heat source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserParams {
    pub absorptivity: f64,
    pub beam_radius_um: f64,
    pub penetration_depth_um: f64,
}

impl Default for LaserParams {
    fn default() -> Self {
        LaserParams {
            absorptivity: 0.4,
            beam_radius_um: 50.0,
            penetration_depth_um: 3.0,
        }
    }
}

impl LaserParams {
    pub fn validate(&self) -> Result<(), PlantError> {
        if !(self.absorptivity > 0.0 && self.absorptivity <= 1.0) {
            return Err(PlantError::InvalidParameter(format!(
                "absorptivity must be in (0, 1], got {}",
                self.absorptivity
            )));
        }
        if !(self.beam_radius_um > 0.0) {
            return Err(PlantError::InvalidParameter(format!(
                "beam_radius must be > 0, got {}",
                self.beam_radius_um
            )));
        }
        if !(self.penetration_depth_um > 0.0) {
            return Err(PlantError::InvalidParameter(format!(
                "penetration_depth must be > 0, got {}",
                self.penetration_depth_um
            )));
        }
        Ok(())
    }

    pub fn beam_radius_m(&self) -> f64 {
        self.beam_radius_um * 1e-6
    }

    pub fn penetration_depth_m(&self) -> f64 {
        self.penetration_depth_um * 1e-6
    }
}
