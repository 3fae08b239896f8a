use serde::{Deserialize, Serialize};

use crate::MpcError;

pub const MPC_CONFIG_SCHEMA_VERSION: u32 = 1;

/// Controller weights, horizon, set point and constraint boxes.
///
/// Defaults follow the reference tuning: power 0..350 W, power rate
/// -350..350 W per step, area 0..0.5 mm^2, Q = 1, R = 0.1, Qf = 20, H = 20,
/// power-only control at a 0.09 mm^2 set point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MpcConfig {
    pub schema_version: u32,
    pub q: f64,
    pub r: f64,
    pub qf: f64,
    pub horizon: usize,
    pub x_ref_mm2: f64,
    pub x_bounds_mm2: (f64, f64),
    pub p_bounds_w: (f64, f64),
    pub v_bounds_mm_s: (f64, f64),
    pub dp_bounds_w: (f64, f64),
    /// Off by default: scanning speed is held fixed and only power is decided.
    pub control_speed: bool,
    /// Temperature feedforward gains (W/K); zero disables the term.
    pub k_ff_w_per_k: f64,
    pub k_d_w_per_k: f64,
    pub t_ref_k: f64,
    /// Quadratic weight on the soft state-bound slack variables.
    pub slack_weight: f64,
    /// Penalize absolute states and inputs (`Q x^2 + u^T R u`) instead of the
    /// tracking error and input rate; kept for comparison runs.
    pub literal_cost: bool,
}

impl Default for MpcConfig {
    fn default() -> Self {
        MpcConfig {
            schema_version: MPC_CONFIG_SCHEMA_VERSION,
            q: 1.0,
            r: 0.1,
            qf: 20.0,
            horizon: 20,
            x_ref_mm2: 0.09,
            x_bounds_mm2: (0.0, 0.5),
            p_bounds_w: (0.0, 350.0),
            v_bounds_mm_s: (400.0, 1200.0),
            dp_bounds_w: (-350.0, 350.0),
            control_speed: false,
            k_ff_w_per_k: 0.0,
            k_d_w_per_k: 0.0,
            t_ref_k: 353.0,
            slack_weight: 1e4,
            literal_cost: false,
        }
    }
}

impl MpcConfig {
    pub fn validate(&self) -> Result<(), MpcError> {
        if self.schema_version != MPC_CONFIG_SCHEMA_VERSION {
            return Err(MpcError::InvalidConfig(format!(
                "schema version {} unsupported (expected {MPC_CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.q >= 0.0 && self.qf >= 0.0) {
            return Err(MpcError::InvalidConfig("Q and Qf must be >= 0".into()));
        }
        if !(self.r > 0.0) {
            return Err(MpcError::InvalidConfig(format!(
                "R must be > 0, got {}",
                self.r
            )));
        }
        if self.horizon == 0 {
            return Err(MpcError::InvalidConfig("horizon must be >= 1".into()));
        }
        if !(self.slack_weight > 0.0) {
            return Err(MpcError::InvalidConfig("slack weight must be > 0".into()));
        }
        for (name, (lo, hi)) in [
            ("x_bounds", self.x_bounds_mm2),
            ("p_bounds", self.p_bounds_w),
            ("v_bounds", self.v_bounds_mm_s),
            ("dp_bounds", self.dp_bounds_w),
        ] {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(MpcError::InvalidConfig(format!(
                    "{name} must be a finite ordered pair, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        MpcConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_inverted_bounds_and_zero_r() {
        let mut c = MpcConfig::default();
        c.p_bounds_w = (350.0, 0.0);
        assert!(c.validate().is_err());
        let mut c = MpcConfig::default();
        c.r = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip_with_schema_version() {
        let c = MpcConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("schema_version"));
        let back: MpcConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
    }
}
