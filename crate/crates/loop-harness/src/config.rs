use serde::{Deserialize, Serialize};

use mpc_control::MpcConfig;
use scan_datagen::CaseDefaults;
use thermal_plant::SimConfig;

use crate::HarnessError;

pub const APP_CONFIG_SCHEMA_VERSION: u32 = 1;

/// GP training pipeline settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub train_count: usize,
    pub seed: u64,
    pub opt_max_iters: usize,
    pub opt_restarts: usize,
    pub opt_tol: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            train_count: 100,
            seed: 0,
            opt_max_iters: 200,
            opt_restarts: 5,
            opt_tol: 1e-5,
        }
    }
}

impl TrainingConfig {
    pub fn opt_config(&self) -> gp_core::OptConfig {
        gp_core::OptConfig {
            max_iters: self.opt_max_iters,
            tol: self.opt_tol,
            restarts: self.opt_restarts,
            seed: self.seed,
        }
    }
}

/// Geometry and measurement settings of the multi-track control test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControlTestConfig {
    pub track_length_mm: f64,
    pub n_tracks: usize,
    pub hatch_mm: f64,
    /// Fixed set point; when absent the steady track-1 area of the
    /// constant-power baseline is used.
    pub set_point_mm2: Option<f64>,
    /// Start-up window excluded from steady-state metrics, per track.
    pub startup_exclusion_ms: f64,
    /// Window after each track start searched for the transition peak.
    pub transition_window_ms: f64,
    /// Controller's previous-input seed at run start; defaults to the plan's
    /// nominal power.
    pub initial_power_w: Option<f64>,
}

impl Default for ControlTestConfig {
    fn default() -> Self {
        ControlTestConfig {
            track_length_mm: 10.0,
            n_tracks: 4,
            hatch_mm: 0.1,
            set_point_mm2: None,
            startup_exclusion_ms: 1.0,
            transition_window_ms: 2.0,
            initial_power_w: None,
        }
    }
}

/// Solver settings in configuration form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub kkt_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let d = mpc_control::SolverConfig::default();
        SolverSettings {
            kkt_tol: d.kkt_tol,
            max_iters: d.max_iters,
        }
    }
}

impl SolverSettings {
    pub fn solver_config(&self) -> mpc_control::SolverConfig {
        mpc_control::SolverConfig {
            kkt_tol: self.kkt_tol,
            max_iters: self.max_iters,
        }
    }
}

/// Master configuration document for the CLI; all sections default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct AppConfig {
    pub schema_version: u32,
    pub sim: SimConfig,
    pub case_defaults: CaseDefaults,
    pub training: TrainingConfig,
    pub mpc: MpcConfig,
    pub solver: SolverSettings,
    pub control_test: ControlTestConfig,
}

impl AppConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: AppConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema_version != 0 && self.schema_version != APP_CONFIG_SCHEMA_VERSION {
            return Err(HarnessError::InvalidConfig(format!(
                "schema version {} unsupported",
                self.schema_version
            )));
        }
        self.mpc
            .validate()
            .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_json() {
        let cfg = AppConfig {
            schema_version: APP_CONFIG_SCHEMA_VERSION,
            ..AppConfig::default()
        };
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: AppConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_documents_fill_with_defaults() {
        let cfg: AppConfig = serde_json::from_str(r#"{"training": {"seed": 7}}"#).unwrap();
        assert_eq!(cfg.training.seed, 7);
        assert_eq!(cfg.training.train_count, 100);
        assert_eq!(cfg.mpc.horizon, 20);
    }
}
