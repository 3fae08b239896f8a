use serde::{Deserialize, Serialize};

use crate::model::DynModel;
use crate::normalize::Normalizer;
use crate::DynError;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct DynModelFile {
    format_version: u32,
    gp: serde_json::Value,
    normalizer: Normalizer,
    sample_period_s: f64,
}

/// JSON envelope embedding the GP model document plus normalizer statistics
/// and the sample period.
pub fn save_model_json(model: &DynModel) -> Result<String, DynError> {
    let gp_doc: serde_json::Value = serde_json::from_str(&gp_core::save_json(model.gp())?)?;
    let file = DynModelFile {
        format_version: MODEL_FORMAT_VERSION,
        gp: gp_doc,
        normalizer: model.normalizer().clone(),
        sample_period_s: model.sample_period_s(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Rebuild a dynamics model; the GP factorization is recomputed on load.
pub fn load_model_json(text: &str) -> Result<DynModel, DynError> {
    let file: DynModelFile = serde_json::from_str(text)?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(DynError::UnsupportedVersion {
            expected: MODEL_FORMAT_VERSION,
            got: file.format_version,
        });
    }
    let gp = gp_core::load_json(&serde_json::to_string(&file.gp)?)?;
    DynModel::from_parts(gp, file.normalizer, file.sample_period_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{train_dynamics, TrainConfig};
    use crate::sample::DynSample;
    use gp_core::OptConfig;

    #[test]
    fn model_round_trip_preserves_predictions() {
        let samples: Vec<DynSample> = (0..30)
            .map(|i| DynSample {
                area_mm2: 0.01 + 0.001 * (i % 5) as f64,
                temp_k: 360.0 + 5.0 * (i % 4) as f64,
                power_w: 210.0 + 12.0 * (i % 7) as f64,
                speed_mm_s: 720.0 + 15.0 * (i % 6) as f64,
                next_area_mm2: 0.011 + 0.0012 * (i % 5) as f64 + 1e-5 * (i % 7) as f64,
            })
            .collect();
        let cfg = TrainConfig {
            opt: OptConfig {
                max_iters: 40,
                restarts: 1,
                seed: 0,
                ..OptConfig::default()
            },
            ..TrainConfig::default()
        };
        let model = train_dynamics(&samples, &cfg).unwrap();
        let text = save_model_json(&model).unwrap();
        let back = load_model_json(&text).unwrap();
        let p1 = model.predict_next(0.012, 371.0, 246.0, 755.0);
        let p2 = back.predict_next(0.012, 371.0, 246.0, 755.0);
        assert!((p1 - p2).abs() <= 1e-14 * p1.abs().max(1.0));
        assert_eq!(model.sample_period_s(), back.sample_period_s());
    }

    #[test]
    fn rejects_unknown_version() {
        let text = r#"{"format_version": 3, "gp": {}, "normalizer": {"input_mean": [0,0,0,0], "input_std": [1,1,1,1], "target_mean": 0, "target_std": 1}, "sample_period_s": 5e-5}"#;
        assert!(matches!(
            load_model_json(text),
            Err(DynError::UnsupportedVersion { expected: 1, got: 3 })
        ));
    }
}
