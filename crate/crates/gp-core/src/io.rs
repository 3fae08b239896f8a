use serde::{Deserialize, Serialize};

use crate::error::GpError;
use crate::model::{Dataset, Hyperparams, TrainedGP};

/// Version stamp written into model files.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GpModelFile {
    format_version: u32,
    hyperparams: Hyperparams,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

/// Serialize a fitted GP to a JSON document. The Cholesky factor and weight
/// vector are not stored; they are recomputed on load.
pub fn save_json(gp: &TrainedGP) -> Result<String, GpError> {
    let m = gp.dataset().len();
    let file = GpModelFile {
        format_version: FORMAT_VERSION,
        hyperparams: gp.hyperparams().clone(),
        inputs: (0..m).map(|i| gp.dataset().row(i)).collect(),
        targets: gp.dataset().targets().iter().copied().collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Rebuild a fitted GP from a JSON document produced by [`save_json`].
pub fn load_json(text: &str) -> Result<TrainedGP, GpError> {
    let file: GpModelFile = serde_json::from_str(text)?;
    if file.format_version != FORMAT_VERSION {
        return Err(GpError::UnsupportedVersion {
            expected: FORMAT_VERSION,
            got: file.format_version,
        });
    }
    if file.inputs.len() != file.targets.len() {
        return Err(GpError::Malformed(format!(
            "{} input rows but {} targets",
            file.inputs.len(),
            file.targets.len()
        )));
    }
    let data = Dataset::from_rows(&file.inputs, &file.targets)?;
    TrainedGP::fit(data, file.hyperparams, 0.0)
}
