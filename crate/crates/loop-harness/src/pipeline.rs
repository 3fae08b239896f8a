use serde::{Deserialize, Serialize};

use gpdyn::{build_samples, train_dynamics, DynModel, DynSample, TrainConfig};
use scan_datagen::{make_case, split_indices, CaseDefaults, ScanPlan, Waveform, NUM_CASES};
use thermal_plant::{run_scan, SimConfig, StepRecord};

use crate::HarnessError;

/// Run all nine training cases on the surrogate plant.
pub fn generate_case_logs(
    defaults: &CaseDefaults,
    sim: &SimConfig,
) -> Result<Vec<(usize, ScanPlan, Vec<StepRecord>)>, HarnessError> {
    let mut out = Vec::with_capacity(NUM_CASES);
    for case_id in 1..=NUM_CASES {
        let plan = make_case(case_id, defaults)?;
        let records = run_scan(&plan, None, sim)?;
        out.push((case_id, plan, records));
    }
    Ok(out)
}

/// The trained model plus the split used to produce it.
pub struct TrainedArtifacts {
    pub model: DynModel,
    pub train_samples: Vec<DynSample>,
    pub validation_samples: Vec<DynSample>,
    pub total_samples: usize,
}

/// Pool transitions from all logs, draw the seeded training subset, and fit
/// the dynamics GP; the remainder becomes the validation set.
pub fn train_from_logs(
    logs: &[(usize, ScanPlan, Vec<StepRecord>)],
    train_count: usize,
    opt: gp_core::OptConfig,
) -> Result<TrainedArtifacts, HarnessError> {
    let mut pool = Vec::new();
    let mut sample_period = None;
    for (_, plan, records) in logs {
        pool.extend(build_samples(records)?);
        sample_period.get_or_insert(plan.sample_period_s);
    }
    let (train_idx, val_idx) = split_indices(pool.len(), train_count, opt.seed)?;
    let train_samples: Vec<DynSample> = train_idx.iter().map(|&i| pool[i]).collect();
    let validation_samples: Vec<DynSample> = val_idx.iter().map(|&i| pool[i]).collect();
    let cfg = TrainConfig {
        opt,
        sample_period_s: sample_period.unwrap_or(50e-6),
        ..TrainConfig::default()
    };
    let model = train_dynamics(&train_samples, &cfg)?;
    Ok(TrainedArtifacts {
        model,
        train_samples,
        validation_samples,
        total_samples: pool.len(),
    })
}

/// One-step prediction quality on a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Coefficient of determination of the one-step predictions.
    pub r_squared: f64,
    /// Mean absolute error as a percentage of the mean absolute target.
    pub mae_pct: f64,
    pub n: usize,
}

pub fn validate_model(model: &DynModel, samples: &[DynSample]) -> Result<ValidationReport, HarnessError> {
    if samples.is_empty() {
        return Err(HarnessError::EmptySeries);
    }
    let n = samples.len() as f64;
    let mean_y = samples.iter().map(|s| s.next_area_mm2).sum::<f64>() / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    let mut abs_err = 0.0;
    let mut abs_y = 0.0;
    for s in samples {
        let pred = model.predict_next(s.area_mm2, s.temp_k, s.power_w, s.speed_mm_s);
        ss_res += (pred - s.next_area_mm2) * (pred - s.next_area_mm2);
        ss_tot += (s.next_area_mm2 - mean_y) * (s.next_area_mm2 - mean_y);
        abs_err += (pred - s.next_area_mm2).abs();
        abs_y += s.next_area_mm2.abs();
    }
    Ok(ValidationReport {
        r_squared: 1.0 - ss_res / ss_tot.max(f64::MIN_POSITIVE),
        mae_pct: 100.0 * abs_err / abs_y.max(f64::MIN_POSITIVE),
        n: samples.len(),
    })
}

/// Multi-track constant-command plan for the control test.
pub fn control_test_plan(
    track_length_mm: f64,
    n_tracks: usize,
    hatch_mm: f64,
    defaults: &CaseDefaults,
) -> Result<ScanPlan, HarnessError> {
    Ok(ScanPlan::parallel_tracks(
        defaults.origin_mm,
        track_length_mm,
        n_tracks,
        hatch_mm,
        true,
        Waveform::constant(defaults.power_w, defaults.power_clamp_w),
        Waveform::constant(defaults.speed_mm_s, defaults.speed_clamp_mm_s),
        defaults.sample_period_s,
    )?)
}
