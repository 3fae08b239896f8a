//! Dynamics-model checks against the surrogate plant: prediction accuracy at
//! steady operating points, monotone power response, rollout containment.

use gp_core::OptConfig;
use gpdyn::{build_samples, train_dynamics, DynModel, DynSample, TrainConfig};
use scan_datagen::{make_case, subsample_split, CaseDefaults};
use std::sync::OnceLock;
use thermal_plant::{run_scan, GridConfig, SimConfig, StepRecord};

fn sim() -> SimConfig {
    SimConfig {
        grid: GridConfig {
            cell_size_um: 20.0,
            margin_x_mm: 0.6,
            margin_y_mm: 0.5,
            depth_mm: 0.6,
        },
        ..SimConfig::default()
    }
}

struct Fixture {
    model: DynModel,
    samples: Vec<DynSample>,
    steady: Vec<DynSample>,
    logs: Vec<Vec<StepRecord>>,
}

/// Shared fixture: short sinusoid-power and sinusoid-speed scans, one model.
fn fixture() -> &'static Fixture {
    static FIXTURE: OnceLock<Fixture> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let defaults = CaseDefaults {
            track_length_mm: 3.0,
            ..CaseDefaults::default()
        };
        let mut samples = Vec::new();
        let mut logs = Vec::new();
        for case in [2, 3] {
            let plan = make_case(case, &defaults).unwrap();
            let records = run_scan(&plan, None, &sim()).unwrap();
            samples.extend(build_samples(&records).unwrap());
            logs.push(records);
        }
        let (train, _) = subsample_split(&samples, 90, 11).unwrap();
        let cfg = TrainConfig {
            opt: OptConfig {
                max_iters: 120,
                restarts: 3,
                seed: 5,
                ..OptConfig::default()
            },
            ..TrainConfig::default()
        };
        let model = train_dynamics(&train, &cfg).unwrap();
        // Quasi-steady points: second half of the sinusoid-power track.
        let n = logs[0].len();
        let steady = build_samples(&logs[0][n / 2..]).unwrap();
        Fixture {
            model,
            samples,
            steady,
            logs,
        }
    })
}

#[test]
fn steady_operating_point_predictions_within_5_percent() {
    let f = fixture();
    let mut checked = 0;
    for s in f.steady.iter().step_by(7) {
        let pred = f
            .model
            .predict_next(s.area_mm2, s.temp_k, s.power_w, s.speed_mm_s);
        let rel = (pred - s.next_area_mm2).abs() / s.next_area_mm2;
        assert!(
            rel <= 0.05,
            "prediction {pred} vs observed {} (rel {rel})",
            s.next_area_mm2
        );
        checked += 1;
    }
    assert!(checked >= 5, "too few steady samples: {checked}");
}

#[test]
fn predict_next_is_monotone_in_power_over_trained_range() {
    let f = fixture();
    let s = &f.steady[f.steady.len() / 2];
    let p_min = f.samples.iter().map(|s| s.power_w).fold(f64::MAX, f64::min);
    let p_max = f.samples.iter().map(|s| s.power_w).fold(f64::MIN, f64::max);
    let mut prev = f64::MIN;
    for g in 0..7 {
        let p = p_min + (p_max - p_min) * g as f64 / 6.0;
        let next = f.model.predict_next(s.area_mm2, s.temp_k, p, s.speed_mm_s);
        assert!(
            next >= prev - 1e-12,
            "prediction decreased from {prev} to {next} at {p} W"
        );
        prev = next;
    }
}

#[test]
fn power_gain_is_positive_at_nominal_operating_point() {
    let f = fixture();
    let s = &f.steady[f.steady.len() / 2];
    let lin = f
        .model
        .linearize(s.area_mm2, s.temp_k, s.power_w, s.speed_mm_s);
    assert!(
        lin.b_d[0] > 0.0,
        "more power should grow the pool, got gain {}",
        lin.b_d[0]
    );
}

#[test]
fn rollout_stays_within_training_target_hull() {
    let f = fixture();
    let y_min = f.samples.iter().map(|s| s.next_area_mm2).fold(f64::MAX, f64::min);
    let y_max = f.samples.iter().map(|s| s.next_area_mm2).fold(f64::MIN, f64::max);
    let slack = 3.0 * f.model.gp().hyperparams().sigma_f * f.model.normalizer().target_std;
    let s = &f.steady[0];
    let n = 50;
    let temps = vec![s.temp_k; n];
    let inputs = vec![(250.0, 800.0); n];
    let areas = f.model.rollout(s.area_mm2, &temps, &inputs).unwrap();
    for (i, a) in areas.iter().enumerate() {
        assert!(
            *a >= y_min - slack && *a <= y_max + slack,
            "rollout step {i} left the hull: {a} not in [{}, {}]",
            y_min - slack,
            y_max + slack
        );
    }
}

#[test]
fn replayed_rollout_tracks_the_plant_on_one_track() {
    // Forward simulation replaying recorded disturbances and inputs stays
    // within 15% mean absolute error of the plant trace.
    let f = fixture();
    let records = &f.logs[0];
    let start = records.len() / 4;
    let seg = &records[start..];
    let temps: Vec<f64> = seg[..seg.len() - 1].iter().map(|r| r.lookahead_t_k).collect();
    let inputs: Vec<(f64, f64)> = seg[..seg.len() - 1]
        .iter()
        .map(|r| (r.power_w, r.speed_mm_s))
        .collect();
    let rollout = f.model.rollout(seg[0].melt_area_mm2, &temps, &inputs).unwrap();
    let actual: Vec<f64> = seg.iter().map(|r| r.melt_area_mm2).collect();
    let mean_area = actual.iter().sum::<f64>() / actual.len() as f64;
    let mae = rollout
        .iter()
        .zip(&actual)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / actual.len() as f64;
    assert!(
        mae <= 0.15 * mean_area,
        "rollout MAE {mae} vs 15% of mean area {}",
        0.15 * mean_area
    );
}
