//! Scratch: end-to-end pipeline rehearsal with timing.

use std::time::Instant;

use gpdyn::build_samples;
use loop_harness::{
    compute_metrics, control_test_plan, default_windows, generate_case_logs, run_closed_loop,
    track_ranges, train_from_logs, validate_model, ClosedLoopOptions, MetricsWindows,
};
use mpc_control::{MpcConfig, SolverConfig};
use scan_datagen::CaseDefaults;
use thermal_plant::{run_scan, SimConfig};

fn main() {
    let defaults = CaseDefaults::default();
    let sim = SimConfig::default();

    let t0 = Instant::now();
    let logs = generate_case_logs(&defaults, &sim).unwrap();
    let total: usize = logs.iter().map(|(_, _, r)| r.len()).sum();
    println!("datagen: {total} records over 9 cases in {:.1?}", t0.elapsed());

    let t0 = Instant::now();
    let opt = gp_core::OptConfig {
        max_iters: 200,
        tol: 1e-5,
        restarts: 5,
        seed: 0,
    };
    let artifacts = train_from_logs(&logs, 100, opt).unwrap();
    println!(
        "train: 100/{} samples in {:.1?}; hp = {:?}",
        artifacts.total_samples,
        t0.elapsed(),
        artifacts.model.gp().hyperparams()
    );
    let report = validate_model(&artifacts.model, &artifacts.validation_samples).unwrap();
    println!(
        "validation: R^2 = {:.4}, MAE = {:.2}% over {}",
        report.r_squared, report.mae_pct, report.n
    );

    // Case 2 rollout.
    let (_, _, case2) = &logs[1];
    let temps: Vec<f64> = case2[..case2.len() - 1].iter().map(|r| r.lookahead_t_k).collect();
    let inputs: Vec<(f64, f64)> = case2[..case2.len() - 1]
        .iter()
        .map(|r| (r.power_w, r.speed_mm_s))
        .collect();
    let rollout = artifacts
        .model
        .rollout(case2[0].melt_area_mm2, &temps, &inputs)
        .unwrap();
    let actual: Vec<f64> = case2.iter().map(|r| r.melt_area_mm2).collect();
    let mean_area = actual.iter().sum::<f64>() / actual.len() as f64;
    let mae = rollout
        .iter()
        .zip(&actual)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / actual.len() as f64;
    println!("case2 rollout: MAE {:.3e} vs mean area {:.3e} ({:.1}%)", mae, mean_area, 100.0 * mae / mean_area);

    // Open-loop baseline on the 4x10 mm test.
    let plan = control_test_plan(10.0, 4, 0.1, &defaults).unwrap();
    let t0 = Instant::now();
    let open = run_scan(&plan, None, &sim).unwrap();
    println!("open loop: {} steps in {:.1?}", open.len(), t0.elapsed());
    let tracks = track_ranges(&open);
    let skip = (1e-3 / plan.sample_period_s).ceil() as usize;
    let t1 = &tracks[0];
    let steady1: Vec<f64> = open[t1.start + skip..t1.end].iter().map(|r| r.melt_area_mm2).collect();
    let set_point = steady1.iter().sum::<f64>() / steady1.len() as f64;
    println!("track-1 steady set point: {set_point:.5} mm2");

    // Transition peak windows (first 2 ms of tracks 2..4).
    let twin = (2e-3 / plan.sample_period_s).ceil() as usize;
    let peak_windows: Vec<std::ops::Range<usize>> = tracks[1..]
        .iter()
        .map(|r| r.start..(r.start + twin).min(open.len()))
        .collect();
    let open_areas: Vec<f64> = open.iter().map(|r| r.melt_area_mm2).collect();
    let open_metrics = compute_metrics(
        &open_areas,
        set_point,
        &MetricsWindows {
            peak: peak_windows.clone(),
            steady: default_windows(&open, plan.sample_period_s, 1e-3).steady,
        },
    )
    .unwrap();
    println!(
        "open loop: transition overshoot {:.1}%, steady RMSE {:.1}%",
        open_metrics.max_overshoot_pct, open_metrics.steady_rmse_pct
    );

    // Closed loop at the same set point.
    let mpc = MpcConfig {
        x_ref_mm2: set_point,
        ..MpcConfig::default()
    };
    let t0 = Instant::now();
    let closed = run_closed_loop(
        &plan,
        &artifacts.model,
        &mpc,
        &SolverConfig::default(),
        &sim,
        &ClosedLoopOptions::default(),
    )
    .unwrap();
    println!("closed loop: {} steps in {:.1?}", closed.records.len(), t0.elapsed());
    let closed_plant: Vec<thermal_plant::StepRecord> =
        closed.records.iter().map(|r| r.plant).collect();
    let closed_areas: Vec<f64> = closed_plant.iter().map(|r| r.melt_area_mm2).collect();
    let closed_tracks = track_ranges(&closed_plant);
    let closed_peaks: Vec<std::ops::Range<usize>> = closed_tracks[1..]
        .iter()
        .map(|r| r.start..(r.start + twin).min(closed_areas.len()))
        .collect();
    let closed_metrics = compute_metrics(
        &closed_areas,
        set_point,
        &MetricsWindows {
            peak: closed_peaks,
            steady: default_windows(&closed_plant, plan.sample_period_s, 1e-3).steady,
        },
    )
    .unwrap();
    println!(
        "closed loop: transition overshoot {:.1}%, steady RMSE {:.1}%, median solve {:.3} ms",
        closed_metrics.max_overshoot_pct,
        closed_metrics.steady_rmse_pct,
        closed.median_solve_time_s * 1e3
    );
    println!(
        "overshoot reduction: {:.1}%",
        100.0 * (1.0 - closed_metrics.max_overshoot_pct / open_metrics.max_overshoot_pct)
    );

    // Power slope per track (drop-then-ramp pattern).
    for (i, r) in closed_tracks.iter().enumerate() {
        let s = (r.start + skip).min(r.end);
        let seg = &closed.records[s..r.end];
        if seg.len() < 2 {
            continue;
        }
        let first = seg.first().unwrap().cmd_power_w;
        let last = seg.last().unwrap().cmd_power_w;
        let start_power = closed.records[r.start..s]
            .iter()
            .map(|x| x.cmd_power_w)
            .fold(f64::MAX, f64::min);
        println!(
            "track {i}: min start power {:.0} W, steady {:.0} -> {:.0} W",
            start_power, first, last
        );
    }

    // Sanity: GP-samples from case2 rollout vs samples count.
    let s2 = build_samples(&logs[1].2).unwrap();
    println!("case2 samples: {}", s2.len());
}
