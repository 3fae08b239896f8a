use std::path::{Path, PathBuf};

use gpdyn::DynModel;
use mpc_control::{control_step, MpcConfig, SolverConfig};
use scan_datagen::ScanPlan;
use thermal_plant::{run_scan, PlantError, SimConfig};

use crate::metrics::{compute_metrics, default_windows, RunMetrics};
use crate::runcsv::{write_run_csv, RunRecord};
use crate::HarnessError;

/// Measurement and logging options for one closed-loop run.
#[derive(Debug, Clone)]
pub struct ClosedLoopOptions {
    pub startup_exclusion_s: f64,
    /// Previous-input seed for the first control step; defaults to the
    /// plan's nominal power at t = 0.
    pub initial_power_w: Option<f64>,
    /// Write the per-step CSV here when set.
    pub csv_path: Option<PathBuf>,
}

impl Default for ClosedLoopOptions {
    fn default() -> Self {
        ClosedLoopOptions {
            startup_exclusion_s: 1e-3,
            initial_power_w: None,
            csv_path: None,
        }
    }
}

/// Everything a closed-loop run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<RunRecord>,
    pub metrics: RunMetrics,
    pub set_point_mm2: f64,
    pub median_solve_time_s: f64,
    pub p95_solve_time_s: f64,
    pub csv_path: Option<PathBuf>,
}

/// Run the plant under the MPC callback, log every step, and compute the
/// control metrics with per-track start-up windows excluded. A controller
/// abort still writes the partial CSV before the error propagates.
pub fn run_closed_loop(
    plan: &ScanPlan,
    model: &DynModel,
    mpc: &MpcConfig,
    solver: &SolverConfig,
    sim: &SimConfig,
    opts: &ClosedLoopOptions,
) -> Result<RunReport, HarnessError> {
    let fixed_speed = plan.speed.eval(0.0);
    let initial_power = opts.initial_power_w.unwrap_or_else(|| plan.power.eval(0.0));
    let mut telemetry: Vec<mpc_control::ControlOutput> = Vec::new();
    let mut u_prev = (initial_power, fixed_speed);
    let mut t_prev: Option<f64> = None;

    let mut controller = |_k: usize, x_k: f64, t_k: f64| -> Result<(f64, f64), String> {
        let out = control_step(
            model,
            x_k,
            t_k,
            t_prev.unwrap_or(t_k),
            u_prev,
            mpc,
            solver,
        )
        .map_err(|e| e.to_string())?;
        t_prev = Some(t_k);
        u_prev = (out.power_w, out.speed_mm_s);
        telemetry.push(out);
        Ok((out.power_w, out.speed_mm_s))
    };

    let scan_result = run_scan(plan, Some(&mut controller), sim);
    let plant_records = match scan_result {
        Ok(records) => records,
        Err(PlantError::ControllerAborted { step, message, partial }) => {
            // Preserve what completed, then surface the abort.
            let records = pair_records(&partial, &telemetry);
            if let Some(path) = &opts.csv_path {
                let _ = write_run_csv(&records, path);
            }
            return Err(HarnessError::Plant(PlantError::ControllerAborted {
                step,
                message,
                partial,
            }));
        }
        Err(e) => return Err(e.into()),
    };

    let records = pair_records(&plant_records, &telemetry);
    if let Some(path) = &opts.csv_path {
        write_run_csv(&records, path)?;
    }

    let areas: Vec<f64> = plant_records.iter().map(|r| r.melt_area_mm2).collect();
    let windows = default_windows(&plant_records, plan.sample_period_s, opts.startup_exclusion_s);
    let metrics = compute_metrics(&areas, mpc.x_ref_mm2, &windows)?;

    let mut times: Vec<f64> = telemetry.iter().map(|t| t.solve_time_s).collect();
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite solve times"));
    let median = percentile(&times, 0.5);
    let p95 = percentile(&times, 0.95);

    Ok(RunReport {
        records,
        metrics,
        set_point_mm2: mpc.x_ref_mm2,
        median_solve_time_s: median,
        p95_solve_time_s: p95,
        csv_path: opts.csv_path.clone(),
    })
}

fn pair_records(
    plant: &[thermal_plant::StepRecord],
    telemetry: &[mpc_control::ControlOutput],
) -> Vec<RunRecord> {
    plant
        .iter()
        .zip(telemetry)
        .map(|(p, t)| RunRecord::from_control(*p, t))
        .collect()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

/// Serializable summary of a run for report files.
pub fn report_json(report: &RunReport, plan: &ScanPlan, mpc: &MpcConfig) -> serde_json::Value {
    serde_json::json!({
        "set_point_mm2": report.set_point_mm2,
        "metrics": report.metrics,
        "median_solve_time_s": report.median_solve_time_s,
        "p95_solve_time_s": report.p95_solve_time_s,
        "steps": report.records.len(),
        "csv": report.csv_path.as_ref().map(|p| p.display().to_string()),
        "plan": plan,
        "mpc": mpc,
    })
}

/// Write a plain scan log (open-loop runs) next to the run CSV tooling.
pub fn write_plant_csv(records: &[thermal_plant::StepRecord], path: &Path) -> Result<(), HarnessError> {
    thermal_plant::write_csv(records, path)?;
    Ok(())
}
