//! `slmctl`: generate training scans, fit the dynamics model, validate it,
//! run open- and closed-loop experiments, recompute metrics, and serve the
//! co-simulation bridge.

use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use loop_harness::{
    config_hash, control_test_plan, cosim_serve, emit_run_series, emit_scatter,
    generate_case_logs, read_run_csv, report_json, run_closed_loop, train_from_logs,
    validate_model, write_plant_csv, AppConfig, ClosedLoopOptions, RunSeries,
};
use scan_datagen::make_case;
use thermal_plant::{run_scan, run_scan_full, write_field_snapshot};

#[derive(Parser)]
#[command(name = "slmctl", about = "Learning-control toolkit for laser melt-pool regulation")]
struct Cli {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the training/profile seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the nine training cases and write plans plus scan logs.
    Datagen,
    /// Train the dynamics model from generated logs.
    Train {
        /// Directory holding case_*.csv logs (defaults to --out).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Validate a trained model against the held-out samples.
    Validate {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Open-loop run of one case or the control-test plan.
    Simulate {
        /// Case id 1..=9; omit for the multi-track control-test plan.
        #[arg(long)]
        case: Option<usize>,
        /// Also dump the final temperature field snapshot.
        #[arg(long)]
        snapshot: bool,
    },
    /// Closed-loop MPC run on the control-test plan.
    Control {
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Recompute metrics from a run CSV.
    Metrics {
        #[arg(long)]
        csv: PathBuf,
        /// Set point; defaults to the configured control-test set point.
        #[arg(long)]
        x_ref: Option<f64>,
        /// Also emit area/power/lookahead plot files next to the CSV.
        #[arg(long)]
        emit_plots: bool,
    },
    /// Serve the co-simulation bridge over stdio or TCP.
    Cosim {
        #[arg(long)]
        model: Option<PathBuf>,
        /// Listen address like 127.0.0.1:7341; stdio when omitted.
        #[arg(long)]
        listen: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn load_config(cli_config: &Option<PathBuf>, seed: Option<u64>) -> Result<AppConfig, Box<dyn std::error::Error>> {
    let mut cfg = match cli_config {
        Some(path) => AppConfig::load(path)?,
        None => AppConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.training.seed = seed;
        cfg.case_defaults.seed = seed;
    }
    Ok(cfg)
}

fn model_path(out: &Path, flag: &Option<PathBuf>) -> PathBuf {
    flag.clone().unwrap_or_else(|| out.join("model.json"))
}

fn load_model(path: &Path) -> Result<gpdyn::DynModel, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(path)?;
    Ok(gpdyn::load_model_json(&text)?)
}

fn load_logs(
    dir: &Path,
    cfg: &AppConfig,
) -> Result<Vec<(usize, scan_datagen::ScanPlan, Vec<thermal_plant::StepRecord>)>, Box<dyn std::error::Error>> {
    let mut logs = Vec::new();
    for case_id in 1..=scan_datagen::NUM_CASES {
        let csv = dir.join(format!("case_{case_id}.csv"));
        if !csv.exists() {
            return Err(format!("missing {}; run `slmctl datagen` first", csv.display()).into());
        }
        let records = thermal_plant::read_csv(&csv)?;
        let plan = make_case(case_id, &cfg.case_defaults)?;
        logs.push((case_id, plan, records));
    }
    Ok(logs)
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    let cfg = load_config(&cli.config, cli.seed)?;
    std::fs::create_dir_all(&cli.out)?;

    match cli.command {
        Command::Datagen => {
            let logs = generate_case_logs(&cfg.case_defaults, &cfg.sim)?;
            for (case_id, plan, records) in &logs {
                let plan_path = cli.out.join(format!("case_{case_id}.plan.json"));
                std::fs::write(&plan_path, serde_json::to_string_pretty(plan)?)?;
                let csv_path = cli.out.join(format!("case_{case_id}.csv"));
                write_plant_csv(records, &csv_path)?;
                println!("case {case_id}: {} steps -> {}", records.len(), csv_path.display());
            }
        }
        Command::Train { data } => {
            let dir = data.unwrap_or_else(|| cli.out.clone());
            let logs = load_logs(&dir, &cfg)?;
            let artifacts = train_from_logs(&logs, cfg.training.train_count, cfg.training.opt_config())?;
            let model_text = gpdyn::save_model_json(&artifacts.model)?;
            let path = cli.out.join("model.json");
            std::fs::write(&path, model_text)?;
            let report = validate_model(&artifacts.model, &artifacts.validation_samples)?;
            println!(
                "trained on {}/{} samples -> {}",
                artifacts.train_samples.len(),
                artifacts.total_samples,
                path.display()
            );
            println!(
                "validation: R^2 = {:.4}, MAE = {:.2}% over {} samples",
                report.r_squared, report.mae_pct, report.n
            );
        }
        Command::Validate { data, model } => {
            let dir = data.unwrap_or_else(|| cli.out.clone());
            let logs = load_logs(&dir, &cfg)?;
            let model = load_model(&model_path(&cli.out, &model))?;
            // Rebuild the seeded split so validation uses the held-out set.
            let mut pool = Vec::new();
            for (_, _, records) in &logs {
                pool.extend(gpdyn::build_samples(records)?);
            }
            let (_, val_idx) =
                scan_datagen::split_indices(pool.len(), cfg.training.train_count, cfg.training.seed)?;
            let validation: Vec<gpdyn::DynSample> = val_idx.iter().map(|&i| pool[i]).collect();
            let report = validate_model(&model, &validation)?;
            println!(
                "validation: R^2 = {:.4}, MAE = {:.2}% over {} samples",
                report.r_squared, report.mae_pct, report.n
            );
            let scatter = cli.out.join("scatter.txt");
            emit_scatter(&model, &validation, &scatter)?;
            println!("scatter -> {}", scatter.display());
            let report_path = cli.out.join("validation.json");
            std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
        }
        Command::Simulate { case, snapshot } => {
            let (name, plan) = match case {
                Some(id) => (format!("case_{id}"), make_case(id, &cfg.case_defaults)?),
                None => (
                    "control_test".to_string(),
                    control_test_plan(
                        cfg.control_test.track_length_mm,
                        cfg.control_test.n_tracks,
                        cfg.control_test.hatch_mm,
                        &cfg.case_defaults,
                    )?,
                ),
            };
            if snapshot {
                let (records, field) = run_scan_full(&plan, None, &cfg.sim)?;
                let csv = cli.out.join(format!("{name}.csv"));
                write_plant_csv(&records, &csv)?;
                write_field_snapshot(&field, &cli.out.join(format!("{name}_field")))?;
                println!("{} steps -> {} (+field snapshot)", records.len(), csv.display());
            } else {
                let records = run_scan(&plan, None, &cfg.sim)?;
                let csv = cli.out.join(format!("{name}.csv"));
                write_plant_csv(&records, &csv)?;
                println!("{} steps -> {}", records.len(), csv.display());
            }
        }
        Command::Control { model } => {
            let model = load_model(&model_path(&cli.out, &model))?;
            let plan = control_test_plan(
                cfg.control_test.track_length_mm,
                cfg.control_test.n_tracks,
                cfg.control_test.hatch_mm,
                &cfg.case_defaults,
            )?;
            let mut mpc = cfg.mpc.clone();
            if let Some(sp) = cfg.control_test.set_point_mm2 {
                mpc.x_ref_mm2 = sp;
            }
            let opts = ClosedLoopOptions {
                startup_exclusion_s: cfg.control_test.startup_exclusion_ms * 1e-3,
                initial_power_w: cfg.control_test.initial_power_w,
                csv_path: Some(cli.out.join("control_run.csv")),
            };
            let report = run_closed_loop(
                &plan,
                &model,
                &mpc,
                &cfg.solver.solver_config(),
                &cfg.sim,
                &opts,
            )?;
            println!(
                "closed loop: overshoot {:.2}%, undershoot {:.2}%, steady RMSE {:.2}% of {} mm2",
                report.metrics.max_overshoot_pct,
                report.metrics.max_undershoot_pct,
                report.metrics.steady_rmse_pct,
                report.set_point_mm2
            );
            println!(
                "solver: median {:.3} ms, p95 {:.3} ms",
                report.median_solve_time_s * 1e3,
                report.p95_solve_time_s * 1e3
            );
            let json = report_json(&report, &plan, &mpc);
            std::fs::write(cli.out.join("control_report.json"), serde_json::to_string_pretty(&json)?)?;
        }
        Command::Metrics { csv, x_ref, emit_plots } => {
            let records = read_run_csv(&csv)?;
            let plant: Vec<thermal_plant::StepRecord> = records.iter().map(|r| r.plant).collect();
            let areas: Vec<f64> = plant.iter().map(|r| r.melt_area_mm2).collect();
            let x_ref = x_ref
                .or(cfg.control_test.set_point_mm2)
                .unwrap_or(cfg.mpc.x_ref_mm2);
            let dt = if plant.len() > 1 { plant[1].time_s - plant[0].time_s } else { 50e-6 };
            let windows = loop_harness::default_windows(
                &plant,
                dt,
                cfg.control_test.startup_exclusion_ms * 1e-3,
            );
            let metrics = loop_harness::compute_metrics(&areas, x_ref, &windows)?;
            println!("{}", serde_json::to_string_pretty(&metrics)?);
            if emit_plots {
                for (series, name) in [
                    (RunSeries::AreaVsTime, "area"),
                    (RunSeries::PowerVsTime, "power"),
                    (RunSeries::LookaheadVsTime, "lookahead"),
                ] {
                    let path = cli.out.join(format!("{name}.txt"));
                    emit_run_series(&records, series, &path)?;
                    println!("{} -> {}", name, path.display());
                }
            }
        }
        Command::Cosim { model, listen } => {
            let model = load_model(&model_path(&cli.out, &model))?;
            let initial_power = cfg
                .control_test
                .initial_power_w
                .unwrap_or(cfg.case_defaults.power_w);
            let fixed_speed = cfg.case_defaults.speed_mm_s;
            let hash = config_hash(&cfg.mpc, initial_power, fixed_speed);
            eprintln!("cosim config hash: {hash}");
            let solver = cfg.solver.solver_config();
            match listen {
                Some(addr) => {
                    let listener = std::net::TcpListener::bind(&addr)?;
                    eprintln!("listening on {addr} (one session at a time)");
                    for stream in listener.incoming() {
                        let stream = stream?;
                        let reader = BufReader::new(stream.try_clone()?);
                        let summary = cosim_serve(
                            reader,
                            stream,
                            &model,
                            &cfg.mpc,
                            &solver,
                            initial_power,
                            fixed_speed,
                        )?;
                        eprintln!(
                            "session closed: {} steps, {} errors",
                            summary.steps_served, summary.errors
                        );
                    }
                }
                None => {
                    let stdin = std::io::stdin();
                    let stdout = std::io::stdout();
                    let summary = cosim_serve(
                        stdin.lock(),
                        stdout.lock(),
                        &model,
                        &cfg.mpc,
                        &solver,
                        initial_power,
                        fixed_speed,
                    )?;
                    let mut err = std::io::stderr();
                    writeln!(
                        err,
                        "session closed: {} steps, {} errors",
                        summary.steps_served, summary.errors
                    )?;
                }
            }
        }
    }
    Ok(())
}
