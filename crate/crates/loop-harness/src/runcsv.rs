use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thermal_plant::StepRecord;

use crate::HarnessError;

pub const RUN_CSV_HEADER: &str = "step,time_s,x_mm,y_mm,power_W,speed_mm_s,melt_area_mm2,\
lookahead_T_K,cmd_power_W,ff_term_W,solver_status,solver_iters,solve_time_s";

/// One closed-loop step: the plant record plus controller telemetry.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub plant: StepRecord,
    pub cmd_power_w: f64,
    pub ff_term_w: f64,
    pub solver_status: String,
    pub solver_iters: usize,
    pub solve_time_s: f64,
}

impl RunRecord {
    pub fn from_control(
        plant: StepRecord,
        out: &mpc_control::ControlOutput,
    ) -> Self {
        RunRecord {
            plant,
            cmd_power_w: out.power_w,
            ff_term_w: out.ff_term_w,
            solver_status: out.status.as_str().to_string(),
            solver_iters: out.iterations,
            solve_time_s: out.solve_time_s,
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a closed-loop run log: the plant schema plus controller columns.
pub fn write_run_csv(records: &[RunRecord], path: &Path) -> Result<(), HarnessError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{RUN_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.plant.step,
            fmt(r.plant.time_s),
            fmt(r.plant.x_mm),
            fmt(r.plant.y_mm),
            fmt(r.plant.power_w),
            fmt(r.plant.speed_mm_s),
            fmt(r.plant.melt_area_mm2),
            fmt(r.plant.lookahead_t_k),
            fmt(r.cmd_power_w),
            fmt(r.ff_term_w),
            r.solver_status,
            r.solver_iters,
            fmt(r.solve_time_s),
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_run_csv(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| HarnessError::MalformedLog("empty file".into()))??;
    if header != RUN_CSV_HEADER {
        return Err(HarnessError::MalformedLog(format!(
            "unexpected header: {header}"
        )));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            return Err(HarnessError::MalformedLog(format!(
                "line {}: expected 13 fields, got {}",
                lineno + 2,
                f.len()
            )));
        }
        let num = |s: &str| -> Result<f64, HarnessError> {
            s.parse::<f64>()
                .map_err(|e| HarnessError::MalformedLog(format!("line {}: {e}", lineno + 2)))
        };
        records.push(RunRecord {
            plant: StepRecord {
                step: f[0]
                    .parse()
                    .map_err(|e| HarnessError::MalformedLog(format!("line {}: {e}", lineno + 2)))?,
                time_s: num(f[1])?,
                x_mm: num(f[2])?,
                y_mm: num(f[3])?,
                power_w: num(f[4])?,
                speed_mm_s: num(f[5])?,
                melt_area_mm2: num(f[6])?,
                lookahead_t_k: num(f[7])?,
                lookahead_clamped: false,
            },
            cmd_power_w: num(f[8])?,
            ff_term_w: num(f[9])?,
            solver_status: f[10].to_string(),
            solver_iters: f[11]
                .parse()
                .map_err(|e| HarnessError::MalformedLog(format!("line {}: {e}", lineno + 2)))?,
            solve_time_s: num(f[12])?,
        });
    }
    Ok(records)
}

/// Strip the wall-clock solve-time column, leaving only deterministic
/// content; used for byte-level reproducibility comparisons.
pub fn mask_solve_time(csv_text: &str) -> String {
    let mut out = String::with_capacity(csv_text.len());
    for (i, line) in csv_text.lines().enumerate() {
        if i == 0 {
            out.push_str(line);
        } else if let Some(pos) = line.rfind(',') {
            out.push_str(&line[..pos]);
        } else {
            out.push_str(line);
        }
        out.push('\n');
    }
    out
}
