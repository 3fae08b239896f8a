use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::field::ThermalField;
use crate::scan::StepRecord;
use crate::PlantError;

pub const SCAN_CSV_HEADER: &str =
    "step,time_s,x_mm,y_mm,power_W,speed_mm_s,melt_area_mm2,lookahead_T_K";

/// Full round-trip decimal formatting: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a scan log as CSV with the fixed schema header.
pub fn write_csv(records: &[StepRecord], path: &Path) -> Result<(), PlantError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{SCAN_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.step,
            fmt_f64(r.time_s),
            fmt_f64(r.x_mm),
            fmt_f64(r.y_mm),
            fmt_f64(r.power_w),
            fmt_f64(r.speed_mm_s),
            fmt_f64(r.melt_area_mm2),
            fmt_f64(r.lookahead_t_k),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Read a scan log written by [`write_csv`]. Extra columns appended by other
/// tools are ignored.
pub fn read_csv(path: &Path) -> Result<Vec<StepRecord>, PlantError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| PlantError::MalformedLog("empty file".into()))??;
    if !header.starts_with(SCAN_CSV_HEADER) {
        return Err(PlantError::MalformedLog(format!(
            "unexpected header: {header}"
        )));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 8 {
            return Err(PlantError::MalformedLog(format!(
                "line {}: expected 8+ fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64, PlantError> {
            s.parse::<f64>()
                .map_err(|e| PlantError::MalformedLog(format!("line {}: {e}", lineno + 2)))
        };
        records.push(StepRecord {
            step: fields[0]
                .parse::<usize>()
                .map_err(|e| PlantError::MalformedLog(format!("line {}: {e}", lineno + 2)))?,
            time_s: parse(fields[1])?,
            x_mm: parse(fields[2])?,
            y_mm: parse(fields[3])?,
            power_w: parse(fields[4])?,
            speed_mm_s: parse(fields[5])?,
            melt_area_mm2: parse(fields[6])?,
            lookahead_t_k: parse(fields[7])?,
            lookahead_clamped: false,
        });
    }
    Ok(records)
}

#[derive(Serialize)]
struct SnapshotSidecar {
    nx: usize,
    ny: usize,
    nz: usize,
    cell_size_um: f64,
    origin_mm: [f64; 2],
    layout: &'static str,
    dtype: &'static str,
}

/// Dump the temperature field as little-endian f64 with a JSON sidecar
/// describing dimensions; writes `<base>.bin` and `<base>.json`.
pub fn write_field_snapshot(field: &ThermalField, base: &Path) -> Result<(), PlantError> {
    let (nx, ny, nz) = field.dims();
    let mut bin = BufWriter::new(std::fs::File::create(base.with_extension("bin"))?);
    for t in field.temps() {
        bin.write_all(&t.to_le_bytes())?;
    }
    bin.flush()?;
    let sidecar = SnapshotSidecar {
        nx,
        ny,
        nz,
        cell_size_um: field.cell_size_um(),
        origin_mm: field.origin_mm(),
        layout: "x-fastest, then y, then z (z increasing downward)",
        dtype: "f64-le",
    };
    let text = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| PlantError::MalformedLog(e.to_string()))?;
    std::fs::write(base.with_extension("json"), text)?;
    Ok(())
}
