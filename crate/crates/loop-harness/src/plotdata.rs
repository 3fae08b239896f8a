use std::io::{BufWriter, Write};
use std::path::Path;

use gpdyn::{DynModel, DynSample};

use crate::runcsv::RunRecord;
use crate::HarnessError;

/// Named time series extractable from a run log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunSeries {
    AreaVsTime,
    PowerVsTime,
    LookaheadVsTime,
}

impl RunSeries {
    pub fn parse(name: &str) -> Result<Self, HarnessError> {
        match name {
            "area" => Ok(RunSeries::AreaVsTime),
            "power" => Ok(RunSeries::PowerVsTime),
            "lookahead" => Ok(RunSeries::LookaheadVsTime),
            other => Err(HarnessError::UnknownSeries(other.to_string())),
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Whitespace-separated two-column plot file for generic plotting tools.
pub fn emit_run_series(
    records: &[RunRecord],
    series: RunSeries,
    path: &Path,
) -> Result<(), HarnessError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        let value = match series {
            RunSeries::AreaVsTime => r.plant.melt_area_mm2,
            RunSeries::PowerVsTime => r.plant.power_w,
            RunSeries::LookaheadVsTime => r.plant.lookahead_t_k,
        };
        writeln!(w, "{} {}", fmt(r.plant.time_s), fmt(value))?;
    }
    w.flush()?;
    Ok(())
}

/// Prediction-vs-actual scatter over a sample set, one row per sample.
pub fn emit_scatter(
    model: &DynModel,
    samples: &[DynSample],
    path: &Path,
) -> Result<(), HarnessError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for s in samples {
        let pred = model.predict_next(s.area_mm2, s.temp_k, s.power_w, s.speed_mm_s);
        writeln!(w, "{} {}", fmt(s.next_area_mm2), fmt(pred))?;
    }
    w.flush()?;
    Ok(())
}
