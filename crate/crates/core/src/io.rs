//! Angle files and refinement traces.
//!
//! Angle files are either JSON, `{"m": 3, "angles_rad": [0.1, 0.2, 0.3]}`,
//! or a single column of radians (an optional non-numeric header line is
//! skipped). Traces are JSON with one record per stage.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::driver::StepDriver;
use crate::error::{Error, Result};
use crate::optimizer::RefinementTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleFile {
    pub m: usize,
    pub angles_rad: Vec<f64>,
}

impl AngleFile {
    pub fn from_driver(d: &StepDriver) -> Self {
        Self {
            m: d.m(),
            angles_rad: d.angles().to_vec(),
        }
    }

    pub fn into_driver(self) -> Result<StepDriver> {
        if self.m != self.angles_rad.len() {
            return Err(Error::Parse(format!(
                "m = {} but {} angles given",
                self.m,
                self.angles_rad.len()
            )));
        }
        StepDriver::new(&self.angles_rad)
    }
}

fn parse_csv_angles(text: &str) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut angles = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 1 {
            return Err(Error::Parse(format!(
                "line {}: expected one column, found {}",
                line + 1,
                record.len()
            )));
        }
        let field = &record[0];
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => angles.push(v),
            Err(_) if line == 0 => continue,
            Err(_) => {
                return Err(Error::Parse(format!(
                    "line {}: `{field}` is not a number",
                    line + 1
                )))
            }
        }
    }
    Ok(angles)
}

/// Parses angle-file contents, JSON or single-column CSV.
pub fn parse_angles(text: &str) -> Result<StepDriver> {
    if text.trim_start().starts_with('{') {
        let file: AngleFile = serde_json::from_str(text)?;
        file.into_driver()
    } else {
        StepDriver::new(&parse_csv_angles(text)?)
    }
}

pub fn read_angle_file(path: impl AsRef<Path>) -> Result<StepDriver> {
    parse_angles(&fs::read_to_string(path)?)
}

pub fn angles_to_json(d: &StepDriver) -> String {
    serde_json::to_string_pretty(&AngleFile::from_driver(d)).expect("angles serialize")
}

pub fn write_angles_csv<W: Write>(d: &StepDriver, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for a in d.angles() {
        w.write_record([format!("{a:.17e}")])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub m: usize,
    pub value: f64,
    pub angles_rad: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub functional: String,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
}

impl TraceFile {
    pub fn new(functional: &str, seed: u64, trace: &RefinementTrace) -> Self {
        Self {
            functional: functional.to_string(),
            seed,
            stages: trace
                .stages
                .iter()
                .map(|s| StageRecord {
                    m: s.m,
                    value: s.result.value,
                    angles_rad: s.result.driver.angles().to_vec(),
                    iterations: s.result.iterations,
                    converged: s.result.converged,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    /// One row per stage: `m,value,iterations,converged`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "value", "iterations", "converged"])?;
        for s in &self.stages {
            w.write_record([
                s.m.to_string(),
                format!("{:.15e}", s.value),
                s.iterations.to_string(),
                s.converged.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
