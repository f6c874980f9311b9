//! Raw vibration trace input: single-column CSV or little-endian `f32`.

use std::path::Path;

use clap::ValueEnum;
use sensormap::spectral::SignalTrace;

use crate::error::{CliError, CliResult};
use crate::table::{parse_cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    /// `f32le` for `.f32`, `.raw` and `.bin` files, CSV otherwise.
    Auto,
    Csv,
    F32le,
}

impl TraceFormat {
    pub fn resolve(self, path: &Path) -> TraceFormat {
        match self {
            TraceFormat::Auto => match path.extension().and_then(|e| e.to_str()) {
                Some("f32" | "raw" | "bin") => TraceFormat::F32le,
                _ => TraceFormat::Csv,
            },
            other => other,
        }
    }
}

pub fn samples_from_f32le(bytes: &[u8]) -> CliResult<Vec<f64>> {
    if !bytes.len().is_multiple_of(4) {
        return Err(CliError::data(format!(
            "raw f32 stream length {} is not a multiple of 4 bytes",
            bytes.len()
        )));
    }
    bytes
        .chunks_exact(4)
        .enumerate()
        .map(|(i, c)| {
            let v = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            if v.is_finite() {
                Ok(f64::from(v))
            } else {
                Err(CliError::data(format!("sample {i} is not finite")))
            }
        })
        .collect()
}

pub fn samples_from_csv(table: &Table) -> CliResult<Vec<f64>> {
    if table.headers.len() != 1 {
        return Err(CliError::data(format!(
            "trace CSV must have exactly one column, found {}",
            table.headers.len()
        )));
    }
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| parse_cell(&r[0], &table.headers[0], i))
        .collect()
}

pub fn read_trace(path: &Path, format: TraceFormat, rate: f64) -> CliResult<SignalTrace> {
    let samples = match format.resolve(path) {
        TraceFormat::F32le => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            samples_from_f32le(&bytes)?
        }
        _ => samples_from_csv(&Table::read(path)?)?,
    };
    SignalTrace::new(samples, rate).map_err(|e| CliError::from(e).context(path.display()))
}
