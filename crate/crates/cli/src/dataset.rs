//! JSON-lines eigenvalue datasets: one object per draw, floats written
//! with 17 significant digits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use haartrunc::{Complex64, SpectralSample};
use serde::Deserialize;

use crate::error::{AppError, AppResult};
use crate::numfmt::fmt_f64;

#[derive(Debug, Deserialize)]
struct EigenvalueRecord {
    re: f64,
    im: f64,
}

#[derive(Debug, Deserialize)]
pub struct DatasetRecord {
    pub sample_index: u64,
    pub m: usize,
    pub n: usize,
    eigenvalues: Vec<EigenvalueRecord>,
}

impl DatasetRecord {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .map(|e| Complex64::new(e.re, e.im))
            .collect()
    }
}

/// Writes the batch in sample-index order.
pub fn write_dataset(path: &Path, samples: &[SpectralSample]) -> AppResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for s in samples {
        write!(
            out,
            "{{\"sample_index\":{},\"m\":{},\"n\":{},\"eigenvalues\":[",
            s.sample_index, s.m, s.n
        )?;
        for (i, z) in s.eigenvalues.iter().enumerate() {
            if i > 0 {
                write!(out, ",")?;
            }
            write!(out, "{{\"re\":{},\"im\":{}}}", fmt_f64(z.re), fmt_f64(z.im))?;
        }
        writeln!(out, "]}}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> AppResult<Vec<DatasetRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DatasetRecord = serde_json::from_str(&line).map_err(|e| {
            AppError::Validation(format!("malformed dataset line {}: {e}", lineno + 1))
        })?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(AppError::Validation(format!(
            "dataset {} is empty",
            path.display()
        )));
    }
    Ok(records)
}

/// All eigenvalues of the dataset pooled in record order.
pub fn pooled_eigenvalues(records: &[DatasetRecord]) -> Vec<Complex64> {
    records.iter().flat_map(|r| r.eigenvalues()).collect()
}
