//! Dataset ingestion for Bayesian logistic regression.

use std::path::Path;

use crate::error::{Error, Result};
use crate::models::BlrTarget;

/// Standardized design matrix and labels ready for [`BlrTarget`].
#[derive(Debug, Clone)]
pub struct BlrDataset {
    /// Row-major `K×D`, first column all ones.
    pub design: Vec<f64>,
    pub labels: Vec<f64>,
    /// Number of regression coefficients, intercept included.
    pub d: usize,
    /// Number of observations.
    pub k: usize,
    /// Covariate names in design order (intercept excluded).
    pub covariates: Vec<String>,
    /// Covariate columns dropped for missing values.
    pub dropped: Vec<String>,
}

impl BlrDataset {
    pub fn into_target(self, alpha: f64) -> Result<BlrTarget> {
        BlrTarget::new(self.design, self.labels, alpha)
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "?")
}

/// Reads a headed CSV of numeric covariates and a binary label column.
///
/// Covariates are centred and scaled by their sample standard deviation (`N − 1` divisor),
/// and a ones column is prepended. Columns with missing cells are dropped. Labels may be
/// coded `0/1` or `−1/1`. `label_column = None` takes the last column.
pub fn ingest_blr_dataset(path: &Path, label_column: Option<&str>) -> Result<BlrDataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 {
        return Err(Error::Dataset { column: header.join(","), msg: "need at least one covariate and a label".into() });
    }
    let label_idx = match label_column {
        Some(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Dataset { column: name.into(), msg: "no such column".into() })?,
        None => header.len() - 1,
    };
    let label_name = &header[label_idx];

    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); header.len()];
    for rec in reader.records() {
        let rec = rec?;
        for (j, cell) in rec.iter().enumerate() {
            let v = if is_missing(cell) {
                None
            } else {
                Some(cell.parse::<f64>().map_err(|_| Error::Dataset {
                    column: header[j].clone(),
                    msg: format!("non-numeric value `{cell}` in row {}", columns[j].len() + 1),
                })?)
            };
            columns[j].push(v);
        }
    }
    let k = columns[label_idx].len();
    if k < 2 {
        return Err(Error::Dataset { column: label_name.clone(), msg: "need at least two rows".into() });
    }

    let raw_labels = &columns[label_idx];
    let minus_one = raw_labels.iter().any(|v| *v == Some(-1.0));
    let mut labels = Vec::with_capacity(k);
    for (r, v) in raw_labels.iter().enumerate() {
        labels.push(match (*v, minus_one) {
            (Some(0.0), false) | (Some(-1.0), true) => 0.0,
            (Some(1.0), _) => 1.0,
            _ => {
                return Err(Error::Dataset {
                    column: label_name.clone(),
                    msg: format!("non-binary label {v:?} in row {}", r + 1),
                })
            }
        });
    }

    let mut covariates = Vec::new();
    let mut dropped = Vec::new();
    let mut standardized: Vec<Vec<f64>> = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        if j == label_idx {
            continue;
        }
        if col.iter().any(Option::is_none) {
            dropped.push(header[j].clone());
            continue;
        }
        let x: Vec<f64> = col.iter().map(|v| v.unwrap()).collect();
        let mean = x.iter().sum::<f64>() / k as f64;
        let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt();
        if !(sd > 0.0) {
            return Err(Error::Dataset { column: header[j].clone(), msg: "constant covariate (zero standard deviation)".into() });
        }
        let mut z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
        // one correction pass pushes the column mean to round-off
        let resid = z.iter().sum::<f64>() / k as f64;
        z.iter_mut().for_each(|v| *v -= resid);
        standardized.push(z);
        covariates.push(header[j].clone());
    }
    let d = standardized.len() + 1;
    let mut design = Vec::with_capacity(k * d);
    for r in 0..k {
        design.push(1.0);
        design.extend(standardized.iter().map(|c| c[r]));
    }
    Ok(BlrDataset { design, labels, d, k, covariates, dropped })
}
