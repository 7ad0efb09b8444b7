//! On-disk formats: header-less matrix CSV and JSON population checkpoints.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::learning::{PayoffEstimator, PolicyKey, Population, Slot};
use crate::Matrix;

/// One value with 9 significant digits; negative zero is written as zero.
pub fn format_value(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

/// Row-major CSV without a header, one matrix row per line.
pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format_value(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|field| field.trim().parse::<f64>().map_err(|e| crate::Error::InvalidArgument(format!("line {}: {e}: {field:?}", n + 1))))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return invalid(format!("line {}: expected {} fields, found {}", n + 1, first.len(), row.len()));
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    Ok(Matrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

/// A population snapshot with the state needed to resume or compare it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint<P> {
    pub slots: Vec<Slot>,
    pub policies: BTreeMap<PolicyKey, P>,
    pub estimator: Option<PayoffEstimator>,
    /// The configuration that produced the run, echoed verbatim.
    pub config: serde_json::Value,
    pub epoch: usize,
}

impl<P: Clone + PartialEq> Checkpoint<P> {
    pub fn new(population: &Population<P>, estimator: Option<&PayoffEstimator>, config: serde_json::Value, epoch: usize) -> Self {
        Self {
            slots: population.slots().to_vec(),
            policies: population.store().clone(),
            estimator: estimator.cloned(),
            config,
            epoch,
        }
    }

    pub fn population(&self) -> Result<Population<P>> {
        Population::from_parts(self.slots.clone(), self.policies.clone())
    }
}

pub fn checkpoint_to_json<P: Serialize>(cp: &Checkpoint<P>) -> Result<String> {
    serde_json::to_string_pretty(cp).map_err(|e| crate::Error::Internal(e.to_string()))
}

pub fn checkpoint_from_json<P: for<'de> Deserialize<'de> + Clone + PartialEq>(text: &str) -> Result<Checkpoint<P>> {
    let cp: Checkpoint<P> = serde_json::from_str(text).map_err(|e| crate::Error::InvalidArgument(format!("line {}: {e}", e.line())))?;
    cp.population()?;
    Ok(cp)
}
