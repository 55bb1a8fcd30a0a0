//! Structured experiment output: per-cell discrepancy rows, report totals,
//! and deterministic CSV rendering.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Spectral-gap exponent used in reported bounds. 0 <= theta <= 1/2; the
/// unconditional value is 7/64, the optimistic one is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta(f64);

impl Theta {
    pub const UNCONDITIONAL: Theta = Theta(7.0 / 64.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&value) {
            return Err(Error::invalid(format!(
                "theta must lie in [0, 1/2], got {value}"
            )));
        }
        Ok(Theta(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl Default for Theta {
    fn default() -> Self {
        Theta::UNCONDITIONAL
    }
}

/// One modulus cell of an experiment: an exactly enumerated weighted count,
/// its density main term, and their difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    /// Cell identifier: a divisor d, a grouped modulus k, or an (m, n) block.
    pub cell: String,
    pub exact_count: f64,
    pub main_term: f64,
    pub error: f64,
}

impl DiscrepancyRow {
    pub fn new(cell: impl Into<String>, exact_count: f64, main_term: f64) -> Self {
        DiscrepancyRow {
            cell: cell.into(),
            exact_count,
            main_term,
            error: exact_count - main_term,
        }
    }
}

/// A full experiment record: parameters, per-cell rows, aggregate error, the
/// trivial (positivity) bound, the target bound at the chosen theta, and the
/// measured ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: BTreeMap<String, String>,
    pub rows: Vec<DiscrepancyRow>,
    /// Aggregate of the row errors. Absolute values are taken per row or on
    /// the total depending on the experiment's target quantity; see the
    /// constructing function.
    pub total_error: f64,
    pub trivial_bound: f64,
    pub target_bound: f64,
    pub ratio_to_bound: f64,
    pub runtime_secs: f64,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell,exact_count,main_term,error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.cell,
                fmt_f64(r.exact_count),
                fmt_f64(r.main_term),
                fmt_f64(r.error)
            ));
        }
        out
    }
}

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
