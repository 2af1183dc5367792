//! Verdicts on the checkable claims, built from exact sequences and
//! replica batches.

mod conditions;
mod local_time;
mod returns;
mod sampling;
pub mod stats;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

pub use conditions::{
    clt_check, clt_check_empirical, condition_a3_check, condition_iii_check,
    condition_iii_sups, ConditionIii,
};
pub use local_time::{darling_kac_check, exact_green, invariant_ratio_law, DarlingKacSample};
pub use returns::{lemma21_ratio, limsup_constant, theorem11_from_sequence, theorem11_ratio};
pub use sampling::{engine_equivalence, return_frequency_check};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Trend,
    Fail,
}

impl Verdict {
    /// `Pass` when the last ratio is within `tolerance` of one; `Trend` when
    /// `|ratio - 1|` never grows over the last half of the grid; else `Fail`.
    pub fn from_ratios(ratios: &[f64], tolerance: f64) -> Self {
        let Some(last) = ratios.last() else {
            return Self::Fail;
        };
        if (last - 1.0).abs() <= tolerance {
            return Self::Pass;
        }
        let tail = &ratios[ratios.len() / 2..];
        if tail.len() >= 2 && tail.windows(2).all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs()) {
            Self::Trend
        } else {
            Self::Fail
        }
    }

    pub fn is_fail(self) -> bool {
        self == Self::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Trend => "trend",
            Self::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Exact {
        /// Largest truncation loss over the sweeps behind the values.
        trunc_loss: f64,
    },
    MonteCarlo {
        replicas: usize,
        base_seed: u64,
        /// Confidence interval per grid point, aligned with `values`.
        intervals: Vec<(f64, f64)>,
        confidence: f64,
    },
}

/// Outcome of one claim check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    /// Theoretical value, when the claim names one.
    pub constant: Option<f64>,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub ratios: Vec<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub provenance: Provenance,
    /// Named scalars specific to the claim.
    pub metadata: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn meta(&self, key: &str) -> Option<f64> {
        self.metadata.get(key).copied()
    }

    /// One row per grid point, for tabular output.
    pub fn rows(&self) -> Vec<ReportRow> {
        self.grid
            .iter()
            .enumerate()
            .map(|(i, &g)| ReportRow {
                claim: self.claim.clone(),
                grid: g,
                value: self.values.get(i).copied().unwrap_or(f64::NAN),
                ratio: self.ratios.get(i).copied().unwrap_or(f64::NAN),
                constant: self.constant.unwrap_or(f64::NAN),
                tolerance: self.tolerance,
                verdict: self.verdict,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub claim: String,
    pub grid: f64,
    pub value: f64,
    pub ratio: f64,
    pub constant: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Checks that a scale grid is nonempty, strictly ascending and `>= min`.
pub(crate) fn check_grid(grid: &[usize], min: usize) -> crate::Result<()> {
    use crate::error::Error;
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if grid[0] < min {
        return Err(Error::InvalidArgument(format!(
            "grid values must be at least {min}, got {}",
            grid[0]
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be strictly ascending".into()));
    }
    Ok(())
}
