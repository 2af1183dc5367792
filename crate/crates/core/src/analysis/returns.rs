use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exact::{return_prob_sequence, vertical_evolve, LevelCap, ReturnSequence};
use crate::profiles::{ProfileWarning, StepProfile};

use super::{check_grid, Provenance, Verdict, VerificationReport};

/// `r_N = P(C(2N) = (0,0)) · 4 N p₀ π √(γ-1)` over `n_grid`, from a single
/// joint sweep to `2 max(n_grid)`.
pub fn theorem11_ratio(
    profile: &StepProfile<f64>,
    n_grid: &[usize],
    cap: LevelCap,
    tolerance: f64,
) -> Result<VerificationReport> {
    profile.gamma_above_one()?;
    check_grid(n_grid, 1)?;
    let seq = return_prob_sequence(profile, 2 * n_grid[n_grid.len() - 1], cap)?;
    theorem11_from_sequence(profile, &seq, n_grid, tolerance)
}

/// [`theorem11_ratio`] over an already computed return sequence, which
/// must reach step `2 max(n_grid)`.
pub fn theorem11_from_sequence(
    profile: &StepProfile<f64>,
    seq: &ReturnSequence<f64>,
    n_grid: &[usize],
    tolerance: f64,
) -> Result<VerificationReport> {
    let gamma = profile.gamma_above_one()?;
    check_grid(n_grid, 1)?;
    let top = 2 * n_grid[n_grid.len() - 1];
    if seq.probs.len() <= top {
        return Err(Error::InvalidArgument(format!(
            "return sequence stops at step {}, grid needs {top}",
            seq.probs.len() - 1
        )));
    }
    let p0 = profile.p_at(0);
    let scale = 4.0 * p0 * PI * (gamma - 1.0).sqrt();
    let values: Vec<f64> = n_grid.iter().map(|&n| seq.probs[2 * n]).collect();
    let ratios: Vec<f64> = n_grid
        .iter()
        .zip(&values)
        .map(|(&n, p)| p * n as f64 * scale)
        .collect();
    let mut metadata = BTreeMap::new();
    metadata.insert("gamma".into(), gamma);
    metadata.insert("p0".into(), p0);
    metadata.insert("cap".into(), seq.cap as f64);
    metadata.insert("error_bound".into(), seq.error_bound(top));
    Ok(VerificationReport {
        claim: "theorem_1_1".into(),
        // the constant c in P(C(2N) = 0) ~ c / N
        constant: Some(1.0 / scale),
        grid: n_grid.iter().map(|&n| n as f64).collect(),
        verdict: Verdict::from_ratios(&ratios, tolerance),
        values,
        ratios,
        tolerance,
        provenance: Provenance::Exact {
            trunc_loss: seq.trunc_loss[top],
        },
        metadata,
        notes: vec!["P(C(2N)=(0,0)) ~ 1/(4 N p0 pi sqrt(gamma-1))".into()],
    })
}

/// `√N · P(C₂(2N) = 0) · 4 p₀ √(π γ)` over `n_grid`.
pub fn lemma21_ratio(
    profile: &StepProfile<f64>,
    n_grid: &[usize],
    cap: LevelCap,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_grid(n_grid, 1)?;
    let gamma = profile.gamma()?;
    let mut notes = vec!["sqrt(N) P(C2(2N)=0) -> 1/(4 p0 sqrt(pi gamma))".to_string()];
    if let Some(w @ ProfileWarning::GammaNotAboveOne { .. }) = gamma.warning {
        notes.push(format!("warning: {w}"));
    }
    let gamma = gamma.value;
    let p0 = profile.p_at(0);
    let scale = 4.0 * p0 * (PI * gamma).sqrt();
    let top = 2 * n_grid[n_grid.len() - 1];
    let run = vertical_evolve(profile, top, cap)?;
    let values: Vec<f64> = n_grid.iter().map(|&n| run.origin[2 * n]).collect();
    let ratios: Vec<f64> = n_grid
        .iter()
        .zip(&values)
        .map(|(&n, p)| (n as f64).sqrt() * p * scale)
        .collect();
    let mut metadata = BTreeMap::new();
    metadata.insert("gamma".into(), gamma);
    metadata.insert("p0".into(), p0);
    metadata.insert("cap".into(), run.pmf.cap as f64);
    Ok(VerificationReport {
        claim: "lemma_2_1".into(),
        constant: Some(1.0 / scale),
        grid: n_grid.iter().map(|&n| n as f64).collect(),
        verdict: Verdict::from_ratios(&ratios, tolerance),
        values,
        ratios,
        tolerance,
        provenance: Provenance::Exact {
            trunc_loss: run.pmf.trunc_loss,
        },
        metadata,
        notes,
    })
}

/// `1 / (4 p₀ π √(γ-1))`, the almost-sure limsup constant of the origin
/// local time under the `log n log log log n` normalization.
pub fn limsup_constant(profile: &StepProfile<f64>) -> Result<f64> {
    let gamma = profile.gamma_above_one()?;
    Ok(1.0 / (4.0 * profile.p_at(0) * PI * (gamma - 1.0).sqrt()))
}
