use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{expected_horizontal_steps, LevelCap};
use crate::scalar::Probability;

use super::ReplicaBatch;

/// Largest step count for which the exact `E[H_N]` is computed alongside.
pub const EXACT_MEAN_MAX_STEPS: u64 = 50_000;

/// Horizontal-step statistics of a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HnStatistics {
    pub n_steps: u64,
    pub replicas: usize,
    pub mean: f64,
    pub sd: f64,
    pub std_error: f64,
    pub gamma_star: f64,
    /// `|mean - γ* N|`.
    pub deviation: f64,
    /// `deviation / N^{3/4}`.
    pub normalized_deviation: f64,
    pub rho: f64,
    /// `N^{1-ρ}`.
    pub tail_threshold: f64,
    /// Fraction of replicas with `|H_N - γ* N| > N^{1-ρ}`.
    pub tail_frequency: f64,
    /// `2 / (N^{1-2ρ} ω²)`, reported next to the frequency.
    pub tail_bound: f64,
    pub exact_mean: Option<f64>,
    /// `(mean - exact_mean) / std_error`.
    pub exact_z: Option<f64>,
    /// Largest cut-off run length, embedding batches only.
    pub max_overshoot: Option<u64>,
}

pub fn hn_statistics(batch: &ReplicaBatch, rho: f64) -> Result<HnStatistics> {
    if batch.records.is_empty() {
        return Err(Error::InvalidArgument("empty replica batch".into()));
    }
    let gamma = batch.profile.gamma_above_one()?;
    let gamma_star = (gamma - 1.0) / gamma;
    let n = batch.n_steps as f64;
    let r = batch.records.len() as f64;

    let hs: Vec<f64> = batch.records.iter().map(|rec| rec.h_n as f64).collect();
    let mean = hs.iter().sum::<f64>() / r;
    let var = if hs.len() > 1 {
        hs.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / (r - 1.0)
    } else {
        0.0
    };
    let sd = var.sqrt();
    let std_error = sd / r.sqrt();

    let center = gamma_star * n;
    let tail_threshold = n.powf(1.0 - rho);
    let exceed = hs.iter().filter(|&&h| (h - center).abs() > tail_threshold).count();
    let omega = batch.profile.omega().approx();

    let exact_mean = if batch.n_steps <= EXACT_MEAN_MAX_STEPS {
        Some(expected_horizontal_steps(
            &batch.profile,
            batch.n_steps as usize,
            LevelCap::Auto,
        )?)
    } else {
        None
    };

    Ok(HnStatistics {
        n_steps: batch.n_steps,
        replicas: batch.records.len(),
        mean,
        sd,
        std_error,
        gamma_star,
        deviation: (mean - center).abs(),
        normalized_deviation: (mean - center).abs() / n.powf(0.75),
        rho,
        tail_threshold,
        tail_frequency: exceed as f64 / r,
        tail_bound: 2.0 / (n.powf(1.0 - 2.0 * rho) * omega * omega),
        exact_z: exact_mean.map(|e| (mean - e) / std_error),
        exact_mean,
        max_overshoot: batch.records.iter().filter_map(|rec| rec.overshoot).max(),
    })
}
