use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::exact::{VerticalSweep, LevelCap, MAX_TRUNCATION_LOSS};
use crate::profiles::StepProfile;
use crate::sim::ReplicaBatch;

use super::stats::{ks_distance, ks_distance_lattice};
use super::{check_grid, Provenance, Verdict, VerificationReport};

/// Row suprema of `T(n,N) = √n Σ_{m=n..N} (P(C₂(2m+2)=0) - P(C₂(2m+1)=0))`
/// over `n <= N <= (M-2)/2`, where `M + 1` origin probabilities are given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionIii {
    pub horizon: usize,
    /// `sup_n √n sup_N Σ ...`, never below zero because of the `n = 0` row.
    pub sup_signed: f64,
    /// The same with the inner sum in absolute value.
    pub sup_abs: f64,
    pub argmax_signed: usize,
    pub argmax_abs: usize,
    pub row_signed: Vec<f64>,
    pub row_abs: Vec<f64>,
}

pub fn condition_iii_sups(origin: &[f64]) -> Result<ConditionIii> {
    if origin.len() < 3 {
        return Err(Error::InvalidArgument(
            "condition (iii) needs P(C2(m)=0) up to m >= 2".into(),
        ));
    }
    let horizon = origin.len() - 1;
    let top = (horizon - 2) / 2;
    // prefix[k] = Σ_{m<k} d_m
    let mut prefix = Vec::with_capacity(top + 2);
    prefix.push(0.0);
    for m in 0..=top {
        let d = origin[2 * m + 2] - origin[2 * m + 1];
        prefix.push(prefix[m] + d);
    }
    let mut suffix_max = prefix.clone();
    let mut suffix_min = prefix.clone();
    for k in (0..top + 1).rev() {
        suffix_max[k] = suffix_max[k].max(suffix_max[k + 1]);
        suffix_min[k] = suffix_min[k].min(suffix_min[k + 1]);
    }
    let mut row_signed = Vec::with_capacity(top + 1);
    let mut row_abs = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let root = (n as f64).sqrt();
        let hi = suffix_max[n + 1] - prefix[n];
        let lo = suffix_min[n + 1] - prefix[n];
        row_signed.push(root * hi + 0.0);
        row_abs.push(root * hi.abs().max(lo.abs()));
    }
    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
    };
    let (argmax_signed, sup_signed) = argmax(&row_signed);
    let (argmax_abs, sup_abs) = argmax(&row_abs);
    Ok(ConditionIii {
        horizon,
        sup_signed,
        sup_abs,
        argmax_signed,
        argmax_abs,
        row_signed,
        row_abs,
    })
}

/// Roughly log-spaced sample of `0..=top` for reporting.
fn log_grid(top: usize) -> Vec<usize> {
    let mut grid = vec![0];
    let mut x = 1.0f64;
    while (x as usize) <= top {
        if grid.last() != Some(&(x as usize)) {
            grid.push(x as usize);
        }
        x *= 10f64.powf(0.25);
    }
    if grid.last() != Some(&top) {
        grid.push(top);
    }
    grid
}

/// Finite-horizon look at condition (iii). The verdict is at best `trend`:
/// it reports whether the row suprema in the top decade of `n` stay within
/// `tolerance` of the largest row supremum below it.
pub fn condition_iii_check(origin: &[f64], tolerance: f64) -> Result<VerificationReport> {
    let sups = condition_iii_sups(origin)?;
    let top = sups.row_abs.len() - 1;
    let split = top / 10;
    let early = sups.row_abs[..=split].iter().cloned().fold(0.0, f64::max);
    let late = sups.row_abs[split + 1..].iter().cloned().fold(0.0, f64::max);
    let stable = late <= (1.0 + tolerance) * early;
    let grid = log_grid(top);
    let mut metadata = BTreeMap::new();
    metadata.insert("horizon".into(), sups.horizon as f64);
    metadata.insert("sup_signed".into(), sups.sup_signed);
    metadata.insert("sup_abs".into(), sups.sup_abs);
    metadata.insert("argmax_signed".into(), sups.argmax_signed as f64);
    metadata.insert("argmax_abs".into(), sups.argmax_abs as f64);
    metadata.insert("top_decade_sup_abs".into(), late);
    Ok(VerificationReport {
        claim: "condition_iii".into(),
        constant: None,
        values: grid.iter().map(|&n| sups.row_signed[n]).collect(),
        ratios: grid
            .iter()
            .map(|&n| {
                if sups.sup_abs > 0.0 {
                    sups.row_abs[n] / sups.sup_abs
                } else {
                    0.0
                }
            })
            .collect(),
        grid: grid.iter().map(|&n| n as f64).collect(),
        tolerance,
        verdict: if stable { Verdict::Trend } else { Verdict::Fail },
        provenance: Provenance::Exact { trunc_loss: 0.0 },
        metadata,
        notes: vec![
            "values: sqrt(n) sup_N sum_{m=n..N} (P(C2(2m+2)=0) - P(C2(2m+1)=0)); \
             ratios: the same with |sum|, relative to its maximum"
                .into(),
            "a finite horizon cannot certify a supremum; the best verdict is trend".into(),
        ],
    })
}

/// `K̂(n) = √n max_k P(C₂(n) = k)` over `n_grid`. Passes when `K̂` is
/// non-increasing over the top decade of the grid or stays within
/// `tolerance` of its earlier maximum.
pub fn condition_a3_check(
    profile: &StepProfile<f64>,
    n_grid: &[usize],
    cap: LevelCap,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_grid(n_grid, 1)?;
    let top = n_grid[n_grid.len() - 1];
    let mut sweep = VerticalSweep::new(profile, cap.resolve(top));
    let mut values = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        while sweep.steps() < n {
            sweep.step();
        }
        values.push((n as f64).sqrt() * sweep.max_mass());
    }
    let loss = *sweep.trunc_loss();
    if loss > MAX_TRUNCATION_LOSS {
        return Err(Error::CapTooSmall {
            cap: sweep.cap(),
            loss,
        });
    }
    let first_top = n_grid.iter().position(|&n| n * 10 > top).unwrap_or(0);
    let (earlier, latest) = values.split_at(first_top);
    let earlier_max = earlier.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let latest_max = latest.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bounded = latest.windows(2).all(|w| w[1] <= w[0])
        || latest_max <= (1.0 + tolerance) * earlier_max;
    let mut metadata = BTreeMap::new();
    metadata.insert(
        "k_hat_max".into(),
        values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    Ok(VerificationReport {
        claim: "condition_a3".into(),
        constant: None,
        grid: n_grid.iter().map(|&n| n as f64).collect(),
        ratios: Vec::new(),
        values,
        tolerance,
        verdict: if bounded { Verdict::Pass } else { Verdict::Fail },
        provenance: Provenance::Exact { trunc_loss: loss },
        metadata,
        notes: vec!["values: sqrt(n) max_k P(C2(n)=k)".into()],
    })
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid parameters")
}

/// KS distance between the exact law of `√(γ/n) C₂(n)` and `N(0,1)` over
/// `n_grid`. Passes when the last distance is at most `tolerance`; `trend`
/// when the distances decrease along the grid.
pub fn clt_check(
    profile: &StepProfile<f64>,
    n_grid: &[usize],
    cap: LevelCap,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_grid(n_grid, 1)?;
    let gamma = profile.gamma()?.value;
    let normal = standard_normal();
    let top = n_grid[n_grid.len() - 1];
    let mut sweep = VerticalSweep::new(profile, cap.resolve(top));
    let mut values = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        while sweep.steps() < n {
            sweep.step();
        }
        let scale = (gamma / n as f64).sqrt();
        let cap = sweep.cap() as i64;
        let atoms: Vec<(f64, f64)> = sweep
            .mass()
            .iter()
            .enumerate()
            .map(|(i, &m)| ((i as i64 - cap) as f64 * scale, m))
            .collect();
        values.push(ks_distance_lattice(&atoms, |x| normal.cdf(x)));
    }
    let loss = *sweep.trunc_loss();
    let last = values[values.len() - 1];
    let verdict = if last <= tolerance {
        Verdict::Pass
    } else if values.windows(2).all(|w| w[1] < w[0]) && values.len() > 1 {
        Verdict::Trend
    } else {
        Verdict::Fail
    };
    let mut metadata = BTreeMap::new();
    metadata.insert("gamma".into(), gamma);
    metadata.insert("sigma".into(), 1.0 / gamma.sqrt());
    Ok(VerificationReport {
        claim: "clt".into(),
        constant: None,
        grid: n_grid.iter().map(|&n| n as f64).collect(),
        values,
        ratios: Vec::new(),
        tolerance,
        verdict,
        provenance: Provenance::Exact { trunc_loss: loss },
        metadata,
        notes: vec!["values: KS distance of sqrt(gamma/n) C2(n) to N(0,1)".into()],
    })
}

/// Empirical version of [`clt_check`] from the final levels of a batch.
pub fn clt_check_empirical(batch: &ReplicaBatch, tolerance: f64) -> Result<VerificationReport> {
    if batch.records.is_empty() || batch.n_steps == 0 {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let gamma = batch.profile.gamma()?.value;
    let scale = (gamma / batch.n_steps as f64).sqrt();
    let sample: Vec<f64> = batch
        .records
        .iter()
        .map(|r| r.final_pos.1 as f64 * scale)
        .collect();
    let normal = standard_normal();
    let d = ks_distance(&sample, |x| normal.cdf(x));
    // asymptotic 95% KS critical value
    let critical = 1.358 / (sample.len() as f64).sqrt();
    let mut metadata = BTreeMap::new();
    metadata.insert("gamma".into(), gamma);
    metadata.insert("ks_critical_95".into(), critical);
    Ok(VerificationReport {
        claim: "clt".into(),
        constant: None,
        grid: vec![batch.n_steps as f64],
        values: vec![d],
        ratios: Vec::new(),
        tolerance,
        verdict: if d <= tolerance { Verdict::Pass } else { Verdict::Fail },
        provenance: Provenance::MonteCarlo {
            replicas: batch.records.len(),
            base_seed: batch.base_seed,
            intervals: vec![(0.0, d + critical)],
            confidence: 0.95,
        },
        metadata,
        notes: vec!["values: KS distance of sqrt(gamma/N) C2(N) to N(0,1), Monte Carlo".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::vertical_evolve;
    use proptest::prelude::*;

    fn brute_sups(origin: &[f64]) -> (f64, f64) {
        let top = (origin.len() - 1 - 2) / 2;
        let (mut signed, mut abs) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for n in 0..=top {
            let (mut best, mut best_abs) = (f64::NEG_INFINITY, 0.0f64);
            for big_n in n..=top {
                let s: f64 = (n..=big_n).map(|m| origin[2 * m + 2] - origin[2 * m + 1]).sum();
                best = best.max(s);
                best_abs = best_abs.max(s.abs());
            }
            signed = signed.max((n as f64).sqrt() * best);
            abs = abs.max((n as f64).sqrt() * best_abs);
        }
        (signed, abs)
    }

    #[test]
    fn suffix_sweep_matches_brute_force() {
        for values in [vec![0.25_f64], vec![0.25, 0.5], vec![0.2, 0.35, 0.5]] {
            let profile = StepProfile::periodic(values).unwrap();
            let run = vertical_evolve(&profile, 301, LevelCap::Auto).unwrap();
            let fast = condition_iii_sups(&run.origin).unwrap();
            let (signed, abs) = brute_sups(&run.origin);
            assert!((fast.sup_signed - signed).abs() <= 1e-12);
            assert!((fast.sup_abs - abs).abs() <= 1e-12);
        }
    }

    proptest! {
        #[test]
        fn suffix_sweep_matches_brute_force_on_arbitrary_sequences(
            seq in prop::collection::vec(0.0f64..1.0, 3..60)
        ) {
            let fast = condition_iii_sups(&seq).unwrap();
            let (signed, abs) = brute_sups(&seq);
            prop_assert!((fast.sup_signed - signed).abs() <= 1e-12);
            prop_assert!((fast.sup_abs - abs).abs() <= 1e-12);
        }
    }

    #[test]
    fn lazy_walk_has_zero_signed_sup() {
        // p <= 1/4 makes the even/odd differences negative
        let profile = StepProfile::uniform(0.25).unwrap();
        let run = vertical_evolve(&profile, 2001, LevelCap::Auto).unwrap();
        let sups = condition_iii_sups(&run.origin).unwrap();
        assert_eq!(sups.sup_signed, 0.0);
        assert!(sups.sup_abs > 0.0 && sups.sup_abs.is_finite());
        let report = condition_iii_check(&run.origin, 0.1).unwrap();
        assert_eq!(report.verdict, Verdict::Trend);
    }

    #[test]
    fn too_short_sequence_rejected() {
        assert!(condition_iii_sups(&[1.0, 0.5]).is_err());
    }

    #[test]
    fn a3_on_the_plain_vertical_walk() {
        let profile = StepProfile::uniform(0.5).unwrap();
        let report =
            condition_a3_check(&profile, &[10, 100, 1000, 10_000], LevelCap::Auto, 0.05).unwrap();
        let limit = (2.0 / std::f64::consts::PI).sqrt();
        assert!((report.values[3] - limit).abs() < 1e-3);
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn a3_single_step() {
        let profile = StepProfile::uniform(0.2).unwrap();
        let report = condition_a3_check(&profile, &[1], LevelCap::Auto, 0.05).unwrap();
        assert!((report.values[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn clt_distance_shrinks() {
        let profile = StepProfile::uniform(0.25).unwrap();
        let report = clt_check(&profile, &[100, 1000, 10_000], LevelCap::Auto, 0.02).unwrap();
        assert!(report.values.windows(2).all(|w| w[1] < w[0]));
        assert!(report.values[2] <= 0.02);
        assert_eq!(report.verdict, Verdict::Pass);
        let one = clt_check(&profile, &[1], LevelCap::Auto, 0.02).unwrap();
        assert!(one.values[0] > 0.2);
    }
}
