//! Goodness-of-fit helpers.

use std::collections::BTreeMap;
use std::hash::Hash;

use rand::RngExt;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::sim::rng_from_seed;

/// Kolmogorov-Smirnov distance between the empirical law of `sample` and a
/// continuous distribution function. Ties are handled exactly.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        let f = cdf(v);
        worst = worst.max((i as f64 / n - f).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    worst
}

/// KS distance between a lattice law given as ascending `(atom, mass)` pairs
/// and a continuous distribution function. Mass missing from the atoms
/// (truncation) is split evenly between the two tails.
pub fn ks_distance_lattice(atoms: &[(f64, f64)], cdf: impl Fn(f64) -> f64) -> f64 {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let mut below = (1.0 - total).max(0.0) / 2.0;
    let mut worst = 0.0f64;
    for &(x, m) in atoms {
        let f = cdf(x);
        worst = worst.max((below - f).abs());
        below += m;
        worst = worst.max((below - f).abs());
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Number of cells after pooling.
    pub cells: usize,
}

/// Pearson goodness of fit of `observed` counts against `expected`
/// probabilities. Cells with expected count below 5 are pooled into one
/// cell; observations outside the support of `expected` land there too.
pub fn chi_square_gof<K: Ord + Clone>(
    observed: &BTreeMap<K, u64>,
    expected: &BTreeMap<K, f64>,
) -> ChiSquare {
    let n: u64 = observed.values().sum();
    let n = n as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (k, &p) in expected {
        let e = p * n;
        let o = observed.get(k).copied().unwrap_or(0) as f64;
        if e < 5.0 {
            pooled_obs += o;
            pooled_exp += e;
        } else {
            stat += (o - e).powi(2) / e;
            cells += 1;
        }
    }
    pooled_obs += observed
        .iter()
        .filter(|(k, _)| !expected.contains_key(*k))
        .map(|(_, &o)| o as f64)
        .sum::<f64>();
    let residual = (n - expected.values().sum::<f64>() * n).max(0.0);
    pooled_exp += residual;
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    } else if pooled_obs > 0.0 {
        stat = f64::INFINITY;
    }
    let dof = cells.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map(|d| d.sf(stat))
            .unwrap_or(f64::NAN)
    };
    ChiSquare {
        statistic: stat,
        dof,
        p_value,
        cells,
    }
}

/// Total variation distance between two empirical distributions.
pub fn total_variation<K: Eq + Hash + Ord + Clone>(
    a: &BTreeMap<K, u64>,
    b: &BTreeMap<K, u64>,
) -> f64 {
    let na = a.values().sum::<u64>() as f64;
    let nb = b.values().sum::<u64>() as f64;
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / na;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / nb;
            (pa - pb).abs()
        })
        .sum::<f64>()
}

/// Percentile bootstrap interval of `stat` over resamples of `items`.
pub fn bootstrap_interval<T: Copy>(
    items: &[T],
    resamples: usize,
    confidence: f64,
    seed: u64,
    stat: impl Fn(&[T]) -> f64,
) -> (f64, f64) {
    if items.is_empty() || resamples == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut rng = rng_from_seed(seed);
    let mut buf = Vec::with_capacity(items.len());
    let mut draws: Vec<f64> = (0..resamples)
        .map(|_| {
            buf.clear();
            buf.extend((0..items.len()).map(|_| items[rng.random_range(0..items.len())]));
            stat(&buf)
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    let alpha = (1.0 - confidence) / 2.0;
    let pick = |q: f64| {
        let idx = ((resamples - 1) as f64 * q).round() as usize;
        draws[idx.min(resamples - 1)]
    };
    (pick(alpha), pick(1.0 - alpha))
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
