//! Step-probability profiles `j ↦ p_j` and their averaged quantities.
//!
//! A walk sitting on the horizontal line `y = j` moves up or down with
//! probability `p_j` each and left or right with probability `1/2 - p_j`
//! each. Three profile shapes are supported: constant, periodic in `j`, and an
//! explicit window of values with constant tails on either side.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Probability, Real};

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind<T> {
    Uniform(T),
    /// `p_j = values[j mod L]`.
    Periodic(Vec<T>),
    /// `p_j = values[j - window_min]` on the window, `tail_pos` above it and
    /// `tail_neg` below it.
    Table {
        window_min: i64,
        values: Vec<T>,
        tail_pos: T,
        tail_neg: T,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepProfile<T> {
    kind: ProfileKind<T>,
    omega: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum ProfileWarning {
    /// The return asymptotics need `gamma > 1`.
    GammaNotAboveOne { gamma: f64 },
    /// The fitted averaging-error exponent is not above 1/2.
    SlowAveraging { eta: f64 },
}

impl std::fmt::Display for ProfileWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::GammaNotAboveOne { gamma } => {
                write!(f, "gamma = {gamma} is not above 1; return asymptotics do not apply")
            }
            Self::SlowAveraging { eta } => {
                write!(f, "fitted averaging exponent eta = {eta} is not above 1/2")
            }
        }
    }
}

/// `gamma` together with a warning when it falls outside `(1, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamma<T> {
    pub value: T,
    pub warning: Option<ProfileWarning>,
}

impl<T: Probability> StepProfile<T> {
    pub fn uniform(p: T) -> Result<Self> {
        Self::new(ProfileKind::Uniform(p), None)
    }

    pub fn periodic(values: Vec<T>) -> Result<Self> {
        Self::new(ProfileKind::Periodic(values), None)
    }

    pub fn table(window_min: i64, values: Vec<T>, tail_pos: T, tail_neg: T) -> Result<Self> {
        Self::new(
            ProfileKind::Table {
                window_min,
                values,
                tail_pos,
                tail_neg,
            },
            None,
        )
    }

    /// Validates `kind` and the lower bound `omega`. Without an explicit
    /// bound the smallest listed probability is used. A profile with
    /// `p = 1/2` everywhere is accepted; it has `γ = 1`, which
    /// [`StepProfile::gamma`] flags.
    pub fn new(kind: ProfileKind<T>, omega: Option<T>) -> Result<Self> {
        let listed = listed_values(&kind);
        if listed.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for &(level, ref p) in &listed {
            if *p <= T::zero() || *p > T::half() {
                return Err(Error::InvalidProbability {
                    level,
                    value: p.approx(),
                });
            }
        }
        let min = listed
            .iter()
            .map(|(_, p)| p.clone())
            .reduce(|a, b| if b < a { b } else { a })
            .expect("nonempty");
        let omega = omega.unwrap_or_else(|| min.clone());
        if omega <= T::zero() || omega > min {
            return Err(Error::OmegaViolated {
                omega: omega.approx(),
                min: min.approx(),
            });
        }
        Ok(Self { kind, omega })
    }

    pub fn kind(&self) -> &ProfileKind<T> {
        &self.kind
    }

    pub fn omega(&self) -> &T {
        &self.omega
    }

    pub fn p_at(&self, j: i64) -> T {
        match &self.kind {
            ProfileKind::Uniform(p) => p.clone(),
            ProfileKind::Periodic(values) => {
                values[j.rem_euclid(values.len() as i64) as usize].clone()
            }
            ProfileKind::Table {
                window_min,
                values,
                tail_pos,
                tail_neg,
            } => {
                if j < *window_min {
                    tail_neg.clone()
                } else if j - window_min >= values.len() as i64 {
                    tail_pos.clone()
                } else {
                    values[(j - window_min) as usize].clone()
                }
            }
        }
    }

    /// Success probability `2 p_j` of the geometric horizontal run length.
    pub fn alpha_at(&self, j: i64) -> T {
        T::two() * self.p_at(j)
    }

    /// `p_j` for `j` in `lo..=hi`.
    pub fn levels(&self, lo: i64, hi: i64) -> Vec<T> {
        (lo..=hi).map(|j| self.p_at(j)).collect()
    }

    pub fn min_p(&self) -> T {
        listed_values(&self.kind)
            .into_iter()
            .map(|(_, p)| p)
            .reduce(|a, b| if b < a { b } else { a })
            .expect("validated profile is nonempty")
    }

    /// The Cesàro limit `gamma` with `2 gamma = lim n⁻¹ Σ_{j≤n} 1/p_{±j}`.
    pub fn gamma(&self) -> Result<Gamma<T>> {
        let value = match &self.kind {
            ProfileKind::Uniform(p) => T::one() / (T::two() * p.clone()),
            ProfileKind::Periodic(values) => {
                let total = values
                    .iter()
                    .fold(T::zero(), |acc, p| acc + T::one() / p.clone());
                total / (T::two() * T::from_usize(values.len()).expect("period fits"))
            }
            ProfileKind::Table {
                tail_pos, tail_neg, ..
            } => {
                if tail_pos != tail_neg {
                    return Err(Error::AsymmetricTails {
                        pos: tail_pos.approx(),
                        neg: tail_neg.approx(),
                    });
                }
                T::one() / (T::two() * tail_pos.clone())
            }
        };
        let warning = (value <= T::one())
            .then(|| ProfileWarning::GammaNotAboveOne { gamma: value.approx() });
        Ok(Gamma { value, warning })
    }

    /// `gamma`, failing with [`Error::GammaNotAboveOne`] unless it exceeds one.
    pub fn gamma_above_one(&self) -> Result<T> {
        let gamma = self.gamma()?;
        match gamma.warning {
            Some(ProfileWarning::GammaNotAboveOne { gamma }) => {
                Err(Error::GammaNotAboveOne { gamma })
            }
            _ => Ok(gamma.value),
        }
    }

    /// Converts the profile to another scalar type through `f64`.
    pub fn cast<U: Probability>(&self) -> StepProfile<U> {
        let conv = |p: &T| U::from_f64(p.approx()).expect("finite probability");
        let kind = match &self.kind {
            ProfileKind::Uniform(p) => ProfileKind::Uniform(conv(p)),
            ProfileKind::Periodic(v) => ProfileKind::Periodic(v.iter().map(conv).collect()),
            ProfileKind::Table {
                window_min,
                values,
                tail_pos,
                tail_neg,
            } => ProfileKind::Table {
                window_min: *window_min,
                values: values.iter().map(conv).collect(),
                tail_pos: conv(tail_pos),
                tail_neg: conv(tail_neg),
            },
        };
        StepProfile {
            kind,
            omega: conv(&self.omega),
        }
    }
}

/// Every explicitly stated probability, tagged with a representative level.
fn listed_values<T: Clone>(kind: &ProfileKind<T>) -> Vec<(i64, T)> {
    match kind {
        ProfileKind::Uniform(p) => vec![(0, p.clone())],
        ProfileKind::Periodic(values) => values
            .iter()
            .enumerate()
            .map(|(i, p)| (i as i64, p.clone()))
            .collect(),
        ProfileKind::Table {
            window_min,
            values,
            tail_pos,
            tail_neg,
        } => {
            let top = window_min + values.len() as i64;
            let mut out: Vec<_> = values
                .iter()
                .enumerate()
                .map(|(i, p)| (window_min + i as i64, p.clone()))
                .collect();
            out.push((top, tail_pos.clone()));
            out.push((window_min - 1, tail_neg.clone()));
            out
        }
    }
}

/// Prefix averages `κ_j = j⁻¹ Σ_{k=1..j} 1/p_k` and
/// `β_j = j⁻¹ Σ_{k=1..j} 1/p_{-k}` for `j = 1..=j_max`.
pub fn kappa_beta<T: Probability>(profile: &StepProfile<T>, j_max: usize) -> (Vec<T>, Vec<T>) {
    let mut kappa = Vec::with_capacity(j_max);
    let mut beta = Vec::with_capacity(j_max);
    let (mut up, mut down) = (T::zero(), T::zero());
    for j in 1..=j_max {
        up = up + T::one() / profile.p_at(j as i64);
        down = down + T::one() / profile.p_at(-(j as i64));
        let jt = T::from_usize(j).expect("index fits");
        kappa.push(up.clone() / jt.clone());
        beta.push(down.clone() / jt);
    }
    (kappa, beta)
}

/// `(κ_n, β_n)`, the two one-sided averages at a single `n ≥ 1`.
pub fn one_sided_averages<T: Probability>(profile: &StepProfile<T>, n: usize) -> (T, T) {
    let (kappa, beta) = kappa_beta(profile, n);
    (
        kappa.last().cloned().unwrap_or_else(T::zero),
        beta.last().cloned().unwrap_or_else(T::zero),
    )
}

/// One row `j, j|κ_j - 2γ|, j|β_j - 2γ|` of the averaging-error table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationRow {
    pub j: usize,
    pub upper: f64,
    pub lower: f64,
}

/// `j |κ_j - 2γ|` and `j |β_j - 2γ|`, whose growth is bounded by `C j^{1-η}`
/// under the averaging condition.
pub fn kappa_deviation_table<T: Probability>(
    profile: &StepProfile<T>,
    j_max: usize,
) -> Result<Vec<DeviationRow>> {
    let two_gamma = 2.0 * profile.gamma()?.value.approx();
    let (kappa, beta) = kappa_beta(profile, j_max);
    Ok(kappa
        .iter()
        .zip(&beta)
        .enumerate()
        .map(|(i, (k, b))| {
            let j = i + 1;
            DeviationRow {
                j,
                upper: j as f64 * (k.approx() - two_gamma).abs(),
                lower: j as f64 * (b.approx() - two_gamma).abs(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeydeRow {
    pub n: usize,
    pub upper: f64,
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeydeCheck {
    pub gamma_hat: f64,
    /// Fitted decay exponent of `|n⁻¹ Σ 1/p_{±j} - 2γ|`; infinite when the
    /// averages sit on the limit to rounding over the fitted range.
    pub eta_hat: f64,
    pub residuals: Vec<HeydeRow>,
}

pub const DEFAULT_SIDES_TOLERANCE: f64 = 1e-3;

/// Estimates `gamma` and the averaging exponent `eta` from the one-sided
/// averages up to `n_max`.
///
/// `eta_hat` is the least-squares slope of `ln |avg - 2 gamma_hat|` against
/// `-ln n` over `n_max/2..=n_max`, clamped at zero. Residuals below the
/// rounding floor are left out of the fit.
pub fn check_heyde<T: Real>(
    profile: &StepProfile<T>,
    n_max: usize,
    tolerance: f64,
) -> Result<HeydeCheck> {
    if n_max < 100 {
        return Err(Error::InvalidArgument(format!(
            "check_heyde needs n_max >= 100, got {n_max}"
        )));
    }
    let (kappa, beta) = kappa_beta(profile, n_max);
    let upper = kappa[n_max - 1].approx();
    let lower = beta[n_max - 1].approx();
    if (upper - lower).abs() > tolerance * upper.max(lower) {
        return Err(Error::SidesDisagree {
            n: n_max,
            upper,
            lower,
        });
    }
    let gamma_hat = (upper + lower) / 4.0;
    let two_gamma = 2.0 * gamma_hat;
    let residuals: Vec<HeydeRow> = kappa
        .iter()
        .zip(&beta)
        .enumerate()
        .map(|(i, (k, b))| HeydeRow {
            n: i + 1,
            upper: k.approx() - two_gamma,
            lower: b.approx() - two_gamma,
        })
        .collect();

    let floor = 64.0 * f64::EPSILON * two_gamma;
    let points: Vec<(f64, f64)> = residuals[n_max / 2 - 1..]
        .iter()
        .filter_map(|row| {
            let err = row.upper.abs().max(row.lower.abs());
            (err > floor).then(|| (-(row.n as f64).ln(), err.ln()))
        })
        .collect();
    let eta_hat = least_squares_slope(&points).map_or(f64::INFINITY, |s| s.max(0.0));

    Ok(HeydeCheck {
        gamma_hat,
        eta_hat,
        residuals,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Averaged quantities of a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileDiagnostics {
    pub gamma: f64,
    pub eta_estimate: f64,
    pub kappa_seq: Vec<f64>,
    pub beta_seq: Vec<f64>,
    /// Limiting horizontal step fraction `(γ-1)/γ`.
    pub gamma_star: f64,
    /// CLT scale `1/√γ` of the vertical coordinate.
    pub sigma: f64,
    /// Mean of `1/p` over long stretches, `2γ`.
    pub mu_stenlund: f64,
    pub omega: f64,
    pub p0: f64,
    pub warnings: Vec<ProfileWarning>,
}

pub fn diagnostics<T: Real>(
    profile: &StepProfile<T>,
    n_max: usize,
    j_max: usize,
    tolerance: f64,
) -> Result<ProfileDiagnostics> {
    let gamma = profile.gamma()?;
    let heyde = check_heyde(profile, n_max, tolerance)?;
    let (kappa, beta) = kappa_beta(profile, j_max);
    let g = gamma.value.approx();
    let mut warnings: Vec<_> = gamma.warning.into_iter().collect();
    if heyde.eta_hat <= 0.5 {
        warnings.push(ProfileWarning::SlowAveraging {
            eta: heyde.eta_hat,
        });
    }
    Ok(ProfileDiagnostics {
        gamma: g,
        eta_estimate: heyde.eta_hat,
        kappa_seq: kappa.iter().map(Probability::approx).collect(),
        beta_seq: beta.iter().map(Probability::approx).collect(),
        gamma_star: (g - 1.0) / g,
        sigma: g.sqrt().recip(),
        mu_stenlund: 2.0 * g,
        omega: profile.omega().approx(),
        p0: profile.p_at(0).approx(),
        warnings,
    })
}

/// JSON form of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileConfig {
    Uniform {
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
    },
    Periodic {
        p: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
    },
    Table {
        window_min: i64,
        values: Vec<f64>,
        tail_pos: f64,
        tail_neg: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
    },
}

impl StepProfile<f64> {
    pub fn from_config(config: &ProfileConfig) -> Result<Self> {
        match config.clone() {
            ProfileConfig::Uniform { p, omega } => Self::new(ProfileKind::Uniform(p), omega),
            ProfileConfig::Periodic { p, omega } => Self::new(ProfileKind::Periodic(p), omega),
            ProfileConfig::Table {
                window_min,
                values,
                tail_pos,
                tail_neg,
                omega,
            } => Self::new(
                ProfileKind::Table {
                    window_min,
                    values,
                    tail_pos,
                    tail_neg,
                },
                omega,
            ),
        }
    }

    pub fn to_config(&self) -> ProfileConfig {
        let omega = Some(self.omega);
        match &self.kind {
            ProfileKind::Uniform(p) => ProfileConfig::Uniform { p: *p, omega },
            ProfileKind::Periodic(v) => ProfileConfig::Periodic {
                p: v.clone(),
                omega,
            },
            ProfileKind::Table {
                window_min,
                values,
                tail_pos,
                tail_neg,
            } => ProfileConfig::Table {
                window_min: *window_min,
                values: values.clone(),
                tail_pos: *tail_pos,
                tail_neg: *tail_neg,
                omega,
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_config(&serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
