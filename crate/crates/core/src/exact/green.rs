use crate::error::{Error, Result};
use crate::profiles::StepProfile;
use crate::scalar::{Probability, Real};

use super::{return_prob_sequence, LevelCap};

/// Truncated Green function `g(N) = Σ_{k<=N} P(C(k) = (0,0))`.
#[derive(Debug, Clone)]
pub struct GreenFunction<T> {
    /// `g[N]` for `N = 0..=n_max`.
    pub g: Vec<T>,
    /// `g(N) · 4 p₀ π √(γ-1) / ln N`; NaN for `N < 2` or `γ <= 1`.
    pub normalized: Vec<f64>,
    pub trunc_loss: f64,
}

impl<T: Probability> GreenFunction<T> {
    pub fn at(&self, n: usize) -> &T {
        &self.g[n]
    }
}

/// `4 p₀ π √(γ-1)`, the reciprocal of the leading return-probability constant.
pub(crate) fn return_scale(p0: f64, gamma: f64) -> f64 {
    4.0 * p0 * std::f64::consts::PI * (gamma - 1.0).sqrt()
}

fn normalize(g: &[f64], scale: f64) -> Vec<f64> {
    g.iter()
        .enumerate()
        .map(|(n, gn)| {
            if n < 2 || !scale.is_finite() || scale <= 0.0 {
                f64::NAN
            } else {
                gn * scale / (n as f64).ln()
            }
        })
        .collect()
}

pub fn green_function<T: Real>(
    profile: &StepProfile<T>,
    n_max: usize,
    cap: LevelCap,
) -> Result<GreenFunction<T>> {
    if n_max % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "green function horizon must be even, got {n_max}"
        )));
    }
    let seq = return_prob_sequence(profile, n_max, cap)?;
    let g: Vec<T> = seq
        .probs
        .iter()
        .scan(T::zero(), |acc, p| {
            *acc = *acc + *p;
            Some(*acc)
        })
        .collect();
    let gamma = profile.gamma()?.value.approx();
    let scale = return_scale(profile.p_at(0).approx(), gamma);
    let plain: Vec<f64> = g.iter().map(Probability::approx).collect();
    Ok(GreenFunction {
        normalized: normalize(&plain, scale),
        g,
        trunc_loss: seq.trunc_loss[n_max].approx(),
    })
}

/// Green function of the isotropic walk (`p ≡ 1/4`), where the return
/// probability factorizes as `P(C(2N) = 0) = (C(2N,N) 4^-N)²`.
pub fn isotropic_green_function(n_max: usize) -> GreenFunction<f64> {
    let g: Vec<f64> = (0..=n_max as u64)
        .scan(0.0, |acc, k| {
            *acc += f64::central_binomial(k).powi(2);
            Some(*acc)
        })
        .collect();
    GreenFunction {
        normalized: normalize(&g, return_scale(0.25, 2.0)),
        g,
        trunc_loss: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_at_one_and_never_decreases() {
        for values in [vec![0.25_f64], vec![0.25, 0.5], vec![0.2, 0.35, 0.5]] {
            let profile = StepProfile::periodic(values).unwrap();
            let green = green_function(&profile, 200, LevelCap::Auto).unwrap();
            assert_eq!(green.g[0], 1.0);
            assert!(green.g.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn rejects_odd_horizon() {
        let profile = StepProfile::uniform(0.25).unwrap();
        assert!(green_function(&profile, 11, LevelCap::Auto).is_err());
    }

    #[test]
    fn isotropic_closed_form_matches_sweep() {
        let profile = StepProfile::uniform(0.25).unwrap();
        let swept = green_function(&profile, 600, LevelCap::Auto).unwrap();
        let closed = isotropic_green_function(600);
        for (a, b) in swept.g.iter().zip(&closed.g) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn isotropic_growth_is_log_over_pi() {
        // g(N) = ln N / π + O(1); the normalized sequence drifts toward 1
        let green = isotropic_green_function(2_000_000);
        let early = green.normalized[1_000];
        let late = green.normalized[2_000_000];
        assert!((late - 1.0).abs() < (early - 1.0).abs());
        assert!((late - 1.0).abs() < 0.25, "late = {late}");
    }
}
