//! Scalar abstractions shared by the exact engine and the profile code.
//!
//! [`Probability`] is the minimal field-like interface the dynamic programs
//! need; it is implemented for `f32`, `f64` and [`BigRational`], so the same
//! sweep can be run in floating point or in exact rational arithmetic.
//! [`Real`] adds transcendental functions for the diagnostics that need
//! logarithms and square roots.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, ToPrimitive, Zero};

/// A probability-valued scalar.
pub trait Probability:
    Clone + Debug + PartialOrd + Num + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `C(h, h/2) 2^-h`, the probability that a simple symmetric walk is back
    /// at the origin after `h` steps. Zero for odd `h`.
    fn central_binomial(h: u64) -> Self;

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// Lossy conversion used for reporting and tolerance checks.
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// A floating-point [`Probability`].
pub trait Real: Probability + Float + FloatConst + Copy {}

impl<T: Probability + Float + FloatConst + Copy> Real for T {}

/// Below this half-length the central binomial is formed as a direct product.
const DIRECT_PRODUCT_LIMIT: u64 = 16;

/// Remainder of Stirling's series: `ln Γ(n+1) - (n ln n - n + ln(2πn)/2)`.
fn stirling_remainder(n: f64) -> f64 {
    let r = n.recip();
    let r2 = r * r;
    r * (1.0 / 12.0
        - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))))
}

/// `C(2m, m) 4^-m` evaluated in log space.
///
/// `ln C(2m,m) - 2m ln 2 = ln Γ(2m+1) - 2 ln Γ(m+1) - 2m ln 2`; expanding both
/// log-gamma terms with Stirling's series the leading parts cancel exactly,
/// leaving `-ln(πm)/2` plus the difference of remainders. No large
/// intermediate logarithms are formed, so the relative error stays near one
/// ulp even for `m` in the millions.
pub(crate) fn central_binomial_f64(h: u64) -> f64 {
    if h % 2 == 1 {
        return 0.0;
    }
    let m = h / 2;
    if m < DIRECT_PRODUCT_LIMIT {
        return (1..=m).fold(1.0, |acc, k| acc * (2 * k - 1) as f64 / (2 * k) as f64);
    }
    let mf = m as f64;
    let log_weight = -0.5 * (std::f64::consts::PI * mf).ln() + stirling_remainder(2.0 * mf)
        - 2.0 * stirling_remainder(mf);
    log_weight.exp()
}

impl Probability for f64 {
    fn central_binomial(h: u64) -> Self {
        central_binomial_f64(h)
    }

    fn approx(&self) -> f64 {
        *self
    }
}

impl Probability for f32 {
    fn central_binomial(h: u64) -> Self {
        central_binomial_f64(h) as f32
    }
}

impl Probability for BigRational {
    fn central_binomial(h: u64) -> Self {
        if h % 2 == 1 {
            return BigRational::zero();
        }
        let m = h / 2;
        let mut binom = BigInt::one();
        for k in 0..m {
            binom = binom * BigInt::from(h - k) / BigInt::from(k + 1);
        }
        BigRational::new(binom, BigInt::one() << h as usize)
    }
}
