//! Exact finite-step probabilities.
//!
//! The vertical coordinate on its own is a lazy birth-death chain, so its law
//! is obtained by a one-dimensional sweep over levels. Conditioned on the
//! number `h` of horizontal steps, the horizontal coordinate is a simple
//! symmetric walk independent of the vertical path, so the probability of
//! being back at the origin is `Σ_h P(C₂ = 0, H = h) · C(h, h/2) 2^-h`. The
//! joint sweep over `(level, h)` provides the first factor.
//!
//! Every sweep keeps the levels inside `±cap` and books the mass that steps
//! outside into a truncation-loss ledger; nothing is ever renormalized.

mod green;
mod joint;
mod oracle;
mod vertical;

use std::fmt;
use std::str::FromStr;

pub use green::{green_function, isotropic_green_function, GreenFunction};
pub use joint::{
    joint_evolve, return_prob_exact, return_prob_sequence, JointPmf, JointSweep, ReturnProb,
    ReturnSequence,
};
pub use oracle::{
    brute_force_distribution, brute_force_return, brute_force_vertical, BRUTE_FORCE_MAX_STEPS,
};
pub use vertical::{
    expected_horizontal_steps, vertical_evolve, VerticalPmf, VerticalRun, VerticalSweep,
};

use crate::error::{Error, Result};
use crate::scalar::Probability;

/// Truncation loss above which a sweep reports [`Error::CapTooSmall`].
pub const MAX_TRUNCATION_LOSS: f64 = 1e-9;

/// Per-step floating-point allowance used in the documented accuracy bound
/// of [`return_prob_exact`].
pub const PER_STEP_ROUNDING: f64 = 1e-12;

/// Largest level magnitude retained by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelCap {
    /// `ceil(4 √(n ln n))`, clipped to `n`.
    #[default]
    Auto,
    Fixed(usize),
}

impl LevelCap {
    pub fn resolve(self, n: usize) -> usize {
        let cap = match self {
            Self::Auto if n < 2 => 1,
            Self::Auto => {
                let nf = n as f64;
                (4.0 * (nf * nf.ln()).sqrt()).ceil() as usize
            }
            Self::Fixed(cap) => cap,
        };
        cap.min(n).max(1)
    }
}

impl fmt::Display for LevelCap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => f.write_str("AUTO"),
            Self::Fixed(cap) => write!(f, "{cap}"),
        }
    }
}

impl FromStr for LevelCap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(cap) if cap >= 1 => Ok(Self::Fixed(cap)),
            _ => Err(Error::InvalidArgument(format!(
                "level cap must be AUTO or a positive integer, got {s:?}"
            ))),
        }
    }
}

/// Probability that a simple symmetric walk is at the origin after `h`
/// steps, `C(h, h/2) 2^-h`; zero for odd `h`.
pub fn ssrw_return<T: Probability>(h: u64) -> T {
    T::central_binomial(h)
}

fn check_loss<T: Probability>(cap: usize, loss: &T) -> Result<()> {
    let loss = loss.approx();
    if loss > MAX_TRUNCATION_LOSS {
        Err(Error::CapTooSmall { cap, loss })
    } else {
        Ok(())
    }
}
