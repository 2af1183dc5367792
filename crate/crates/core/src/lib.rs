//! Anisotropic random walks on the square lattice: the walk moves to either
//! vertical neighbour with probability `p_j` and to either horizontal
//! neighbour with probability `1/2 - p_j`, where `j` is the current level.
//!
//! * [`profiles`]: the level map `j -> p_j` and its averaged constants.
//! * [`exact`]: exact finite-step laws by dynamic programming, plus a
//!   path-enumeration oracle.
//! * [`sim`]: seeded Monte Carlo, direct and through the geometric embedding.
//! * [`analysis`]: verdicts on the return-probability and local-time laws.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod profiles;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use exact::LevelCap;
pub use profiles::{ProfileConfig, ProfileKind, StepProfile};
pub use scalar::{Probability, Real};

use num_rational::BigRational;

/// Double-precision profile, used by the simulator and the analysis.
pub type Profile = StepProfile<f64>;
/// Profile over exact rationals.
pub type ExactProfile = StepProfile<BigRational>;
pub type VerticalPmf64 = exact::VerticalPmf<f64>;
pub type JointPmf64 = exact::JointPmf<f64>;
pub type ExactVerticalPmf = exact::VerticalPmf<BigRational>;
pub type ExactJointPmf = exact::JointPmf<BigRational>;
