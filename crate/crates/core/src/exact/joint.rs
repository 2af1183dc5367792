use rayon::prelude::*;

use crate::error::Result;
use crate::profiles::StepProfile;
use crate::scalar::Probability;

use super::{check_loss, LevelCap, VerticalPmf, PER_STEP_ROUNDING};

/// Joint law of the vertical level and the horizontal step count.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf<T> {
    pub n: usize,
    pub cap: usize,
    /// `rows[j + cap][h]` is `P(C₂(n) = j, H_n = h)`.
    pub rows: Vec<Vec<T>>,
    pub trunc_loss: T,
}

impl<T: Probability> JointPmf<T> {
    pub fn mass(&self, j: i64, h: usize) -> T {
        if j.unsigned_abs() as usize > self.cap {
            return T::zero();
        }
        self.rows[(j + self.cap as i64) as usize]
            .get(h)
            .cloned()
            .unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.rows
            .iter()
            .flatten()
            .fold(T::zero(), |acc, m| acc + m.clone())
    }

    pub fn vertical_marginal(&self) -> VerticalPmf<T> {
        VerticalPmf {
            n: self.n,
            cap: self.cap,
            mass: self
                .rows
                .iter()
                .map(|row| row.iter().fold(T::zero(), |acc, m| acc + m.clone()))
                .collect(),
            trunc_loss: self.trunc_loss.clone(),
        }
    }

    /// `E[H_n]` over the retained mass.
    pub fn mean_horizontal(&self) -> T {
        self.rows.iter().fold(T::zero(), |acc, row| {
            row.iter().enumerate().fold(acc, |acc, (h, m)| {
                acc + T::from_usize(h).expect("count fits") * m.clone()
            })
        })
    }

    /// `Σ_h P(C₂ = 0, H = h) · C(h, h/2) 2^-h`.
    pub fn origin_return(&self) -> T {
        self.rows[self.cap]
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (h, m)| {
                acc + m.clone() * T::central_binomial(h as u64)
            })
    }
}

/// Step-by-step evolution of the `(level, horizontal count)` law:
/// `new(j,h) = old(j,h-1)(1-2p_j) + old(j-1,h)p_{j-1} + old(j+1,h)p_{j+1}`.
///
/// Only the triangle `h <= steps - |j|` can carry mass and only that part is
/// touched. Rows are independent within a step and are updated in parallel;
/// the result does not depend on the thread count.
#[derive(Debug, Clone)]
pub struct JointSweep<T> {
    cap: usize,
    horizon: usize,
    p: Vec<T>,
    hold: Vec<T>,
    weights: Vec<T>,
    rows: Vec<Vec<T>>,
    scratch: Vec<Vec<T>>,
    steps: usize,
    trunc_loss: T,
}

impl<T: Probability> JointSweep<T> {
    /// A sweep able to run for `horizon` steps.
    pub fn new(profile: &StepProfile<T>, cap: usize, horizon: usize) -> Self {
        let cap = cap.max(1);
        let p = profile.levels(-(cap as i64), cap as i64);
        let hold = p.iter().map(|pj| T::one() - T::two() * pj.clone()).collect();
        let weights = (0..=horizon as u64).map(T::central_binomial).collect();
        let mut rows = vec![vec![T::zero(); horizon + 1]; 2 * cap + 1];
        rows[cap][0] = T::one();
        Self {
            cap,
            horizon,
            p,
            hold,
            weights,
            scratch: rows.clone(),
            rows,
            steps: 0,
            trunc_loss: T::zero(),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn trunc_loss(&self) -> &T {
        &self.trunc_loss
    }

    /// Probability that the walk is at `(0,0)` after the current step count.
    pub fn origin_return(&self) -> T {
        let top = self.steps.min(self.horizon);
        self.rows[self.cap][..=top]
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (m, w)| acc + m.clone() * w.clone())
    }

    pub fn step(&mut self) {
        assert!(self.steps < self.horizon, "joint sweep ran past its horizon");
        let m = self.steps;
        let cap = self.cap;
        let last = 2 * cap;
        if m >= cap {
            let valid = m - cap;
            let out = [0, last].iter().fold(T::zero(), |acc, &i| {
                self.rows[i][..=valid]
                    .iter()
                    .fold(acc, |acc, x| acc + x.clone() * self.p[i].clone())
            });
            self.trunc_loss = self.trunc_loss.clone() + out;
        }

        let reach = (m + 1).min(cap);
        let rows = &self.rows;
        let (p, hold) = (&self.p, &self.hold);
        self.scratch
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, out)| {
                let dist = i.abs_diff(cap);
                if dist > reach {
                    return;
                }
                let hi = m + 1 - dist;
                let out = &mut out[..=hi];
                out.iter_mut().for_each(|o| *o = T::zero());
                if i > 0 {
                    let pb = p[i - 1].clone();
                    for (o, x) in out.iter_mut().zip(&rows[i - 1][..=hi]) {
                        *o = o.clone() + x.clone() * pb.clone();
                    }
                }
                if i < last {
                    let pa = p[i + 1].clone();
                    for (o, x) in out.iter_mut().zip(&rows[i + 1][..=hi]) {
                        *o = o.clone() + x.clone() * pa.clone();
                    }
                }
                let q = hold[i].clone();
                for (o, x) in out[1..].iter_mut().zip(&rows[i][..hi]) {
                    *o = o.clone() + x.clone() * q.clone();
                }
            });
        std::mem::swap(&mut self.rows, &mut self.scratch);
        self.steps += 1;
    }

    pub fn pmf(&self) -> JointPmf<T> {
        let width = self.steps + 1;
        JointPmf {
            n: self.steps,
            cap: self.cap,
            rows: self.rows.iter().map(|r| r[..width].to_vec()).collect(),
            trunc_loss: self.trunc_loss.clone(),
        }
    }
}

pub fn joint_evolve<T: Probability>(
    profile: &StepProfile<T>,
    n: usize,
    cap: LevelCap,
) -> Result<JointPmf<T>> {
    let mut sweep = JointSweep::new(profile, cap.resolve(n), n);
    for _ in 0..n {
        sweep.step();
    }
    check_loss(sweep.cap(), sweep.trunc_loss())?;
    Ok(sweep.pmf())
}

/// Origin-return probabilities `P(C(m) = (0,0))` for every `m <= n`.
#[derive(Debug, Clone)]
pub struct ReturnSequence<T> {
    pub cap: usize,
    pub probs: Vec<T>,
    /// Truncation loss accumulated by step `m`.
    pub trunc_loss: Vec<T>,
}

impl<T: Probability> ReturnSequence<T> {
    /// `trunc_loss + m · 1e-12`, a bound on the absolute error at step `m`.
    pub fn error_bound(&self, m: usize) -> f64 {
        self.trunc_loss[m].approx() + m as f64 * PER_STEP_ROUNDING
    }
}

pub fn return_prob_sequence<T: Probability>(
    profile: &StepProfile<T>,
    n: usize,
    cap: LevelCap,
) -> Result<ReturnSequence<T>> {
    let mut sweep = JointSweep::new(profile, cap.resolve(n), n);
    let mut probs = Vec::with_capacity(n + 1);
    let mut losses = Vec::with_capacity(n + 1);
    probs.push(sweep.origin_return());
    losses.push(T::zero());
    for _ in 0..n {
        sweep.step();
        probs.push(sweep.origin_return());
        losses.push(sweep.trunc_loss().clone());
    }
    check_loss(sweep.cap(), sweep.trunc_loss())?;
    Ok(ReturnSequence {
        cap: sweep.cap(),
        probs,
        trunc_loss: losses,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnProb<T> {
    pub prob: T,
    pub trunc_loss: T,
    pub error_bound: f64,
}

/// `P(C(n) = (0,0))`. Odd `n` returns zero without a sweep.
pub fn return_prob_exact<T: Probability>(
    profile: &StepProfile<T>,
    n: usize,
    cap: LevelCap,
) -> Result<ReturnProb<T>> {
    if n % 2 == 1 {
        return Ok(ReturnProb {
            prob: T::zero(),
            trunc_loss: T::zero(),
            error_bound: 0.0,
        });
    }
    let pmf = joint_evolve(profile, n, cap)?;
    Ok(ReturnProb {
        prob: pmf.origin_return(),
        error_bound: pmf.trunc_loss.approx() + n as f64 * PER_STEP_ROUNDING,
        trunc_loss: pmf.trunc_loss,
    })
}
