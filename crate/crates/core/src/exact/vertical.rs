use crate::error::Result;
use crate::profiles::StepProfile;
use crate::scalar::Probability;

use super::{check_loss, LevelCap};

/// Law of the vertical coordinate after `n` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalPmf<T> {
    pub n: usize,
    pub cap: usize,
    /// `mass[j + cap]` is `P(C₂(n) = j)` for `|j| <= cap`.
    pub mass: Vec<T>,
    pub trunc_loss: T,
}

impl<T: Probability> VerticalPmf<T> {
    pub fn mass(&self, j: i64) -> T {
        if j.unsigned_abs() as usize > self.cap {
            return T::zero();
        }
        self.mass[(j + self.cap as i64) as usize].clone()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        let cap = self.cap as i64;
        self.mass.iter().enumerate().map(move |(i, m)| (i as i64 - cap, m))
    }

    pub fn total(&self) -> T {
        self.mass.iter().fold(T::zero(), |acc, m| acc + m.clone())
    }

    pub fn max_mass(&self) -> T {
        self.mass
            .iter()
            .cloned()
            .reduce(|a, b| if b > a { b } else { a })
            .unwrap_or_else(T::zero)
    }
}

/// Step-by-step evolution of the vertical chain
/// `new(j) = old(j)(1-2p_j) + old(j-1)p_{j-1} + old(j+1)p_{j+1}`.
#[derive(Debug, Clone)]
pub struct VerticalSweep<T> {
    cap: usize,
    p: Vec<T>,
    hold: Vec<T>,
    mass: Vec<T>,
    scratch: Vec<T>,
    steps: usize,
    trunc_loss: T,
}

impl<T: Probability> VerticalSweep<T> {
    pub fn new(profile: &StepProfile<T>, cap: usize) -> Self {
        let cap = cap.max(1);
        let p = profile.levels(-(cap as i64), cap as i64);
        let hold = p.iter().map(|pj| T::one() - T::two() * pj.clone()).collect();
        let mut mass = vec![T::zero(); 2 * cap + 1];
        mass[cap] = T::one();
        Self {
            cap,
            p,
            hold,
            scratch: mass.clone(),
            mass,
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

    pub fn origin(&self) -> &T {
        &self.mass[self.cap]
    }

    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    pub fn max_mass(&self) -> T {
        self.mass
            .iter()
            .cloned()
            .reduce(|a, b| if b > a { b } else { a })
            .expect("nonempty")
    }

    /// `E[1 - 2 p_{C₂}]`, the probability that the next step is horizontal.
    pub fn horizontal_step_probability(&self) -> T {
        let reach = self.steps.min(self.cap);
        (self.cap - reach..=self.cap + reach).fold(T::zero(), |acc, i| {
            acc + self.mass[i].clone() * self.hold[i].clone()
        })
    }

    pub fn step(&mut self) {
        let last = 2 * self.cap;
        let reach = (self.steps + 1).min(self.cap);
        if self.steps >= self.cap {
            let out = self.mass[0].clone() * self.p[0].clone()
                + self.mass[last].clone() * self.p[last].clone();
            self.trunc_loss = self.trunc_loss.clone() + out;
        }
        for i in self.cap - reach..=self.cap + reach {
            let mut v = self.mass[i].clone() * self.hold[i].clone();
            if i > 0 {
                v = v + self.mass[i - 1].clone() * self.p[i - 1].clone();
            }
            if i < last {
                v = v + self.mass[i + 1].clone() * self.p[i + 1].clone();
            }
            self.scratch[i] = v;
        }
        std::mem::swap(&mut self.mass, &mut self.scratch);
        self.steps += 1;
    }

    pub fn pmf(&self) -> VerticalPmf<T> {
        VerticalPmf {
            n: self.steps,
            cap: self.cap,
            mass: self.mass.clone(),
            trunc_loss: self.trunc_loss.clone(),
        }
    }
}

/// Final law plus the origin probabilities `P(C₂(m) = 0)` for `m = 0..=n`.
#[derive(Debug, Clone)]
pub struct VerticalRun<T> {
    pub pmf: VerticalPmf<T>,
    pub origin: Vec<T>,
}

pub fn vertical_evolve<T: Probability>(
    profile: &StepProfile<T>,
    n: usize,
    cap: LevelCap,
) -> Result<VerticalRun<T>> {
    let mut sweep = VerticalSweep::new(profile, cap.resolve(n));
    let mut origin = Vec::with_capacity(n + 1);
    origin.push(sweep.origin().clone());
    for _ in 0..n {
        sweep.step();
        origin.push(sweep.origin().clone());
    }
    check_loss(sweep.cap(), sweep.trunc_loss())?;
    Ok(VerticalRun {
        pmf: sweep.pmf(),
        origin,
    })
}

/// `E[H_n] = Σ_{m<n} E[1 - 2 p_{C₂(m)}]`, from the vertical law alone.
pub fn expected_horizontal_steps<T: Probability>(
    profile: &StepProfile<T>,
    n: usize,
    cap: LevelCap,
) -> Result<T> {
    let mut sweep = VerticalSweep::new(profile, cap.resolve(n));
    let mut total = T::zero();
    for _ in 0..n {
        total = total + sweep.horizontal_step_probability();
        sweep.step();
    }
    check_loss(sweep.cap(), sweep.trunc_loss())?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::exact::brute_force_vertical;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn single_and_double_step_laws() {
        let profile = StepProfile::uniform(0.25).unwrap();
        let run = vertical_evolve(&profile, 1, LevelCap::Auto).unwrap();
        assert_eq!(run.pmf.mass(0), 0.5);
        assert_eq!(run.pmf.mass(1), 0.25);
        assert_eq!(run.pmf.mass(-1), 0.25);
        let run = vertical_evolve(&profile, 2, LevelCap::Auto).unwrap();
        assert_eq!(run.pmf.mass(0), 0.375);
        assert_eq!(run.origin, vec![1.0, 0.5, 0.375]);
    }

    #[test]
    fn periodic_two_step_origin_matches_enumeration() {
        let profile = StepProfile::periodic(vec![q(1, 4), q(1, 2)]).unwrap();
        let run = vertical_evolve(&profile, 2, LevelCap::Auto).unwrap();
        let enumerated = brute_force_vertical(&profile, 2).unwrap();
        assert_eq!(run.pmf.mass(0), enumerated[&0]);
        assert_eq!(run.pmf.mass(0), q(1, 2));
    }

    #[test]
    fn exact_agreement_with_enumeration_in_rationals() {
        let profile = StepProfile::periodic(vec![q(1, 5), q(7, 20), q(1, 2)]).unwrap();
        for n in 0..=7 {
            let run = vertical_evolve(&profile, n, LevelCap::Auto).unwrap();
            let enumerated = brute_force_vertical(&profile, n).unwrap();
            for (j, m) in run.pmf.iter() {
                assert_eq!(*m, enumerated.get(&j).cloned().unwrap_or_default(), "n={n} j={j}");
            }
            assert_eq!(run.pmf.total(), q(1, 1));
        }
    }

    #[test]
    fn small_cap_is_reported() {
        let profile = StepProfile::uniform(0.25).unwrap();
        match vertical_evolve(&profile, 200, LevelCap::Fixed(3)) {
            Err(Error::CapTooSmall { cap: 3, loss }) => assert!(loss > 0.5),
            other => panic!("expected CapTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn expected_horizontal_steps_isotropic() {
        let profile = StepProfile::uniform(0.25_f64).unwrap();
        let e: f64 = expected_horizontal_steps(&profile, 1000, LevelCap::Auto).unwrap();
        assert!((e - 500.0).abs() < 1e-9);
    }

    #[test]
    fn origin_mass_stays_positive_for_lazy_origin() {
        for values in [vec![0.25_f64], vec![0.25, 0.5], vec![0.2, 0.35, 0.5]] {
            let profile = StepProfile::periodic(values).unwrap();
            let run = vertical_evolve(&profile, 300, LevelCap::Auto).unwrap();
            assert!(run.origin.iter().all(|&m| m > 0.0));
        }
    }

    proptest! {
        #[test]
        fn mass_is_conserved_every_step(
            values in prop::collection::vec(0.05f64..0.5, 1..4),
            cap in 1usize..12,
            n in 1usize..120,
        ) {
            let profile = StepProfile::periodic(values).unwrap();
            let mut sweep = VerticalSweep::new(&profile, cap);
            for _ in 0..n {
                sweep.step();
                let total: f64 = sweep.mass().iter().sum::<f64>() + *sweep.trunc_loss();
                prop_assert!((total - 1.0).abs() <= 1e-12);
            }
            let pmf = sweep.pmf();
            for (j, m) in pmf.iter() {
                if j.unsigned_abs() as usize > n {
                    prop_assert_eq!(*m, 0.0);
                }
            }
        }

        #[test]
        fn raising_the_cap_never_lowers_retained_mass(
            values in prop::collection::vec(0.05f64..0.5, 1..4),
            cap in 1usize..10,
            n in 1usize..80,
        ) {
            let profile = StepProfile::periodic(values).unwrap();
            let mut small = VerticalSweep::new(&profile, cap);
            let mut large = VerticalSweep::new(&profile, cap + 3);
            for _ in 0..n {
                small.step();
                large.step();
            }
            let (small, large) = (small.pmf(), large.pmf());
            for (j, m) in small.iter() {
                prop_assert!(large.mass(j) >= *m);
            }
        }
    }
}
