//! Path enumeration, the independent check on the sweeps.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::profiles::StepProfile;
use crate::scalar::Probability;

/// `4^n` paths are enumerated, so `n` is kept small.
pub const BRUTE_FORCE_MAX_STEPS: usize = 12;

fn check_size(n: usize) -> Result<()> {
    if n > BRUTE_FORCE_MAX_STEPS {
        Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_STEPS,
        })
    } else {
        Ok(())
    }
}

/// Per-level step probabilities `(p_j, 1/2 - p_j)` over `-n..=n`.
fn step_table<T: Probability>(profile: &StepProfile<T>, n: usize) -> Vec<(T, T)> {
    (-(n as i64)..=n as i64)
        .map(|j| {
            let p = profile.p_at(j);
            (p.clone(), T::half() - p)
        })
        .collect()
}

/// Sums the probability of every length-`n` path that ends at `(0,0)`.
pub fn brute_force_return<T: Probability>(profile: &StepProfile<T>, n: usize) -> Result<T> {
    check_size(n)?;
    let table = step_table(profile, n);
    let mut total = T::zero();
    return_paths(&table, n as i64, 0, 0, n, T::one(), &mut total);
    Ok(total)
}

fn return_paths<T: Probability>(
    table: &[(T, T)],
    offset: i64,
    x: i64,
    y: i64,
    left: usize,
    weight: T,
    total: &mut T,
) {
    if x.unsigned_abs() + y.unsigned_abs() > left as u64 {
        return;
    }
    if left == 0 {
        *total = total.clone() + weight;
        return;
    }
    let (vertical, horizontal) = &table[(y + offset) as usize];
    for (dx, dy, p) in [
        (0, 1, vertical),
        (0, -1, vertical),
        (1, 0, horizontal),
        (-1, 0, horizontal),
    ] {
        if *p > T::zero() {
            return_paths(table, offset, x + dx, y + dy, left - 1, weight.clone() * p.clone(), total);
        }
    }
}

/// Law of `C(n)` by enumeration of all `4^n` paths.
pub fn brute_force_distribution<T: Probability>(
    profile: &StepProfile<T>,
    n: usize,
) -> Result<BTreeMap<(i64, i64), T>> {
    check_size(n)?;
    let table = step_table(profile, n);
    let mut law = BTreeMap::new();
    all_paths(&table, n as i64, 0, 0, n, T::one(), &mut law);
    Ok(law)
}

fn all_paths<T: Probability>(
    table: &[(T, T)],
    offset: i64,
    x: i64,
    y: i64,
    left: usize,
    weight: T,
    law: &mut BTreeMap<(i64, i64), T>,
) {
    if left == 0 {
        let slot = law.entry((x, y)).or_insert_with(T::zero);
        *slot = slot.clone() + weight;
        return;
    }
    let (vertical, horizontal) = &table[(y + offset) as usize];
    for (dx, dy, p) in [
        (0, 1, vertical),
        (0, -1, vertical),
        (1, 0, horizontal),
        (-1, 0, horizontal),
    ] {
        if *p > T::zero() {
            all_paths(table, offset, x + dx, y + dy, left - 1, weight.clone() * p.clone(), law);
        }
    }
}

/// Law of the vertical coordinate by enumeration of `(hold, up, down)^n`.
pub fn brute_force_vertical<T: Probability>(
    profile: &StepProfile<T>,
    n: usize,
) -> Result<BTreeMap<i64, T>> {
    check_size(n)?;
    let mut law = BTreeMap::new();
    vertical_paths(profile, 0, n, T::one(), &mut law);
    Ok(law)
}

fn vertical_paths<T: Probability>(
    profile: &StepProfile<T>,
    y: i64,
    left: usize,
    weight: T,
    law: &mut BTreeMap<i64, T>,
) {
    if left == 0 {
        let slot = law.entry(y).or_insert_with(T::zero);
        *slot = slot.clone() + weight;
        return;
    }
    let p = profile.p_at(y);
    let hold = T::one() - T::two() * p.clone();
    for (dy, w) in [(0, hold), (1, p.clone()), (-1, p)] {
        if w > T::zero() {
            vertical_paths(profile, y + dy, left - 1, weight.clone() * w, law);
        }
    }
}
