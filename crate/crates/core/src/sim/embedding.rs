use rand::{Rng, RngExt};

use crate::profiles::StepProfile;

use super::{keeps_origin, rng_from_seed, LevelTable, Recorder, SimRecord, SiteFilter};

/// Draws `k >= 0` with `P(k) = alpha (1-alpha)^k` by inversion.
pub fn sample_geometric<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> u64 {
    if alpha >= 1.0 {
        return 0;
    }
    // 1 - U lies in (0, 1], so the logarithm is finite
    let u = 1.0 - rng.random::<f64>();
    (u.ln() / (-alpha).ln_1p()).floor() as u64
}

/// Builds the walk from two simple walks: on each arrival at level `j` a
/// run of `Geom(2 p_j)` horizontal steps is taken, then one vertical step.
/// The run in progress when the step budget is reached is cut short and the
/// cut-off length is reported as `overshoot`.
pub fn simulate_embedding(
    profile: &StepProfile<f64>,
    n_steps: u64,
    seed: u64,
    filter: &SiteFilter,
) -> SimRecord {
    let mut rng = rng_from_seed(seed);
    let mut table = LevelTable::new(profile);
    let mut recorder = Recorder::new(filter);
    let (mut x, mut y) = (0i64, 0i64);
    let mut steps = 0u64;
    let mut h_n = 0u64;
    let mut origin = 0u64;
    let mut overshoot = 0u64;

    let mut visit = |x: i64, y: i64, origin: &mut u64| {
        if x == 0 && y == 0 {
            *origin += 1;
        } else {
            recorder.visit(x, y);
        }
    };

    while steps < n_steps {
        let run = sample_geometric(&mut rng, 2.0 * table.get(y));
        let taken = run.min(n_steps - steps);
        for _ in 0..taken {
            x += if rng.random::<bool>() { 1 } else { -1 };
            visit(x, y, &mut origin);
        }
        steps += taken;
        h_n += taken;
        if taken < run {
            overshoot = run - taken;
            break;
        }
        if steps == n_steps {
            break;
        }
        y += if rng.random::<bool>() { 1 } else { -1 };
        steps += 1;
        visit(x, y, &mut origin);
    }

    SimRecord {
        n_steps,
        final_pos: (x, y),
        h_n,
        v_n: n_steps - h_n,
        local_time: recorder.finish(origin, keeps_origin(filter)),
        origin_local_time: origin,
        seed,
        overshoot: Some(overshoot),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng_from_seed;

    #[test]
    fn degenerate_alpha_is_zero() {
        let mut rng = rng_from_seed(1);
        assert!((0..1000).all(|_| sample_geometric(&mut rng, 1.0) == 0));
    }

    #[test]
    fn geometric_moments() {
        let mut rng = rng_from_seed(77);
        let n = 1_000_000;
        let alpha = 0.5;
        let draws: Vec<f64> = (0..n).map(|_| sample_geometric(&mut rng, alpha) as f64).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // mean (1-a)/a = 1, variance (1-a)/a^2 = 2
        let se_mean = (2.0f64 / n as f64).sqrt();
        assert!((mean - 1.0).abs() <= 4.0 * se_mean, "mean = {mean}");
        // fourth central moment of Geom(1/2) is 26, so Var(s^2) ~ (26 - 4)/n
        let se_var = (22.0f64 / n as f64).sqrt();
        assert!((var - 2.0).abs() <= 4.0 * se_var, "var = {var}");
    }

    #[test]
    fn step_counts_add_up() {
        let profile = StepProfile::periodic(vec![0.2, 0.35, 0.5]).unwrap();
        for n in [0u64, 1, 2, 17, 1000] {
            for seed in 0..10 {
                let rec = simulate_embedding(&profile, n, seed, &SiteFilter::All);
                assert_eq!(rec.h_n + rec.v_n, n);
                assert_eq!(rec.local_time.values().sum::<u64>(), n);
            }
        }
    }

    #[test]
    fn comb_teeth_only_move_vertically() {
        // p = 1/2 off the x-axis: away from y = 0 every step is vertical, so
        // the horizontal coordinate can change only while y = 0
        let profile = StepProfile::table(0, vec![0.25], 0.5, 0.5).unwrap();
        for seed in 0..50 {
            let rec = simulate_embedding(&profile, 200, seed, &SiteFilter::All);
            for &(k, j) in rec.local_time.keys() {
                if j != 0 && k != 0 {
                    assert!(rec.local_time.contains_key(&(k, 0)), "({k},{j}) reached off-axis");
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let profile = StepProfile::uniform(0.25).unwrap();
        let a = simulate_embedding(&profile, 10_000, 3, &SiteFilter::All);
        let b = simulate_embedding(&profile, 10_000, 3, &SiteFilter::All);
        assert_eq!(a, b);
    }
}
