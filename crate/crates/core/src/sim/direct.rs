use rand::Rng;

use crate::profiles::StepProfile;

use super::{keeps_origin, rng_from_seed, LevelTable, Recorder, SimRecord, SimRng, SiteFilter};

/// Runs the walk step by step from `(0,0)`.
///
/// Each step takes one uniform draw `u` and moves up if `u < p_j`, down if
/// `p_j <= u < 2p_j`, left if `2p_j <= u < 1/2 + p_j` and right otherwise.
pub fn simulate_direct(
    profile: &StepProfile<f64>,
    n_steps: u64,
    seed: u64,
    filter: &SiteFilter,
) -> SimRecord {
    let mut rng = rng_from_seed(seed);
    let mut table = LevelTable::new(profile);
    let mut recorder = Recorder::new(filter);
    let state = match &mut recorder {
        // monomorphized so the common origin-only case pays nothing per visit
        Recorder::OriginOnly => walk(&mut rng, &mut table, n_steps, |_, _| {}),
        other => walk(&mut rng, &mut table, n_steps, |x, y| other.visit(x, y)),
    };
    let Walk {
        x,
        y,
        h_n,
        origin,
    } = state;
    SimRecord {
        n_steps,
        final_pos: (x, y),
        h_n,
        v_n: n_steps - h_n,
        local_time: recorder.finish(origin, keeps_origin(filter)),
        origin_local_time: origin,
        seed,
        overshoot: None,
    }
}

struct Walk {
    x: i64,
    y: i64,
    h_n: u64,
    origin: u64,
}

#[inline(always)]
fn walk(
    rng: &mut SimRng,
    table: &mut LevelTable<'_>,
    n_steps: u64,
    mut visit: impl FnMut(i64, i64),
) -> Walk {
    let (mut x, mut y) = (0i64, 0i64);
    let mut h_n = 0u64;
    let mut origin = 0u64;
    let mut level = table.level(0);
    for _ in 0..n_steps {
        // the same 53 bits a uniform f64 draw would use, compared as integers
        let m = rng.next_u64() >> 11;
        let up = (m < level.up) as i64;
        let vertical = (m < level.vertical) as i64;
        let right = (m >= level.right) as i64;
        let horizontal = 1 - vertical;
        x += horizontal * (2 * right - 1);
        y += 2 * up - vertical;
        h_n += horizontal as u64;
        level = table.level(y);
        if x == 0 && y == 0 {
            origin += 1;
        } else {
            visit(x, y);
        }
    }
    Walk { x, y, h_n, origin }
}
