use rand::Rng;

/// `n` independent ±1 steps, 64 per generator draw.
pub fn simple_walk_increments<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let bits = rng.next_u64();
        let take = (n - out.len()).min(64);
        out.extend((0..take).map(|b| if (bits >> b) & 1 == 1 { 1i8 } else { -1 }));
    }
    out
}

/// Largest `|D(i,n)|` along a simple walk started at 0, where
/// `D(i,n) = ξ(i+1,n) - ξ(i,n) - Σ_{ℓ=0..n} I(i,ℓ) X_{ℓ+1}`,
/// `I(i,ℓ) = 1` iff `S_ℓ ∈ {i, i+1}` and `ξ(x,n) = #{1 <= k <= n : S_k = x}`.
///
/// The sum needs `X_{n+1}`, so `n` runs over `0..increments.len()`.
pub fn lemma_f_check(increments: &[i8], level: i64) -> i64 {
    let mut s = 0i64;
    let (mut xi_low, mut xi_high) = (0i64, 0i64);
    let mut drift = 0i64;
    let mut worst = 0i64;
    for &x in increments {
        if s == level || s == level + 1 {
            drift += x as i64;
        }
        worst = worst.max((xi_high - xi_low - drift).abs());
        s += x as i64;
        if s == level {
            xi_low += 1;
        } else if s == level + 1 {
            xi_high += 1;
        }
    }
    worst
}

/// Variance of `G^(L)`: `P(k) = α(1-α)^k` for `k < L` and `P(L) = (1-α)^L`.
pub fn truncated_geometric_variance(alpha: f64, cap: u64) -> f64 {
    let q = 1.0 - alpha;
    let law: Vec<f64> = (0..=cap)
        .map(|k| {
            if k < cap {
                alpha * q.powi(k as i32)
            } else {
                q.powi(cap as i32)
            }
        })
        .collect();
    let mean: f64 = law.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    law.iter()
        .enumerate()
        .map(|(k, p)| (k as f64 - mean).powi(2) * p)
        .sum()
}
