use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exact::{green_function, isotropic_green_function, GreenFunction, LevelCap};
use crate::profiles::{ProfileKind, StepProfile};
use crate::sim::{ReplicaBatch, Site, SiteFilter};

use super::stats::{bootstrap_interval, ks_distance, mean};
use super::{Provenance, Verdict, VerificationReport};

const CONFIDENCE: f64 = 0.95;

/// Exact Green function up to `n_max`; the isotropic walk uses its product
/// closed form, every other profile a joint sweep.
pub fn exact_green(
    profile: &StepProfile<f64>,
    n_max: usize,
    cap: LevelCap,
) -> Result<GreenFunction<f64>> {
    if matches!(profile.kind(), ProfileKind::Uniform(p) if *p == 0.25) {
        return Ok(isotropic_green_function(n_max));
    }
    // odd steps never return, so g(2m+1) = g(2m)
    let even = n_max + n_max % 2;
    let mut green = green_function(profile, even, cap)?;
    green.g.truncate(n_max + 1);
    green.normalized.truncate(n_max + 1);
    Ok(green)
}

/// Origin local times of a batch at step count `n`, with `g(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarlingKacSample {
    pub n: u64,
    pub local_times: Vec<u64>,
    pub green: f64,
}

impl DarlingKacSample {
    pub fn from_batch(batch: &ReplicaBatch, green: f64) -> Self {
        Self {
            n: batch.n_steps,
            local_times: batch.local_times((0, 0)),
            green,
        }
    }
}

/// KS distance of `Ξ((0,0),n)/g(n)` to the unit exponential at each sample,
/// with the sample mean and its bootstrap interval. The verdict is `trend`
/// when the distance decreases along the grid; the mean is reported only.
pub fn darling_kac_check(
    profile: &StepProfile<f64>,
    samples: &[DarlingKacSample],
    resamples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no local-time samples".into()));
    }
    if samples.windows(2).any(|w| w[1].n <= w[0].n) {
        return Err(Error::InvalidArgument("sample sizes n must ascend".into()));
    }
    let gamma = profile.gamma_above_one()?;
    let log_scale = 4.0 * profile.p_at(0) * PI * (gamma - 1.0).sqrt();
    let exp_cdf = |x: f64| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() };

    let mut values = Vec::new();
    let mut means = Vec::new();
    let mut intervals = Vec::new();
    let mut metadata = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        if s.green <= 0.0 || s.local_times.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "sample at n = {} needs g(n) > 0 and at least one replica",
                s.n
            )));
        }
        let scaled: Vec<f64> = s.local_times.iter().map(|&x| x as f64 / s.green).collect();
        values.push(ks_distance(&scaled, exp_cdf));
        means.push(mean(&scaled));
        intervals.push(bootstrap_interval(
            &scaled,
            resamples,
            CONFIDENCE,
            seed.wrapping_add(i as u64),
            mean,
        ));
        let log_form: Vec<f64> = s
            .local_times
            .iter()
            .map(|&x| log_scale * x as f64 / (s.n as f64).ln())
            .collect();
        metadata.insert(format!("ks_log_form_n{}", s.n), ks_distance(&log_form, exp_cdf));
        metadata.insert(format!("green_n{}", s.n), s.green);
        // the local time skips r = 0 while g(n) includes it
        metadata.insert(format!("exact_mean_n{}", s.n), (s.green - 1.0) / s.green);
    }
    let decreasing = values.len() > 1 && values.windows(2).all(|w| w[1] < w[0]);
    Ok(VerificationReport {
        claim: "darling_kac".into(),
        constant: Some(1.0),
        grid: samples.iter().map(|s| s.n as f64).collect(),
        values,
        ratios: means,
        tolerance: f64::NAN,
        verdict: if decreasing { Verdict::Trend } else { Verdict::Fail },
        provenance: Provenance::MonteCarlo {
            replicas: samples[0].local_times.len(),
            base_seed: seed,
            intervals,
            confidence: CONFIDENCE,
        },
        metadata,
        notes: vec![
            "values: KS distance of Xi((0,0),n)/g(n) to Exp(1); ratios: sample mean of Xi/g".into(),
            "convergence is logarithmic in n; only the trend is judged".into(),
        ],
    })
}

fn records_site(filter: &SiteFilter, site: Site) -> bool {
    match filter {
        SiteFilter::All => true,
        SiteFilter::Only(sites) => sites.contains(&site),
        SiteFilter::OriginOnly => site == (0, 0),
    }
}

/// Aggregated `Σ_r Ξ_r((0,0),n) / Σ_r Ξ_r(site,n)` against `p_j / p₀`, with
/// a pairs bootstrap interval. Passes when within `tolerance` relative.
pub fn invariant_ratio_law(
    batch: &ReplicaBatch,
    site: Site,
    resamples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    if !records_site(&batch.site_filter, site) {
        return Err(Error::InvalidArgument(format!(
            "batch does not record site ({},{})",
            site.0, site.1
        )));
    }
    let pairs: Vec<(f64, f64)> = batch
        .records
        .iter()
        .map(|r| (r.origin_local_time as f64, r.local_time_at(site) as f64))
        .collect();
    let ratio_of_sums = |items: &[(f64, f64)]| {
        let (a, b) = items.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        a / b
    };
    let denominator: f64 = pairs.iter().map(|p| p.1).sum();
    if denominator == 0.0 {
        return Err(Error::InsufficientVisits(site.0, site.1));
    }
    let measured = ratio_of_sums(&pairs);
    let target = batch.profile.p_at(site.1) / batch.profile.p_at(0);
    let interval = bootstrap_interval(&pairs, resamples, CONFIDENCE, seed, ratio_of_sums);

    let mut at_site: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    at_site.sort_by(f64::total_cmp);
    let median = at_site[at_site.len() / 2];
    let mut notes = vec![format!(
        "values: sum Xi((0,0),n) / sum Xi(({},{}),n); target p_j/p_0",
        site.0, site.1
    )];
    if median < 10.0 {
        notes.push(format!("median visit count {median} is below 10; n may be too small"));
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("median_visits".into(), median);
    metadata.insert("relative_error".into(), measured / target - 1.0);
    let ratio = measured / target;
    Ok(VerificationReport {
        claim: "invariant_ratio".into(),
        constant: Some(target),
        grid: vec![batch.n_steps as f64],
        values: vec![measured],
        ratios: vec![ratio],
        tolerance,
        verdict: if (ratio - 1.0).abs() <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        provenance: Provenance::MonteCarlo {
            replicas: batch.records.len(),
            base_seed: batch.base_seed,
            intervals: vec![interval],
            confidence: CONFIDENCE,
        },
        metadata,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_replicas, Engine};

    #[test]
    fn exact_green_dispatch_agrees() {
        let iso = StepProfile::uniform(0.25).unwrap();
        let fast = exact_green(&iso, 101, LevelCap::Auto).unwrap();
        let swept = green_function(&iso, 102, LevelCap::Auto).unwrap();
        assert_eq!(fast.g.len(), 102);
        for n in 0..=101 {
            assert!((fast.g[n] - swept.g[n]).abs() < 1e-12);
        }
        let per = StepProfile::periodic(vec![0.25, 0.5]).unwrap();
        let g = exact_green(&per, 51, LevelCap::Auto).unwrap();
        assert_eq!(g.g.len(), 52);
        assert_eq!(g.g[51], g.g[50]);
    }

    #[test]
    fn isotropic_ratio_near_one() {
        let profile = StepProfile::uniform(0.25).unwrap();
        let filter = SiteFilter::Only(vec![(0, 0), (1, 0)]);
        let batch = run_replicas(&profile, 20_000, 400, 8, &filter, Engine::Direct).unwrap();
        let report = invariant_ratio_law(&batch, (1, 0), 200, 1, 0.15).unwrap();
        assert_eq!(report.constant, Some(1.0));
        let (lo, hi) = match &report.provenance {
            Provenance::MonteCarlo { intervals, .. } => intervals[0],
            _ => unreachable!(),
        };
        assert!(lo <= report.values[0] && report.values[0] <= hi);
    }

    #[test]
    fn unrecorded_or_unvisited_site() {
        let profile = StepProfile::uniform(0.25).unwrap();
        let batch =
            run_replicas(&profile, 4, 10, 8, &SiteFilter::OriginOnly, Engine::Direct).unwrap();
        assert!(invariant_ratio_law(&batch, (0, 1), 10, 1, 0.1).is_err());
        let filter = SiteFilter::Only(vec![(0, 0), (50, 0)]);
        let batch = run_replicas(&profile, 4, 10, 8, &filter, Engine::Direct).unwrap();
        assert!(matches!(
            invariant_ratio_law(&batch, (50, 0), 10, 1, 0.1),
            Err(Error::InsufficientVisits(50, 0))
        ));
    }

    #[test]
    fn darling_kac_report_shape() {
        let profile = StepProfile::uniform(0.25).unwrap();
        let green = isotropic_green_function(10_000);
        let samples: Vec<DarlingKacSample> = [100u64, 10_000]
            .iter()
            .map(|&n| {
                let batch =
                    run_replicas(&profile, n, 500, n, &SiteFilter::OriginOnly, Engine::Direct)
                        .unwrap();
                DarlingKacSample::from_batch(&batch, green.g[n as usize])
            })
            .collect();
        let report = darling_kac_check(&profile, &samples, 200, 3).unwrap();
        assert_eq!(report.values.len(), 2);
        assert!(report.values.iter().all(|&d| (0.0..=1.0).contains(&d)));
        // every scaled local time is >= 0
        assert!(report.ratios.iter().all(|&m| m >= 0.0));
        assert!(report.meta("exact_mean_n10000").unwrap() < 1.0);
    }
}
