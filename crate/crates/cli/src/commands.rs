use std::path::Path;

use anisowalk::analysis::{
    clt_check, condition_a3_check, condition_iii_check, darling_kac_check, exact_green,
    invariant_ratio_law, lemma21_ratio, theorem11_from_sequence, theorem11_ratio,
    DarlingKacSample, VerificationReport,
};
use anisowalk::exact::{return_prob_sequence, vertical_evolve};
use anisowalk::profiles::{diagnostics, ProfileWarning};
use anisowalk::sim::{run_replicas, Site, SiteFilter};
use anisowalk::{Error, Profile};
use anyhow::{anyhow, bail, Context};

use crate::grid::parse_grid;
use crate::output::{self, float, Manifest, Skipped};
use crate::{ExactArgs, Failure, Format, ProfileInfoArgs, SimulateArgs, VerifyArgs};

type CmdResult = Result<(), Failure>;

/// Tolerance of the ratio checks in `exact`.
const EXACT_TOLERANCE: f64 = 0.05;
/// Relative tolerance of the local-time ratio law.
const RATIO_LAW_TOLERANCE: f64 = 0.15;
const BOOTSTRAP_RESAMPLES: usize = 1000;

fn load_profile(path: &Path) -> anyhow::Result<Profile> {
    Profile::load(path).with_context(|| format!("loading profile {}", path.display()))
}

pub fn profile_info(args: &ProfileInfoArgs) -> CmdResult {
    let profile = load_profile(&args.profile)?;
    let diag = diagnostics(&profile, args.heyde_n, args.j_max, args.sides_tolerance)?;
    if args.format == Some(Format::Json) {
        println!("{}", serde_json::to_string_pretty(&diag)?);
        return Ok(());
    }
    let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ");
    println!("gamma     {}", diag.gamma);
    println!("gamma*    {}", diag.gamma_star);
    println!("sigma     {}", diag.sigma);
    println!("mu        {}", diag.mu_stenlund);
    println!("omega     {}", diag.omega);
    println!("p0        {}", diag.p0);
    println!("eta_hat   {}", diag.eta_estimate);
    println!("kappa     {}", list(&diag.kappa_seq));
    println!("beta      {}", list(&diag.beta_seq));
    if diag.warnings.is_empty() {
        println!("warnings  none");
    } else {
        for w in &diag.warnings {
            println!("warning   {w}");
        }
    }
    Ok(())
}

pub fn exact(args: &ExactArgs) -> CmdResult {
    let grid = parse_grid(&args.n_grid)?;
    let profile = load_profile(&args.common.profile)?;
    let out = &args.common.out;
    output::ensure_dir(out)?;

    let top = grid[grid.len() - 1];
    let seq = return_prob_sequence(&profile, top, args.level_cap)?;
    let gamma = profile.gamma();
    // theory constant only when gamma > 1
    let scale = match &gamma {
        Ok(g) if g.warning.is_none() => {
            Some(4.0 * profile.p_at(0) * std::f64::consts::PI * (g.value - 1.0).sqrt())
        }
        _ => None,
    };

    let mut w = output::csv_writer(&out.join("exact_returns.csv"))?;
    w.write_record(["N", "prob", "ratio_to_theory", "trunc_loss"])?;
    for &n in &grid {
        let p = seq.probs[n];
        // P(C(2M) = 0) ~ 1 / (4 M p0 pi sqrt(gamma-1)) with M = N/2
        let ratio = match scale {
            Some(s) if n % 2 == 0 && n > 0 => float(p * (n / 2) as f64 * s),
            _ => String::new(),
        };
        w.write_record([n.to_string(), float(p), ratio, float(seq.trunc_loss[n])])?;
    }
    w.flush()?;

    let mut w = output::csv_writer(&out.join("green.csv"))?;
    w.write_record(["N", "g", "g_normalized"])?;
    let mut g = 0.0;
    let mut cumulative = Vec::with_capacity(seq.probs.len());
    for p in &seq.probs {
        g += p;
        cumulative.push(g);
    }
    for &n in &grid {
        let normalized = match scale {
            Some(s) if n >= 2 => float(cumulative[n] * s / (n as f64).ln()),
            _ => String::new(),
        };
        w.write_record([n.to_string(), float(cumulative[n]), normalized])?;
    }
    w.flush()?;

    let mut manifest = Manifest::new(
        "exact",
        args,
        &profile,
        vec!["exact_returns.csv", "green.csv", "report.json"],
    );
    let half: Vec<usize> = grid.iter().filter(|&&n| n >= 2 && n % 2 == 0).map(|n| n / 2).collect();
    let mut reports = Vec::new();
    match gamma {
        Err(e) => manifest.skipped.push(Skipped {
            claim: "theorem_1_1",
            reason: e.to_string(),
        }),
        Ok(g) if g.warning.is_some() => manifest.skipped.push(Skipped {
            claim: "theorem_1_1",
            reason: Error::GammaNotAboveOne { gamma: g.value }.to_string(),
        }),
        Ok(_) if half.is_empty() => manifest.skipped.push(Skipped {
            claim: "theorem_1_1",
            reason: "grid has no even step count >= 2".into(),
        }),
        Ok(_) => reports.push(theorem11_from_sequence(&profile, &seq, &half, EXACT_TOLERANCE)?),
    }
    for s in &manifest.skipped {
        eprintln!("warning: {} skipped: {}", s.claim, s.reason);
    }
    output::write_reports(out, &reports, args.common.format)?;
    manifest.write(out)?;
    finish(&reports)
}

fn site_filter(sites: Option<&str>) -> anyhow::Result<(SiteFilter, Vec<Site>)> {
    let Some(text) = sites else {
        return Ok((SiteFilter::OriginOnly, Vec::new()));
    };
    let parsed = SiteFilter::parse_sites(text)?;
    if parsed.is_empty() {
        bail!("--sites lists no site");
    }
    let mut extra: Vec<Site> = Vec::new();
    for s in &parsed {
        if *s != (0, 0) && !extra.contains(s) {
            extra.push(*s);
        }
    }
    Ok((SiteFilter::Only(parsed), extra))
}

pub fn simulate(args: &SimulateArgs) -> CmdResult {
    let profile = load_profile(&args.common.profile)?;
    let (filter, extra) = site_filter(args.sites.as_deref())?;
    let out = &args.common.out;
    output::ensure_dir(out)?;
    let batch = run_replicas(&profile, args.steps, args.replicas, args.seed, &filter, args.engine)?;

    let mut w = output::csv_writer(&out.join("replicas.csv"))?;
    let mut header: Vec<String> = ["replica", "seed", "final_x", "final_y", "h_n", "v_n", "lt_origin"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(extra.iter().map(|(k, j)| format!("lt_{k}_{j}")));
    w.write_record(&header)?;
    for (r, rec) in batch.records.iter().enumerate() {
        let mut row = vec![
            r.to_string(),
            rec.seed.to_string(),
            rec.final_pos.0.to_string(),
            rec.final_pos.1.to_string(),
            rec.h_n.to_string(),
            rec.v_n.to_string(),
            rec.origin_local_time.to_string(),
        ];
        row.extend(extra.iter().map(|&s| rec.local_time_at(s).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Manifest::new("simulate", args, &profile, vec!["replicas.csv"]).write(out)?;
    Ok(())
}

fn log_grid(limit: usize, start: usize) -> Vec<usize> {
    std::iter::successors(Some(start), |n| Some(n * 10))
        .take_while(|&n| n <= limit)
        .collect()
}

pub fn verify(args: &VerifyArgs) -> CmdResult {
    let grid = parse_grid(&args.n_grid)?;
    let profile = load_profile(&args.common.profile)?;
    let site = SiteFilter::parse_sites(&args.sites)?
        .into_iter()
        .find(|&s| s != (0, 0))
        .ok_or_else(|| anyhow!("--sites needs a site other than the origin"))?;
    let out = &args.common.out;
    output::ensure_dir(out)?;
    let cap = args.level_cap;
    let mut reports: Vec<VerificationReport> = Vec::new();
    let mut manifest = Manifest::new("verify", args, &profile, vec!["report.json"]);

    let gamma = profile.gamma()?;
    let above_one = gamma.warning.is_none();
    if above_one {
        reports.push(theorem11_ratio(&profile, &grid, cap, args.tolerance)?);
        reports.push(lemma21_ratio(&profile, &grid, cap, args.tolerance)?);
    } else {
        // every claim tied to the return asymptotics needs gamma > 1
        let reason = match gamma.warning {
            Some(w @ ProfileWarning::GammaNotAboveOne { .. }) => w.to_string(),
            _ => String::new(),
        };
        for claim in ["theorem_1_1", "lemma_2_1", "condition_iii", "darling_kac"] {
            manifest.skipped.push(Skipped {
                claim,
                reason: reason.clone(),
            });
        }
    }

    let horizon = (20 * grid[grid.len() - 1]).max(2000);
    if above_one {
        let run = vertical_evolve(&profile, horizon, cap)?;
        reports.push(condition_iii_check(&run.origin, 0.1)?);
    }
    reports.push(condition_a3_check(&profile, &log_grid(horizon, 10), cap, 0.1)?);
    reports.push(clt_check(&profile, &log_grid(horizon, 100), cap, 0.02)?);

    if above_one {
        let sizes = [50u64, 2000];
        let green = exact_green(&profile, sizes[1] as usize, cap)?;
        let mut samples = Vec::new();
        for (i, &n) in sizes.iter().enumerate() {
            let batch = run_replicas(
                &profile,
                n,
                args.replicas,
                args.seed.wrapping_add(i as u64),
                &SiteFilter::OriginOnly,
                args.engine,
            )?;
            samples.push(DarlingKacSample::from_batch(&batch, green.g[n as usize]));
        }
        reports.push(darling_kac_check(&profile, &samples, BOOTSTRAP_RESAMPLES, args.seed)?);
    }

    let batch = run_replicas(
        &profile,
        100_000,
        args.replicas,
        args.seed.wrapping_add(100),
        &SiteFilter::Only(vec![(0, 0), site]),
        args.engine,
    )?;
    match invariant_ratio_law(&batch, site, BOOTSTRAP_RESAMPLES, args.seed, RATIO_LAW_TOLERANCE) {
        Ok(report) => reports.push(report),
        Err(e @ Error::InsufficientVisits(..)) => manifest.skipped.push(Skipped {
            claim: "invariant_ratio",
            reason: e.to_string(),
        }),
        Err(e) => return Err(e.into()),
    }

    for s in &manifest.skipped {
        eprintln!("warning: {} skipped: {}", s.claim, s.reason);
    }
    output::write_reports(out, &reports, args.common.format)?;
    manifest.write(out)?;
    finish(&reports)
}

fn finish(reports: &[VerificationReport]) -> CmdResult {
    for r in reports {
        let last = r.ratios.last().or(r.values.last()).copied().unwrap_or(f64::NAN);
        println!("{:<22} {:<6} {}", r.claim, r.verdict, last);
    }
    if reports.iter().any(|r| r.verdict.is_fail()) {
        Err(Failure::ClaimFailed)
    } else {
        Ok(())
    }
}
