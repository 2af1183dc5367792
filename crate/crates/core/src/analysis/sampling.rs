use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::{brute_force_distribution, return_prob_exact, LevelCap};
use crate::sim::{ReplicaBatch, Site};

use super::stats::{chi_square_gof, total_variation};
use super::{Provenance, Verdict, VerificationReport};

fn final_counts(batch: &ReplicaBatch) -> BTreeMap<Site, u64> {
    let mut counts = BTreeMap::new();
    for r in &batch.records {
        *counts.entry(r.final_pos).or_insert(0) += 1;
    }
    counts
}

/// Chi-square of each batch's final positions against the enumerated exact
/// law, and the total variation between the two batches. Passes when both
/// p-values reach `significance` and the distance is at most `tv_tolerance`.
pub fn engine_equivalence(
    direct: &ReplicaBatch,
    embedding: &ReplicaBatch,
    significance: f64,
    tv_tolerance: f64,
) -> Result<VerificationReport> {
    if direct.n_steps != embedding.n_steps || direct.profile != embedding.profile {
        return Err(Error::InvalidArgument(
            "batches must share profile and step count".into(),
        ));
    }
    let exact = brute_force_distribution(&direct.profile, direct.n_steps as usize)?;
    let a = final_counts(direct);
    let b = final_counts(embedding);
    let chi_direct = chi_square_gof(&a, &exact);
    let chi_embedding = chi_square_gof(&b, &exact);
    let tv = total_variation(&a, &b);
    let pass = chi_direct.p_value >= significance
        && chi_embedding.p_value >= significance
        && tv <= tv_tolerance;
    let mut metadata = BTreeMap::new();
    metadata.insert("chi2_direct".into(), chi_direct.statistic);
    metadata.insert("chi2_embedding".into(), chi_embedding.statistic);
    metadata.insert("dof_direct".into(), chi_direct.dof as f64);
    metadata.insert("dof_embedding".into(), chi_embedding.dof as f64);
    metadata.insert("p_direct".into(), chi_direct.p_value);
    metadata.insert("p_embedding".into(), chi_embedding.p_value);
    metadata.insert("total_variation".into(), tv);
    metadata.insert("tv_tolerance".into(), tv_tolerance);
    Ok(VerificationReport {
        claim: "embedding_equivalence".into(),
        constant: None,
        grid: vec![direct.n_steps as f64],
        values: vec![tv],
        ratios: vec![chi_direct.p_value.min(chi_embedding.p_value)],
        tolerance: significance,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        provenance: Provenance::MonteCarlo {
            replicas: direct.records.len().min(embedding.records.len()),
            base_seed: direct.base_seed,
            intervals: Vec::new(),
            confidence: 1.0 - significance,
        },
        metadata,
        notes: vec!["values: total variation between engines; ratios: smaller chi-square p-value".into()],
    })
}

/// Empirical `P(C(N) = (0,0))` against the exact value; passes within
/// `z_max` binomial standard errors.
pub fn return_frequency_check(
    batch: &ReplicaBatch,
    cap: LevelCap,
    z_max: f64,
) -> Result<VerificationReport> {
    if batch.records.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let exact = return_prob_exact(&batch.profile, batch.n_steps as usize, cap)?;
    let r = batch.records.len() as f64;
    let hits = batch.records.iter().filter(|rec| rec.final_pos == (0, 0)).count() as f64;
    let freq = hits / r;
    let se = (exact.prob * (1.0 - exact.prob) / r).sqrt();
    let z = if se > 0.0 { (freq - exact.prob) / se } else { 0.0 };
    let mut metadata = BTreeMap::new();
    metadata.insert("exact".into(), exact.prob);
    metadata.insert("std_error".into(), se);
    metadata.insert("z".into(), z);
    Ok(VerificationReport {
        claim: "return_frequency".into(),
        constant: Some(exact.prob),
        grid: vec![batch.n_steps as f64],
        values: vec![freq],
        ratios: vec![if exact.prob > 0.0 { freq / exact.prob } else { f64::NAN }],
        tolerance: z_max,
        verdict: if z.abs() <= z_max { Verdict::Pass } else { Verdict::Fail },
        provenance: Provenance::MonteCarlo {
            replicas: batch.records.len(),
            base_seed: batch.base_seed,
            intervals: vec![(freq - z_max * se, freq + z_max * se)],
            confidence: f64::NAN,
        },
        metadata,
        notes: vec!["tolerance is in binomial standard errors".into()],
    })
}
