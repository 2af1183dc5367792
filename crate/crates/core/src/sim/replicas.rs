use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profiles::StepProfile;

use super::{replica_seed, simulate_direct, simulate_embedding, Engine, SimRecord, SiteFilter};

/// Independent trajectories of one profile, in replica order.
#[derive(Debug, Clone)]
pub struct ReplicaBatch {
    pub profile: StepProfile<f64>,
    pub n_steps: u64,
    pub base_seed: u64,
    pub engine: Engine,
    pub site_filter: SiteFilter,
    pub records: Vec<SimRecord>,
}

impl ReplicaBatch {
    pub fn replicas(&self) -> usize {
        self.records.len()
    }

    pub fn local_times(&self, site: (i64, i64)) -> Vec<u64> {
        self.records.iter().map(|r| r.local_time_at(site)).collect()
    }
}

/// Runs `replicas` walks; replica `r` uses [`replica_seed`]`(base_seed, r)`.
/// Replicas run in parallel but the stored records do not depend on it.
pub fn run_replicas(
    profile: &StepProfile<f64>,
    n_steps: u64,
    replicas: u64,
    base_seed: u64,
    site_filter: &SiteFilter,
    engine: Engine,
) -> Result<ReplicaBatch> {
    if replicas == 0 {
        return Err(Error::InvalidArgument("replica count must be at least 1".into()));
    }
    let records = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed = replica_seed(base_seed, r);
            match engine {
                Engine::Direct => simulate_direct(profile, n_steps, seed, site_filter),
                Engine::Embedding => simulate_embedding(profile, n_steps, seed, site_filter),
            }
        })
        .collect();
    Ok(ReplicaBatch {
        profile: profile.clone(),
        n_steps,
        base_seed,
        engine,
        site_filter: site_filter.clone(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_replica_matches_direct_call() {
        let profile = StepProfile::periodic(vec![0.25, 0.5]).unwrap();
        let batch = run_replicas(&profile, 500, 1, 9, &SiteFilter::All, Engine::Direct).unwrap();
        let single = simulate_direct(&profile, 500, replica_seed(9, 0), &SiteFilter::All);
        assert_eq!(batch.records, vec![single]);
    }

    #[test]
    fn batches_are_reproducible() {
        let profile = StepProfile::uniform(0.25).unwrap();
        for engine in [Engine::Direct, Engine::Embedding] {
            let a = run_replicas(&profile, 200, 1000, 5, &SiteFilter::OriginOnly, engine).unwrap();
            let b = run_replicas(&profile, 200, 1000, 5, &SiteFilter::OriginOnly, engine).unwrap();
            assert_eq!(a.records, b.records);
        }
    }

    #[test]
    fn zero_replicas_rejected() {
        let profile = StepProfile::uniform(0.25).unwrap();
        assert!(run_replicas(&profile, 10, 0, 1, &SiteFilter::All, Engine::Direct).is_err());
    }
}
