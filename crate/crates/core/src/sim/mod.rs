//! Monte Carlo simulation of the walk.
//!
//! Two engines produce the same law: [`simulate_direct`] draws one of the
//! four moves per step, [`simulate_embedding`] builds the path from
//! geometric horizontal runs interleaved with single vertical steps. Both
//! record the visit counts `Ξ((k,j), N) = #{1 <= r <= N : C(r) = (k,j)}`;
//! the starting point is not counted.

mod direct;
mod embedding;
mod hn;
mod lemmas;
mod replicas;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

pub use direct::simulate_direct;
pub use embedding::{sample_geometric, simulate_embedding};
pub use hn::{hn_statistics, HnStatistics};
pub use lemmas::{lemma_f_check, simple_walk_increments, truncated_geometric_variance};
pub use replicas::{run_replicas, ReplicaBatch};

use crate::error::{Error, Result};
use crate::profiles::StepProfile;

/// A lattice site `(k, j)`: horizontal coordinate first.
pub type Site = (i64, i64);

/// Generator behind every simulated stream.
pub type SimRng = Xoshiro256PlusPlus;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteFilter {
    /// Record every visited site.
    All,
    /// Record only these sites. The origin count is kept regardless.
    Only(Vec<Site>),
    #[default]
    OriginOnly,
}

impl SiteFilter {
    /// Parses `"(0,0);(0,1)"`.
    pub fn parse_sites(text: &str) -> Result<Vec<Site>> {
        text.split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                let inner = s
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| Error::InvalidArgument(format!("bad site {s:?}")))?;
                let (k, j) = inner
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidArgument(format!("bad site {s:?}")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad site {s:?}")))
                };
                Ok((parse(k)?, parse(j)?))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Direct,
    Embedding,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Direct => "direct",
            Self::Embedding => "embedding",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "embedding" => Ok(Self::Embedding),
            _ => Err(Error::InvalidArgument(format!(
                "engine must be direct or embedding, got {s:?}"
            ))),
        }
    }
}

/// Summary of one simulated trajectory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimRecord {
    pub n_steps: u64,
    pub final_pos: Site,
    /// Horizontal steps among the first `n_steps`.
    pub h_n: u64,
    pub v_n: u64,
    /// Visit counts of the recorded sites; sites never visited are absent.
    pub local_time: BTreeMap<Site, u64>,
    pub origin_local_time: u64,
    pub seed: u64,
    /// Embedding engine only: the part of the horizontal run in progress at
    /// the step budget that was cut off.
    pub overshoot: Option<u64>,
}

impl SimRecord {
    pub fn local_time_at(&self, site: Site) -> u64 {
        if site == (0, 0) {
            return self.origin_local_time;
        }
        self.local_time.get(&site).copied().unwrap_or(0)
    }
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer, a bijection on `u64`.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replica `r`: injective in `r` for a fixed base seed.
pub fn replica_seed(base_seed: u64, replica: u64) -> u64 {
    mix64(base_seed.wrapping_add(replica.wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Per-level data used in the inner loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Level {
    pub p: f64,
    /// With `m` the top 53 bits of a draw, so `u = m 2^-53`: `u < p` iff
    /// `m < up`, `u < 2p` iff `m < vertical`, `u >= 1/2 + p` iff `m >= right`.
    pub up: u64,
    pub vertical: u64,
    pub right: u64,
}

impl Level {
    fn new(p: f64) -> Self {
        let scale = (1u64 << 53) as f64;
        let threshold = |x: f64| (x * scale).ceil() as u64;
        Self {
            p,
            up: threshold(p),
            vertical: threshold(2.0 * p),
            right: threshold(0.5 + p),
        }
    }
}

/// Level data cached over a window of levels that grows on demand.
pub(crate) struct LevelTable<'a> {
    profile: &'a StepProfile<f64>,
    low: i64,
    levels: Vec<Level>,
}

impl<'a> LevelTable<'a> {
    pub(crate) fn new(profile: &'a StepProfile<f64>) -> Self {
        let mut table = Self {
            profile,
            low: 0,
            levels: Vec::new(),
        };
        table.rebuild(-64, 64);
        table
    }

    fn rebuild(&mut self, low: i64, high: i64) {
        self.low = low;
        self.levels = self.profile.levels(low, high).into_iter().map(Level::new).collect();
    }

    #[inline(always)]
    pub(crate) fn level(&mut self, j: i64) -> Level {
        let idx = j.wrapping_sub(self.low) as usize;
        match self.levels.get(idx) {
            Some(&level) => level,
            None => self.grow(j),
        }
    }

    #[inline(always)]
    pub(crate) fn get(&mut self, j: i64) -> f64 {
        self.level(j).p
    }

    #[cold]
    #[inline(never)]
    fn grow(&mut self, j: i64) -> Level {
        let half = (self.levels.len() as i64).max(j.abs() + 1);
        self.rebuild(-2 * half, 2 * half);
        self.levels[(j - self.low) as usize]
    }
}

/// Visit counting for the chosen site filter.
pub(crate) enum Recorder {
    All(HashMap<Site, u64>),
    Only { sites: Vec<Site>, counts: Vec<u64> },
    OriginOnly,
}

impl Recorder {
    pub(crate) fn new(filter: &SiteFilter) -> Self {
        match filter {
            SiteFilter::All => Self::All(HashMap::new()),
            SiteFilter::Only(sites) => {
                let sites: Vec<Site> = sites.iter().copied().filter(|&s| s != (0, 0)).collect();
                Self::Only {
                    counts: vec![0; sites.len()],
                    sites,
                }
            }
            SiteFilter::OriginOnly => Self::OriginOnly,
        }
    }

    /// Counts a visit to a site other than the origin.
    #[inline]
    pub(crate) fn visit(&mut self, x: i64, y: i64) {
        match self {
            Self::All(map) => *map.entry((x, y)).or_insert(0) += 1,
            Self::Only { sites, counts } => {
                for (s, c) in sites.iter().zip(counts.iter_mut()) {
                    if s.0 == x && s.1 == y {
                        *c += 1;
                    }
                }
            }
            Self::OriginOnly => {}
        }
    }

    pub(crate) fn finish(self, origin: u64, keep_origin: bool) -> BTreeMap<Site, u64> {
        let mut out: BTreeMap<Site, u64> = match self {
            Self::All(map) => map.into_iter().collect(),
            Self::Only { sites, counts } => sites
                .into_iter()
                .zip(counts)
                .filter(|&(_, c)| c > 0)
                .collect(),
            Self::OriginOnly => BTreeMap::new(),
        };
        if keep_origin && origin > 0 {
            out.insert((0, 0), origin);
        }
        out
    }
}

fn keeps_origin(filter: &SiteFilter) -> bool {
    match filter {
        SiteFilter::All => true,
        SiteFilter::Only(sites) => sites.contains(&(0, 0)),
        SiteFilter::OriginOnly => false,
    }
}
