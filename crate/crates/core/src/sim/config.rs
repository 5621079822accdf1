use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{BrwError, Result};
use crate::params::{BirthRate, IntervalRadius};

pub const DEFAULT_T_MAX: f64 = 100.0;
pub const DEFAULT_POP_CAP: u64 = 1_000_000;
pub const DEFAULT_TRIALS: u64 = 10_000;

/// Individuals per site. Sites with zero individuals are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub counts: BTreeMap<i64, u64>,
}

impl Configuration {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(site: i64) -> Self {
        Self::from_counts([(site, 1)])
    }

    pub fn from_counts(iter: impl IntoIterator<Item = (i64, u64)>) -> Self {
        let mut c = Configuration::empty();
        for (site, k) in iter {
            c.add(site, k);
        }
        c
    }

    pub fn add(&mut self, site: i64, k: u64) {
        if k > 0 {
            *self.counts.entry(site).or_insert(0) += k;
        }
    }

    pub fn get(&self, site: i64) -> u64 {
        self.counts.get(&site).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Counts pooled by distance from the origin, for types `0..=n`.
    pub fn type_counts(&self, n: u64) -> Vec<u64> {
        let mut out = vec![0; n as usize + 1];
        for (&site, &k) in &self.counts {
            if let Some(slot) = out.get_mut(site.unsigned_abs() as usize) {
                *slot += k;
            }
        }
        out
    }

    /// Sitewise `self <= other`.
    pub fn dominated_by(&self, other: &Configuration) -> bool {
        self.counts.iter().all(|(&s, &k)| k <= other.get(s))
    }
}

/// Where the walk lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// `{-N, ..., N}` with boundary-crossing births suppressed.
    Restricted(IntervalRadius),
    /// The whole integer line.
    Unrestricted,
}

impl Domain {
    pub fn contains(self, site: i64) -> bool {
        match self {
            Domain::Restricted(n) => n.contains(site),
            Domain::Unrestricted => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub lambda: BirthRate,
    pub domain: Domain,
    pub initial: Configuration,
    /// Time horizon; may be `+inf`.
    pub t_max: f64,
    /// Stop with [`super::Verdict::CapReached`] once either the number of
    /// events or the population reaches this value.
    pub pop_cap: u64,
    pub seed: u64,
}

impl SimParams {
    /// One individual at the origin, default horizon and budget, seed 0.
    pub fn new(lambda: BirthRate, domain: Domain) -> Self {
        SimParams {
            lambda,
            domain,
            initial: Configuration::single(0),
            t_max: DEFAULT_T_MAX,
            pop_cap: DEFAULT_POP_CAP,
            seed: 0,
        }
    }

    pub fn restricted(lambda: f64, n: u64) -> Result<Self> {
        Ok(Self::new(BirthRate::new_or_zero(lambda)?, Domain::Restricted(IntervalRadius::new(n)?)))
    }

    pub fn unrestricted(lambda: f64) -> Result<Self> {
        Ok(Self::new(BirthRate::new_or_zero(lambda)?, Domain::Unrestricted))
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_pop_cap(mut self, pop_cap: u64) -> Self {
        self.pop_cap = pop_cap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_initial(mut self, initial: Configuration) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_max.is_nan() || self.t_max <= 0.0 {
            return Err(BrwError::InvalidParameter {
                name: "t_max",
                reason: format!("horizon must be positive, got {}", self.t_max),
            });
        }
        if self.pop_cap == 0 {
            return Err(BrwError::InvalidParameter {
                name: "pop_cap",
                reason: "budget must be at least 1".into(),
            });
        }
        if let Some(&site) = self.initial.counts.keys().find(|&&s| !self.domain.contains(s)) {
            return Err(BrwError::InvalidParameter {
                name: "initial",
                reason: format!("site {site} lies outside the interval"),
            });
        }
        Ok(())
    }
}
