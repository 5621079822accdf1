//! Per-individual construction of the unrestricted walk and the two
//! couplings derived from it.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::config::{Configuration, Domain, SimParams};
use super::engine::trial_rng;
use crate::error::{BrwError, Result};
use crate::format::sig15;
use crate::params::{BirthRate, IntervalRadius};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: u64,
    pub parent: Option<u64>,
    pub site: i64,
    #[serde(serialize_with = "sig15")]
    pub birth_time: f64,
    #[serde(serialize_with = "sig15")]
    pub death_time: f64,
    /// Uniform on `[0, 1)`; absent for initial individuals.
    pub birth_mark: Option<f64>,
}

impl Individual {
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth_time <= t && t < self.death_time
    }
}

/// A recorded birth tree. Individuals are sorted by birth time and ids
/// increase along that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genealogy {
    pub lambda: BirthRate,
    #[serde(serialize_with = "sig15")]
    pub t_max: f64,
    /// Set when the individual budget ran out; the record is complete only
    /// strictly before this time.
    pub truncated_at: Option<f64>,
    pub individuals: Vec<Individual>,
}

impl Genealogy {
    /// Whether the record is complete at time `t`.
    pub fn covers(&self, t: f64) -> bool {
        t >= 0.0
            && t <= self.t_max
            && match self.truncated_at {
                Some(cut) => t < cut,
                None => true,
            }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if self.covers(t) {
            Ok(())
        } else {
            Err(BrwError::QueryBeyondTruncation {
                t,
                valid_until: self.truncated_at.unwrap_or(self.t_max).min(self.t_max),
            })
        }
    }

    pub fn counts_at(&self, t: f64) -> Result<Configuration> {
        self.check_time(t)?;
        Ok(Configuration::from_counts(
            self.individuals.iter().filter(|i| i.alive_at(t)).map(|i| (i.site, 1)),
        ))
    }

    pub fn total_at(&self, t: f64) -> Result<u64> {
        self.check_time(t)?;
        Ok(self.individuals.iter().filter(|i| i.alive_at(t)).count() as u64)
    }

    /// Keeps individuals passing `keep`, provided their parent was kept too.
    fn filter_tree(&self, lambda: BirthRate, keep: impl Fn(&Individual) -> bool) -> Genealogy {
        let mut kept: Vec<Individual> = Vec::new();
        let mut kept_ids: Vec<u64> = Vec::new();
        for ind in &self.individuals {
            let parent_ok = match ind.parent {
                None => true,
                Some(p) => kept_ids.binary_search(&p).is_ok(),
            };
            if parent_ok && keep(ind) {
                kept_ids.push(ind.id);
                kept.push(*ind);
            }
        }
        Genealogy { lambda, t_max: self.t_max, truncated_at: self.truncated_at, individuals: kept }
    }
}

/// Pending birth, ordered by time then creation sequence.
struct Pending {
    time: f64,
    seq: u64,
    parent: Option<u64>,
    site: i64,
    mark: Option<f64>,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Builds the genealogy of the unrestricted walk with the generator for trial
/// 0 of `params.seed`. `params.pop_cap` bounds the number of individuals.
pub fn build_genealogy(params: &SimParams) -> Result<Genealogy> {
    build_genealogy_with(params, &mut trial_rng(params.seed, 0))
}

pub fn build_genealogy_with<R: Rng>(params: &SimParams, rng: &mut R) -> Result<Genealogy> {
    params.validate()?;
    if params.domain != Domain::Unrestricted {
        return Err(BrwError::InvalidParameter {
            name: "domain",
            reason: "genealogies are built on the unrestricted line; restrict afterwards".into(),
        });
    }
    if !params.t_max.is_finite() {
        return Err(BrwError::InvalidParameter {
            name: "t_max",
            reason: "genealogy mode needs a finite horizon".into(),
        });
    }
    let lambda = params.lambda.value();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for (&site, &k) in &params.initial.counts {
        for _ in 0..k {
            heap.push(Pending { time: 0.0, seq, parent: None, site, mark: None });
            seq += 1;
        }
    }
    let mut individuals: Vec<Individual> = Vec::new();
    let mut truncated_at = None;
    while let Some(p) = heap.pop() {
        if individuals.len() as u64 >= params.pop_cap {
            truncated_at = Some(p.time);
            break;
        }
        let id = individuals.len() as u64;
        let lifetime: f64 = rng.sample(Exp1);
        let death_time = p.time + lifetime;
        if lambda > 0.0 {
            let stop = death_time.min(params.t_max);
            for step in [-1i64, 1] {
                let mut s = p.time;
                loop {
                    s += rng.sample::<f64, _>(Exp1) / lambda;
                    if s >= stop {
                        break;
                    }
                    let mark = rng.random::<f64>();
                    heap.push(Pending { time: s, seq, parent: Some(id), site: p.site + step, mark: Some(mark) });
                    seq += 1;
                }
            }
        }
        individuals.push(Individual {
            id,
            parent: p.parent,
            site: p.site,
            birth_time: p.time,
            death_time,
            birth_mark: p.mark,
        });
    }
    Ok(Genealogy { lambda: params.lambda, t_max: params.t_max, truncated_at, individuals })
}

/// The `N`-restricted process inside `g`: an individual survives when it sits
/// in `{-N, ..., N}` and its parent survived, i.e. its birth edge and every
/// ancestor's birth edge stay inside the interval.
pub fn restricted_subtree(g: &Genealogy, n: IntervalRadius) -> Genealogy {
    g.filter_tree(g.lambda, |ind| n.contains(ind.site))
}

/// Per-site counts of the `N`-restricted process at each of `times`.
pub fn restrict_genealogy(g: &Genealogy, n: IntervalRadius, times: &[f64]) -> Result<Vec<Configuration>> {
    for &t in times {
        g.check_time(t)?;
    }
    let sub = restricted_subtree(g, n);
    times.iter().map(|&t| sub.counts_at(t)).collect()
}

/// Thins `g` from its rate `lambda2` down to `lambda1`: a birth is kept when
/// its mark is below `lambda1 / lambda2` and its parent was kept.
pub fn thin_genealogy(g: &Genealogy, lambda1: BirthRate) -> Result<Genealogy> {
    let (l1, l2) = (lambda1.value(), g.lambda.value());
    if l1 > l2 {
        return Err(BrwError::RateOrder { lambda1: l1, lambda2: l2 });
    }
    let ratio = if l2 > 0.0 { l1 / l2 } else { 0.0 };
    Ok(g.filter_tree(lambda1, |ind| ind.birth_mark.is_none_or(|m| m < ratio)))
}

/// Result of comparing two genealogies sitewise at every event time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domination {
    /// Distinct event times inspected.
    pub instants: u64,
    /// First `(time, site, lower count, upper count)` with lower > upper.
    pub violation: Option<(f64, i64, u64, u64)>,
}

impl Domination {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `lower <= upper` at every site, just after every birth or death in
/// either genealogy, over the time range both records cover.
pub fn check_domination(lower: &Genealogy, upper: &Genealogy) -> Domination {
    // (time, site, delta, which) with which = 0 for lower, 1 for upper
    let mut events: Vec<(f64, i64, i64, usize)> = Vec::new();
    for (which, g) in [lower, upper].into_iter().enumerate() {
        for ind in &g.individuals {
            if lower.covers(ind.birth_time) && upper.covers(ind.birth_time) {
                events.push((ind.birth_time, ind.site, 1, which));
                if lower.covers(ind.death_time) && upper.covers(ind.death_time) {
                    events.push((ind.death_time, ind.site, -1, which));
                }
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut counts: HashMap<i64, [i64; 2]> = HashMap::new();
    let mut instants = 0u64;
    let mut i = 0;
    while i < events.len() {
        let t = events[i].0;
        let mut touched = Vec::new();
        while i < events.len() && events[i].0 == t {
            let (_, site, delta, which) = events[i];
            counts.entry(site).or_insert([0, 0])[which] += delta;
            touched.push(site);
            i += 1;
        }
        instants += 1;
        touched.sort_unstable();
        touched.dedup();
        for site in touched {
            let [lo, hi] = counts[&site];
            if lo > hi {
                return Domination { instants, violation: Some((t, site, lo as u64, hi.max(0) as u64)) };
            }
        }
    }
    Domination { instants, violation: None }
}
