//! Pathwise check of both monotone couplings over many genealogies.

use serde::{Deserialize, Serialize};

use super::config::{Configuration, SimParams};
use super::engine::trial_rng;
use super::genealogy::{build_genealogy_with, check_domination, restricted_subtree, thin_genealogy};
use crate::error::{BrwError, Result};
use crate::exec::Execution;
use crate::params::{BirthRate, IntervalRadius};

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    /// `(lambda1, lambda2)` with `lambda1 <= lambda2`; genealogies are built at `lambda2`.
    pub lambda_pairs: Vec<(f64, f64)>,
    /// `(n1, n2)` with `n1 < n2`, checked on every genealogy.
    pub n_pairs: Vec<(u64, u64)>,
    pub genealogies: u64,
    pub t_max: f64,
    pub pop_cap: u64,
    pub seed: u64,
    pub initial: Configuration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub genealogy: u64,
    pub time: f64,
    pub site: i64,
    pub lower: u64,
    pub upper: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub all_dominated: bool,
    pub genealogies: u64,
    pub comparisons: u64,
    pub instants_checked: u64,
    /// Genealogies that hit the individual budget; they are compared on
    /// their complete prefix only.
    pub truncated: u64,
    pub violations: Vec<Violation>,
}

fn validate(spec: &CouplingSpec) -> Result<()> {
    for &(l1, l2) in &spec.lambda_pairs {
        BirthRate::new_or_zero(l1)?;
        BirthRate::new(l2)?;
        if l1 > l2 {
            return Err(BrwError::RateOrder { lambda1: l1, lambda2: l2 });
        }
    }
    for &(n1, n2) in &spec.n_pairs {
        IntervalRadius::new(n1)?;
        if n1 >= n2 {
            return Err(BrwError::InvalidParameter {
                name: "n_pairs",
                reason: format!("need n1 < n2, got {n1}:{n2}"),
            });
        }
    }
    if spec.lambda_pairs.is_empty() {
        return Err(BrwError::InvalidParameter { name: "pairs", reason: "need at least one rate pair".into() });
    }
    Ok(())
}

/// For every rate pair and genealogy index: builds the unrestricted genealogy
/// at `lambda2`, then checks thinned <= original and, for every `(n1, n2)`,
/// restricted to `n1` <= restricted to `n2` <= original.
pub fn coupling_check(spec: &CouplingSpec, exec: Execution) -> Result<CouplingReport> {
    validate(spec)?;
    let per_pair = spec.genealogies;
    let total = per_pair * spec.lambda_pairs.len() as u64;
    let results = exec.map_collect(0..total, |idx| -> Result<(u64, u64, u64, Vec<Violation>)> {
        let (l1, l2) = spec.lambda_pairs[(idx / per_pair.max(1)) as usize];
        let params = SimParams::unrestricted(l2)?
            .with_t_max(spec.t_max)
            .with_pop_cap(spec.pop_cap)
            .with_seed(spec.seed)
            .with_initial(spec.initial.clone());
        let g = build_genealogy_with(&params, &mut trial_rng(spec.seed, idx))?;
        let mut comparisons = 0;
        let mut instants = 0;
        let mut violations = Vec::new();
        let mut compare = |name: String, d: super::genealogy::Domination| {
            comparisons += 1;
            instants += d.instants;
            if let Some((time, site, lower, upper)) = d.violation {
                violations.push(Violation { check: name, genealogy: idx, time, site, lower, upper });
            }
        };
        let thin = thin_genealogy(&g, BirthRate::new_or_zero(l1)?)?;
        compare(format!("lambda {l1} <= {l2}"), check_domination(&thin, &g));
        for &(n1, n2) in &spec.n_pairs {
            let small = restricted_subtree(&g, IntervalRadius::new(n1)?);
            let large = restricted_subtree(&g, IntervalRadius::new(n2)?);
            compare(format!("n {n1} <= {n2} (lambda {l2})"), check_domination(&small, &large));
            compare(format!("n {n2} <= unrestricted (lambda {l2})"), check_domination(&large, &g));
        }
        Ok((comparisons, instants, u64::from(g.truncated_at.is_some()), violations))
    });
    let mut report = CouplingReport {
        all_dominated: true,
        genealogies: total,
        comparisons: 0,
        instants_checked: 0,
        truncated: 0,
        violations: Vec::new(),
    };
    for r in results {
        let (c, i, t, v) = r?;
        report.comparisons += c;
        report.instants_checked += i;
        report.truncated += t;
        report.violations.extend(v);
    }
    report.all_dominated = report.violations.is_empty();
    Ok(report)
}
