//! Large-`N` behaviour of the scaled gap `N^2 (2 lambda_c(N) - 1)`.

use serde::{Deserialize, Serialize};

use super::critical::{phase_row, PhaseRow};
use crate::error::{BrwError, Result};
use crate::exec::Execution;
use crate::format::sig15;
use crate::params::check_tol;

/// Relative gap between the two largest `N` below which the scaled gap is
/// reported as converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// Relative distance to a candidate constant below which it counts as supported.
pub const SUPPORT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub label: String,
    #[serde(serialize_with = "sig15")]
    pub value: f64,
    #[serde(serialize_with = "sig15")]
    pub relative_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub rows: Vec<PhaseRow>,
    /// `|s(N_last) - s(N_prev)| / s(N_last)`
    #[serde(serialize_with = "sig15")]
    pub relative_change: f64,
    pub converged: bool,
    /// Richardson extrapolation of the last two rows assuming an `O(1/N)` error.
    #[serde(serialize_with = "sig15")]
    pub extrapolated_limit: f64,
    pub candidates: Vec<Candidate>,
    /// Label of the closest candidate within [`SUPPORT_TOL`], if any.
    pub supported: Option<String>,
}

/// Limit values the scaled gap is compared against. They only label the
/// report; nothing is computed from them.
pub fn candidate_limits() -> Vec<(String, f64)> {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    vec![("pi^2/2".to_string(), pi2 / 2.0), ("pi^2/8".to_string(), pi2 / 8.0)]
}

pub fn asymptotics(ns: &[u64], tol: f64, exec: Execution) -> Result<AsymptoticReport> {
    check_tol(tol)?;
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 2 || ns[0] == 0 {
        return Err(BrwError::InvalidParameter {
            name: "ns",
            reason: "need at least two distinct radii >= 1".into(),
        });
    }
    let rows = exec
        .map_collect(0..ns.len() as u64, |i| phase_row(ns[i as usize], tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (a, b) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    let relative_change = (b.scaled_gap - a.scaled_gap).abs() / b.scaled_gap.abs();
    let (na, nb) = (a.n as f64, b.n as f64);
    let extrapolated_limit = (nb * b.scaled_gap - na * a.scaled_gap) / (nb - na);
    let candidates: Vec<Candidate> = candidate_limits()
        .into_iter()
        .map(|(label, value)| Candidate {
            label,
            value,
            relative_difference: (extrapolated_limit - value).abs() / value,
        })
        .collect();
    let supported = candidates
        .iter()
        .filter(|c| c.relative_difference < SUPPORT_TOL)
        .min_by(|x, y| x.relative_difference.total_cmp(&y.relative_difference))
        .map(|c| c.label.clone());
    Ok(AsymptoticReport {
        rows,
        relative_change,
        converged: relative_change < CONVERGENCE_TOL,
        extrapolated_limit,
        candidates,
        supported,
    })
}
