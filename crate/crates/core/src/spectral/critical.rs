use serde::{Deserialize, Serialize};

use super::charpoly::leading_minors_positive_at_zero;
use super::generator::GeneratorMatrix;
use super::sturm::{largest_eigenvalue, Bisection};
use crate::error::{BrwError, Result};
use crate::exec::Execution;
use crate::format::sig15;
use crate::params::{check_tol, BirthRate, IntervalRadius};

pub const DEFAULT_TOL: f64 = 1e-12;

/// Lower end of the bisection bracket for `lambda_c`, just above 1/2.
const LAMBDA_FLOOR: f64 = 0.5 + 1e-15;
/// Largest `N` that [`critical_n`] will search.
const CRITICAL_N_LIMIT: u64 = 1 << 22;
/// Gershgorin bound for `C_N` after symmetrisation.
const SIGMA_UPPER: f64 = 1.0 + std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalMethod {
    SturmEigen,
    PolyRoot,
}

/// A solved critical birth rate.
///
/// `residual` is the gap between the two methods; `bracket_width` is the
/// width of the final Sturm bracket in the birth-rate variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub n: IntervalRadius,
    #[serde(serialize_with = "sig15")]
    pub lambda_c: f64,
    pub method: CriticalMethod,
    #[serde(serialize_with = "sig15")]
    pub residual: f64,
    #[serde(serialize_with = "sig15")]
    pub bracket_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub n: u64,
    #[serde(serialize_with = "sig15")]
    pub lambda_c: f64,
    /// `n^2 (2 lambda_c - 1)`
    #[serde(serialize_with = "sig15")]
    pub scaled_gap: f64,
}

fn sigma_bisection(n: IntervalRadius, tol: f64, done: impl Fn(f64, f64) -> bool) -> Result<Bisection> {
    let off = GeneratorMatrix::symmetrized_off_diagonal(n);
    let diag = vec![0.0; n.types()];
    largest_eigenvalue(&diag, &off, 0.0, SIGMA_UPPER, tol, done)
}

/// Largest eigenvalue of `C_N`, to within `tol`.
pub fn spectral_radius_c(n: IntervalRadius, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    Ok(sigma_bisection(n, tol, |lo, hi| hi - lo <= tol)?.value)
}

/// Largest eigenvalue of `C_N` to full working precision.
pub fn sigma_max(n: IntervalRadius) -> f64 {
    // Bisection always terminates once the bracket stops shrinking.
    match sigma_bisection(n, 0.0, |lo, hi| 0.5 * (lo + hi) <= lo || 0.5 * (lo + hi) >= hi) {
        Ok(b) => b.value,
        Err(_) => unreachable!("machine-precision bisection cannot run out of budget"),
    }
}

/// `lambda_c(N) = 1 / sigma_max(C_N)` by Sturm bisection. Returns the value and
/// the final bracket width in `lambda`.
pub fn critical_lambda_sturm(n: IntervalRadius, tol: f64) -> Result<(f64, f64)> {
    check_tol(tol)?;
    // bracket [lo, hi] in sigma maps to [1/hi, 1/lo] in lambda
    let b = sigma_bisection(n, tol, |lo, hi| lo > 0.0 && 1.0 / lo - 1.0 / hi <= tol)?;
    let lam_lo = 1.0 / b.hi;
    let lam_hi = 1.0 / b.lo;
    Ok((0.5 * (lam_lo + lam_hi), lam_hi - lam_lo))
}

/// Smallest positive root in `lambda` of `f_N(0)`, by bisection on
/// `(1/2, sqrt(2)/2]` using the sign pattern of the leading minors.
pub fn critical_lambda_poly(n: IntervalRadius, tol: f64) -> Result<(f64, f64)> {
    check_tol(tol)?;
    let mut lo = LAMBDA_FLOOR;
    let mut hi = std::f64::consts::FRAC_1_SQRT_2;
    if !leading_minors_positive_at_zero(n, lo) {
        return Err(BrwError::ToleranceNotReached { tol, width: hi - lo });
    }
    if leading_minors_positive_at_zero(n, hi) {
        // the root sits on the upper end of the bracket
        return Ok((hi, 0.0));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(BrwError::ToleranceNotReached { tol, width: hi - lo });
        }
        if leading_minors_positive_at_zero(n, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), hi - lo))
}

/// `lambda_c(N)` by Sturm bisection, cross-checked against the polynomial
/// root. Fails with [`BrwError::MethodDisagreement`] if they differ by more
/// than `10 * tol`.
pub fn critical_lambda(n: IntervalRadius, tol: f64) -> Result<CriticalPoint> {
    let (sturm, width) = critical_lambda_sturm(n, tol)?;
    let (poly, _) = critical_lambda_poly(n, tol)?;
    let residual = (sturm - poly).abs();
    if residual > 10.0 * tol {
        return Err(BrwError::MethodDisagreement { n: n.get(), sturm, poly });
    }
    Ok(CriticalPoint {
        n,
        lambda_c: sturm,
        method: CriticalMethod::SturmEigen,
        residual,
        bracket_width: width,
    })
}

/// Top eigenvalue of `A_N`: `lambda sigma_max(C_N) - 1`.
pub fn malthusian_parameter(n: IntervalRadius, lambda: BirthRate) -> f64 {
    lambda.value() * sigma_max(n) - 1.0
}

/// Least `N` with `lambda > lambda_c(N)`.
///
/// Tries `N = 1, 2, 4, ...` until supercritical, then bisects on the last
/// doubling step; `lambda_c` decreases strictly in `N`.
pub fn critical_n(lambda: BirthRate, tol: f64) -> Result<u64> {
    check_tol(tol)?;
    let lam = lambda.value();
    if lam <= 0.5 {
        return Err(BrwError::SubcriticalRate { lambda: lam });
    }
    let supercritical = |n: u64| -> Result<bool> {
        let r = IntervalRadius::new(n)?;
        Ok(lam > critical_lambda(r, tol)?.lambda_c)
    };
    if supercritical(1)? {
        return Ok(1);
    }
    let mut below = 1u64;
    let mut above = 2u64;
    while !supercritical(above)? {
        below = above;
        above *= 2;
        if above > CRITICAL_N_LIMIT {
            return Err(BrwError::SearchLimit { lambda: lam, limit: CRITICAL_N_LIMIT });
        }
    }
    while above - below > 1 {
        let mid = below + (above - below) / 2;
        if supercritical(mid)? {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(above)
}

/// Critical rates and scaled gaps for `n = 1..=n_max`, in order of `n`.
pub fn phase_table(n_max: u64, tol: f64, exec: Execution) -> Result<Vec<PhaseRow>> {
    if n_max == 0 {
        return Err(BrwError::InvalidParameter {
            name: "n_max",
            reason: "must be at least 1".into(),
        });
    }
    check_tol(tol)?;
    exec.map_collect(1..n_max + 1, |n| phase_row(n, tol))
        .into_iter()
        .collect()
}

pub(crate) fn phase_row(n: u64, tol: f64) -> Result<PhaseRow> {
    let cp = critical_lambda(IntervalRadius::new(n)?, tol)?;
    let nf = n as f64;
    Ok(PhaseRow {
        n,
        lambda_c: cp.lambda_c,
        scaled_gap: nf * nf * (2.0 * cp.lambda_c - 1.0),
    })
}
