//! Sturm-sequence bisection for symmetric tridiagonal matrices.

use crate::error::{BrwError, Result};

const PIVOT_GUARD: f64 = 1e-300;
const MAX_BISECTIONS: usize = 256;

/// Number of eigenvalues strictly below `x` of the symmetric tridiagonal
/// matrix with diagonal `diag` and off-diagonal `off` (`off.len() + 1 ==
/// diag.len()`), counted as the negative pivots of `LDL^T` of `T - xI`.
pub fn sturm_count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    debug_assert_eq!(off.len() + 1, diag.len());
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / q };
        q = d - x - coupling;
        if q.abs() < PIVOT_GUARD {
            q = -PIVOT_GUARD;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Outcome of a bisection: the midpoint of the final bracket and its width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Bisection {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bisects for the largest eigenvalue on `[lo, hi]`.
///
/// `done` sees the current bracket and decides when it is tight enough, which
/// lets callers express the tolerance in a transformed variable.
pub fn largest_eigenvalue(
    diag: &[f64],
    off: &[f64],
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    done: impl Fn(f64, f64) -> bool,
) -> Result<Bisection> {
    let n = diag.len();
    // widen until the bracket is valid
    while sturm_count_below(diag, off, hi) < n {
        hi += hi.abs().max(1.0);
    }
    while sturm_count_below(diag, off, lo) == n {
        lo -= lo.abs().max(1.0);
    }
    for _ in 0..MAX_BISECTIONS {
        if done(lo, hi) {
            return Ok(Bisection { value: 0.5 * (lo + hi), lo, hi });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count_below(diag, off, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if done(lo, hi) {
        return Ok(Bisection { value: 0.5 * (lo + hi), lo, hi });
    }
    Err(BrwError::ToleranceNotReached { tol, width: hi - lo })
}
