//! Characteristic polynomial `f_N(x) = det(xI - A_N)` by its three-term
//! recursion.

use crate::params::{BirthRate, IntervalRadius};

/// A real number stored as `mantissa * 2^exp2`, used where `f_N` over- or
/// underflows an `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledReal {
    pub mantissa: f64,
    pub exp2: i64,
}

impl ScaledReal {
    pub fn signum(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }

    /// Collapses to an `f64`, saturating to `±inf` or `0`.
    pub fn to_f64(self) -> f64 {
        let e = self.exp2.clamp(-4000, 4000) as i32;
        // three steps keep every factor inside the normal range
        let third = e / 3;
        self.mantissa * 2f64.powi(third) * 2f64.powi(third) * 2f64.powi(e - 2 * third)
    }
}

/// Binary exponent `k` with `2^k <= |m| < 2^(k+1)`, for normal `m`.
fn binary_exponent(m: f64) -> i32 {
    ((m.abs().to_bits() >> 52) & 0x7ff) as i32 - 1023
}

/// `2^e` for `e` in the normal exponent range.
fn pow2(e: i32) -> f64 {
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// Mantissas are pulled back to magnitude ~1 once they leave this range.
const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BELOW: f64 = 1e-150;

/// Runs the recursion and hands `(k, f_k(x))` to `visit` for `k = 0..=n`.
/// Stops early when `visit` returns `false`.
fn run_recursion(n: u64, lambda: f64, x: f64, mut visit: impl FnMut(u64, ScaledReal) -> bool) {
    let shift = x + 1.0;
    let u = lambda * lambda;
    let mut prev = shift;
    let mut cur = shift * shift - 2.0 * u;
    let mut exp2: i64 = 0;
    if !visit(0, ScaledReal { mantissa: prev, exp2 }) || n == 0 {
        return;
    }
    if !visit(1, ScaledReal { mantissa: cur, exp2 }) {
        return;
    }
    for k in 2..=n {
        let next = shift * cur - u * prev;
        prev = cur;
        cur = next;
        let m = prev.abs().max(cur.abs());
        if (m > RESCALE_ABOVE || m < RESCALE_BELOW) && m != 0.0 && m.is_finite() {
            let e = binary_exponent(m);
            let s = pow2(-e);
            prev *= s;
            cur *= s;
            exp2 += e as i64;
        }
        if !visit(k, ScaledReal { mantissa: cur, exp2 }) {
            return;
        }
    }
}

/// `f_N(x)` with the exponent kept separately, so the sign and log-magnitude
/// stay meaningful for very large `N`.
pub fn char_poly_eval_scaled(n: IntervalRadius, lambda: BirthRate, x: f64) -> ScaledReal {
    let mut last = ScaledReal { mantissa: 0.0, exp2: 0 };
    run_recursion(n.get(), lambda.value(), x, |_, v| {
        last = v;
        true
    });
    last
}

/// `f_N(x) = det(xI - A_N)` as a plain `f64` (may saturate for large `N`).
pub fn char_poly_eval(n: IntervalRadius, lambda: BirthRate, x: f64) -> f64 {
    char_poly_eval_scaled(n, lambda, x).to_f64()
}

/// Whether `f_k(0) > 0` for every `k = 0..=N`.
///
/// The `f_k` are the characteristic polynomials of the leading blocks of
/// `A_N`, so by interlacing this holds exactly when every eigenvalue of
/// `A_N` is negative, i.e. when `lambda < lambda_c(N)`.
pub fn leading_minors_positive_at_zero(n: IntervalRadius, lambda: f64) -> bool {
    let mut ok = true;
    run_recursion(n.get(), lambda, 0.0, |_, v| {
        ok = v.mantissa > 0.0;
        ok
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64) -> IntervalRadius {
        IntervalRadius::new(n).unwrap()
    }

    fn l(v: f64) -> BirthRate {
        BirthRate::new_or_zero(v).unwrap()
    }

    #[test]
    fn known_values() {
        assert!(char_poly_eval(r(1), l(std::f64::consts::FRAC_1_SQRT_2), 0.0).abs() < 1e-15);
        assert!(char_poly_eval(r(2), l(1.0 / 3f64.sqrt()), 0.0).abs() < 1e-15);
        assert_eq!(char_poly_eval(r(1), l(0.0), 0.0), 1.0);
        // u = 1/4: g2 = 1 - 2u - u = 0.25, g3 = g2 - u (1 - 2u) = 0.125
        assert!((char_poly_eval(r(3), l(0.5), 0.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn scaled_survives_underflow() {
        // f_N(0) at lambda = 0.1 decays but never changes sign
        let v = char_poly_eval_scaled(r(5000), l(0.1), 0.0);
        assert_eq!(v.signum(), 1.0);
        assert!(v.ln_abs().is_finite());
        // large x makes f_N overflow a plain f64
        let big = char_poly_eval_scaled(r(2000), l(0.3), 10.0);
        assert!(char_poly_eval(r(2000), l(0.3), 10.0).is_infinite());
        let root = (11.0 + (121.0f64 - 4.0 * 0.09).sqrt()) / 2.0;
        assert!((big.ln_abs() - 2001.0 * root.ln()).abs() < 1.0);
    }

    #[test]
    fn minors_predicate_brackets_root() {
        assert!(leading_minors_positive_at_zero(r(1), 0.70));
        assert!(!leading_minors_positive_at_zero(r(1), 0.71));
        assert!(leading_minors_positive_at_zero(r(2), 0.577));
        assert!(!leading_minors_positive_at_zero(r(2), 0.578));
    }
}
