//! Fixed-precision number output shared by every serialized payload.

use serde::Serializer;

/// Significant digits kept in serialized floats.
pub const SIGNIFICANT_DIGITS: usize = 15;

/// Rounds to 15 significant decimal digits (ties to even).
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// `serialize_with` adapter applying [`round_sig15`].
pub fn sig15<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig15(*x))
}

/// `serialize_with` adapter for slices of floats.
pub fn sig15_seq<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&x| round_sig15(x)))
}

/// `serialize_with` adapter for row-major matrices.
pub fn sig15_rows<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rows.iter().map(|r| r.iter().map(|&x| round_sig15(x)).collect::<Vec<_>>()))
}
