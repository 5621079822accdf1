//! Model parameters.

use serde::{Deserialize, Serialize};

use crate::error::{BrwError, Result};

/// Birth rate per neighbour direction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BirthRate(f64);

impl BirthRate {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(BirthRate(value))
        } else {
            Err(BrwError::InvalidParameter {
                name: "lambda",
                reason: format!("must be positive and finite, got {value}"),
            })
        }
    }

    /// Like [`BirthRate::new`] but also admits zero, the pure-death process.
    pub fn new_or_zero(value: f64) -> Result<Self> {
        if value == 0.0 {
            Ok(BirthRate(0.0))
        } else {
            Self::new(value)
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BirthRate {
    type Error = BrwError;

    fn try_from(value: f64) -> Result<Self> {
        BirthRate::new_or_zero(value)
    }
}

impl From<BirthRate> for f64 {
    fn from(rate: BirthRate) -> f64 {
        rate.0
    }
}

/// Radius `N` of the interval `{-N, ..., N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct IntervalRadius(u64);

impl IntervalRadius {
    pub fn new(n: u64) -> Result<Self> {
        if n >= 1 {
            Ok(IntervalRadius(n))
        } else {
            Err(BrwError::InvalidParameter {
                name: "n",
                reason: "interval radius must be at least 1".into(),
            })
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Number of types `0..=N`, i.e. the generator dimension.
    #[inline]
    pub fn types(self) -> usize {
        self.0 as usize + 1
    }

    #[inline]
    pub fn contains(self, site: i64) -> bool {
        site.unsigned_abs() <= self.0
    }
}

impl TryFrom<u64> for IntervalRadius {
    type Error = BrwError;

    fn try_from(n: u64) -> Result<Self> {
        IntervalRadius::new(n)
    }
}

impl From<IntervalRadius> for u64 {
    fn from(n: IntervalRadius) -> u64 {
        n.0
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(BrwError::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        })
    }
}
