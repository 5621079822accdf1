use thiserror::Error;

/// Errors produced by the spectral, mean and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BrwError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("bisection budget exhausted before reaching tolerance {tol:e} (width {width:e})")]
    ToleranceNotReached { tol: f64, width: f64 },

    #[error("critical value methods disagree at n = {n}: sturm {sturm}, polynomial {poly}")]
    MethodDisagreement { n: u64, sturm: f64, poly: f64 },

    #[error("birth rate {lambda} is not above 1/2; no finite interval is supercritical")]
    SubcriticalRate { lambda: f64 },

    #[error("critical size search exceeded n = {limit} for lambda = {lambda}")]
    SearchLimit { lambda: f64, limit: u64 },

    #[error("initial type {j} is outside 0..={n}")]
    TypeOutOfRange { j: u64, n: u64 },

    #[error("thinning requires lambda1 <= lambda2, got {lambda1} > {lambda2}")]
    RateOrder { lambda1: f64, lambda2: f64 },

    #[error("query time {t} is at or beyond the valid range of the genealogy (ends at {valid_until})")]
    QueryBeyondTruncation { t: f64, valid_until: f64 },
}

impl BrwError {
    /// True for failures of a numerical method rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            BrwError::ToleranceNotReached { .. }
                | BrwError::MethodDisagreement { .. }
                | BrwError::SearchLimit { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, BrwError>;
