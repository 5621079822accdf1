//! Sequential / data-parallel execution of independent work items.
//!
//! Work items are indexed by `u64` and results are always returned in index
//! order, so callers that reduce with exact (integer) arithmetic get
//! bit-identical answers regardless of the thread count.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How to run a batch of independent items.
///
/// `Parallel` uses the current rayon pool when the `parallel` feature is
/// enabled and silently degrades to `Sequential` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn map_collect<T, F>(self, items: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => items.map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.into_par_iter().map(f).collect(),
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel => items.map(f).collect(),
        }
    }

    /// Maps every item and folds the results with an associative, commutative
    /// `combine`. Only use with exact arithmetic if determinism matters.
    pub fn map_reduce<T, F, C>(self, items: Range<u64>, identity: T, f: F, combine: C) -> T
    where
        T: Send + Clone + Sync,
        F: Fn(u64) -> T + Sync + Send,
        C: Fn(T, T) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => items.map(f).fold(identity, combine),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items
                .into_par_iter()
                .map(f)
                .reduce(|| identity.clone(), &combine),
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel => items.map(f).fold(identity, combine),
        }
    }
}
