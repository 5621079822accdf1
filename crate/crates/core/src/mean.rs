//! Mean semigroup `M_N(t) = exp(A_N t)` of the type-indexed branching process.
//!
//! Entry `(j, k)` of `M_N(t)` is the expected number of type-`k` individuals
//! (those at distance `k` from the origin, both sides pooled) at time `t`
//! descending from a single type-`j` individual. The exponential is formed
//! from the eigendecomposition of the symmetrised coupling matrix, so the
//! eigenvalues of `A_N` are exactly `-1 + lambda sigma_i`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{BrwError, Result};
use crate::format::{sig15, sig15_rows, sig15_seq};
use crate::params::{BirthRate, IntervalRadius};
use crate::spectral::GeneratorMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanMatrix {
    pub n: IntervalRadius,
    pub lambda: BirthRate,
    #[serde(serialize_with = "sig15")]
    pub t: f64,
    /// Row-major `(N+1) x (N+1)` entries.
    #[serde(serialize_with = "sig15_rows")]
    pub entries: Vec<Vec<f64>>,
}

impl MeanMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn row_sum(&self, j: usize) -> f64 {
        self.entries[j].iter().sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |j, k| self.entries[j][k])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCurve {
    #[serde(serialize_with = "sig15_seq")]
    pub times: Vec<f64>,
    #[serde(serialize_with = "sig15_seq")]
    pub expected_total: Vec<f64>,
}

/// Eigen-data of `T = D C_N D^{-1}` together with the similarity `D`.
#[derive(Debug, Clone)]
pub struct MeanSpectrum {
    lambda: f64,
    sigma: DVector<f64>,
    vectors: DMatrix<f64>,
    scale: Vec<f64>,
    /// `sum_k d_k Q[k, i]`, reused by every row sum
    weights: Vec<f64>,
}

impl MeanSpectrum {
    pub fn new(n: IntervalRadius, lambda: BirthRate) -> Self {
        let dim = n.types();
        let off = GeneratorMatrix::symmetrized_off_diagonal(n);
        let mut t = DMatrix::<f64>::zeros(dim, dim);
        for (i, &e) in off.iter().enumerate() {
            t[(i, i + 1)] = e;
            t[(i + 1, i)] = e;
        }
        let eig = t.symmetric_eigen();
        let scale = GeneratorMatrix::similarity_scale(n);
        let weights = (0..dim)
            .map(|i| (0..dim).map(|k| scale[k] * eig.eigenvectors[(k, i)]).sum())
            .collect();
        MeanSpectrum {
            lambda: lambda.value(),
            sigma: eig.eigenvalues,
            vectors: eig.eigenvectors,
            scale,
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    /// Eigenvalues `-1 + lambda sigma_i` of `A_N`.
    pub fn rates(&self) -> impl Iterator<Item = f64> + '_ {
        self.sigma.iter().map(move |s| -1.0 + self.lambda * s)
    }

    pub fn top_rate(&self) -> f64 {
        self.rates().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn matrix(&self, t: f64) -> Vec<Vec<f64>> {
        let d = self.dim();
        if t == 0.0 {
            return (0..d)
                .map(|j| (0..d).map(|k| if j == k { 1.0 } else { 0.0 }).collect())
                .collect();
        }
        let growth: Vec<f64> = self.rates().map(|r| (r * t).exp()).collect();
        (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| {
                        let s: f64 = (0..d)
                            .map(|i| self.vectors[(j, i)] * self.vectors[(k, i)] * growth[i])
                            .sum();
                        // exact entries are nonnegative; drop rounding noise
                        (s * self.scale[k] / self.scale[j]).max(0.0)
                    })
                    .collect()
            })
            .collect()
    }

    /// `ln sum_k M(j, k)` evaluated relative to the top rate, so it stays
    /// finite for large `t`.
    pub fn ln_row_sum(&self, j: usize, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let top = self.top_rate();
        let s: f64 = self
            .rates()
            .enumerate()
            .map(|(i, r)| self.vectors[(j, i)] * self.weights[i] * ((r - top) * t).exp())
            .sum();
        top * t + (s / self.scale[j]).ln()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(BrwError::InvalidParameter {
            name: "t",
            reason: format!("time must be finite and nonnegative, got {t}"),
        })
    }
}

fn check_type(n: IntervalRadius, j: u64) -> Result<()> {
    if j <= n.get() {
        Ok(())
    } else {
        Err(BrwError::TypeOutOfRange { j, n: n.get() })
    }
}

pub fn mean_matrix(n: IntervalRadius, lambda: BirthRate, t: f64) -> Result<MeanMatrix> {
    check_time(t)?;
    let entries = MeanSpectrum::new(n, lambda).matrix(t);
    Ok(MeanMatrix { n, lambda, t, entries })
}

/// Expected total population at `t` from one individual of type `j`.
pub fn expected_total(n: IntervalRadius, lambda: BirthRate, t: f64, j: u64) -> Result<f64> {
    Ok(ln_expected_total(n, lambda, t, j)?.exp())
}

/// Natural log of [`expected_total`]; finite even where the total overflows.
pub fn ln_expected_total(n: IntervalRadius, lambda: BirthRate, t: f64, j: u64) -> Result<f64> {
    check_time(t)?;
    check_type(n, j)?;
    Ok(MeanSpectrum::new(n, lambda).ln_row_sum(j as usize, t))
}

/// [`expected_total`] on a caller-supplied increasing time grid.
pub fn mean_curve(n: IntervalRadius, lambda: BirthRate, times: &[f64], j: u64) -> Result<MeanCurve> {
    check_type(n, j)?;
    for &t in times {
        check_time(t)?;
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BrwError::InvalidParameter {
            name: "times",
            reason: "time grid must be strictly increasing".into(),
        });
    }
    let spec = MeanSpectrum::new(n, lambda);
    let expected_total = times.iter().map(|&t| spec.ln_row_sum(j as usize, t).exp()).collect();
    Ok(MeanCurve { times: times.to_vec(), expected_total })
}

/// Expected total of the unrestricted walk on the integers:
/// `a0 exp((2 lambda - 1) t)`.
pub fn unrestricted_mean_total(lambda: BirthRate, t: f64, a0: f64) -> Result<f64> {
    check_time(t)?;
    if !(a0.is_finite() && a0 >= 0.0) {
        return Err(BrwError::InvalidParameter {
            name: "a0",
            reason: format!("initial count must be nonnegative, got {a0}"),
        });
    }
    Ok(a0 * ((2.0 * lambda.value() - 1.0) * t).exp())
}
