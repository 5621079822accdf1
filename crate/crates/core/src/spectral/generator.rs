use nalgebra::DMatrix;

use crate::params::{BirthRate, IntervalRadius};

/// The tridiagonal generator `A_N` of the type-indexed mean semigroup.
///
/// Type `k` is the distance from the origin, so a type-0 individual has two
/// neighbours of type 1 while every other type `k < N` has one neighbour of
/// each of types `k - 1` and `k + 1`. Type `N` cannot reach `N + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    n: IntervalRadius,
    lambda: BirthRate,
}

impl GeneratorMatrix {
    pub fn new(n: IntervalRadius, lambda: BirthRate) -> Self {
        GeneratorMatrix { n, lambda }
    }

    pub fn radius(&self) -> IntervalRadius {
        self.n
    }

    pub fn lambda(&self) -> BirthRate {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.n.types()
    }

    /// Entry `(j, k)` of the coupling matrix `C_N`, where `A_N = -I + lambda C_N`.
    pub fn coupling_entry(&self, j: usize, k: usize) -> f64 {
        let last = self.dim() - 1;
        if j > last || k > last {
            return 0.0;
        }
        match (j, k) {
            (0, 1) => 2.0,
            _ if k == j + 1 => 1.0,
            _ if j == k + 1 => 1.0,
            _ => 0.0,
        }
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        let diag = if j == k { -1.0 } else { 0.0 };
        diag + self.lambda.value() * self.coupling_entry(j, k)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |j, k| self.entry(j, k))
    }

    pub fn coupling_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |j, k| self.coupling_entry(j, k))
    }

    /// Off-diagonal of the symmetric matrix `T = D C_N D^{-1}` with
    /// `D = diag(1, sqrt 2, ..., sqrt 2)`; the diagonal of `T` is zero.
    pub fn symmetrized_off_diagonal(n: IntervalRadius) -> Vec<f64> {
        let mut off = vec![1.0; n.get() as usize];
        off[0] = std::f64::consts::SQRT_2;
        off
    }

    /// Diagonal of the similarity `D` above.
    pub fn similarity_scale(n: IntervalRadius) -> Vec<f64> {
        let mut d = vec![std::f64::consts::SQRT_2; n.types()];
        d[0] = 1.0;
        d
    }
}

/// Convenience constructor matching the operation name used by the CLI.
pub fn build_generator(n: IntervalRadius, lambda: BirthRate) -> GeneratorMatrix {
    GeneratorMatrix::new(n, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(n: u64, lambda: f64) -> GeneratorMatrix {
        build_generator(IntervalRadius::new(n).unwrap(), BirthRate::new_or_zero(lambda).unwrap())
    }

    #[test]
    fn radius_one() {
        let a = gen(1, 0.3).to_dense();
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[-1.0, 0.6, 0.3, -1.0]));
    }

    #[test]
    fn radius_two_unit_rate() {
        let a = gen(2, 1.0).to_dense();
        let want = DMatrix::from_row_slice(3, 3, &[-1., 2., 0., 1., -1., 1., 0., 1., -1.]);
        assert_eq!(a, want);
    }

    #[test]
    fn pure_death() {
        assert_eq!(gen(1, 0.0).to_dense(), -DMatrix::<f64>::identity(2, 2));
    }

    #[test]
    fn structural_invariants() {
        for n in 1..8u64 {
            let g = gen(n, 0.7);
            let d = g.dim();
            for j in 0..d {
                for k in 0..d {
                    let e = g.entry(j, k);
                    if j == k {
                        assert_eq!(e, -1.0);
                    } else if j.abs_diff(k) > 1 {
                        assert_eq!(e, 0.0);
                    } else if j == 0 {
                        assert_eq!(e, 1.4);
                    } else {
                        assert_eq!(e, 0.7);
                    }
                }
            }
        }
    }

    #[test]
    fn similarity_symmetrizes() {
        for n in 1..6u64 {
            let r = IntervalRadius::new(n).unwrap();
            let c = gen(n, 1.0).coupling_dense();
            let d = GeneratorMatrix::similarity_scale(r);
            let off = GeneratorMatrix::symmetrized_off_diagonal(r);
            for j in 0..c.nrows() {
                for k in 0..c.ncols() {
                    let t = d[j] * c[(j, k)] / d[k];
                    let want = if j.abs_diff(k) == 1 { off[j.min(k)] } else { 0.0 };
                    assert!((t - want).abs() < 1e-15, "({j},{k}) {t} vs {want}");
                }
            }
        }
    }
}
