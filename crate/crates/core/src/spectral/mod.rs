//! Critical birth rates of the restricted walk from the spectrum of its
//! mean generator.
//!
//! Two independent routes are implemented: Sturm bisection for the top
//! eigenvalue of the symmetrised coupling matrix, and bisection in the birth
//! rate on the signs of the characteristic-polynomial recursion. The public
//! [`critical_lambda`] runs both and refuses to answer when they disagree.

mod asymptotics;
mod charpoly;
mod critical;
mod generator;
mod sturm;

pub use asymptotics::{asymptotics, candidate_limits, AsymptoticReport, Candidate, CONVERGENCE_TOL, SUPPORT_TOL};
pub use charpoly::{char_poly_eval, char_poly_eval_scaled, leading_minors_positive_at_zero, ScaledReal};
pub use critical::{
    critical_lambda, critical_lambda_poly, critical_lambda_sturm, critical_n, malthusian_parameter,
    phase_table, sigma_max, spectral_radius_c, CriticalMethod, CriticalPoint, PhaseRow, DEFAULT_TOL,
};
pub use generator::{build_generator, GeneratorMatrix};
pub use sturm::{largest_eigenvalue, sturm_count_below, Bisection};
