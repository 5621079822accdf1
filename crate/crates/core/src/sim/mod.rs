//! Monte Carlo for the branching random walk.
//!
//! Plain trials use an aggregate-rate Gillespie engine over per-site counts.
//! The genealogy mode instead gives every individual its own exponential
//! lifetime and two Poisson birth streams and records the full birth tree
//! with a uniform mark per birth; thinning the marks and pruning boundary
//! crossings then realise the walk at a smaller rate or on a smaller
//! interval from the same randomness.

mod config;
mod coupling;
mod engine;
mod estimate;
mod genealogy;

pub use config::{Configuration, Domain, SimParams, DEFAULT_POP_CAP, DEFAULT_TRIALS, DEFAULT_T_MAX};
pub use coupling::{coupling_check, CouplingReport, CouplingSpec, Violation};
pub use engine::{
    run_trajectory, run_trajectory_with, simulate_path, trial_rng, Recording, TrajectoryPoint, TrialOutcome,
    TrialRng, Verdict,
};
pub use estimate::{
    empirical_mean_counts, empirical_mean_total, estimate_survival, wilson_interval, EmpiricalMeans,
    MeanEstimate, SurvivalEstimate,
};
pub use genealogy::{
    build_genealogy, build_genealogy_with, check_domination, restrict_genealogy, restricted_subtree,
    thin_genealogy, Domination, Genealogy, Individual,
};
