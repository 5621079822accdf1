//! Monte Carlo estimators. Every trial draws from its own stream and results
//! are combined with integer sums, so estimates are bit-identical for any
//! thread count.

use serde::{Deserialize, Serialize};

use super::config::{Configuration, Domain, SimParams};
use super::engine::{run_trajectory_with, trial_rng, Verdict};
use crate::error::{BrwError, Result};
use crate::exec::Execution;
use crate::format::{sig15, sig15_seq};
use crate::params::{BirthRate, IntervalRadius};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;
/// Budget used by the mean estimators, far above what the test grid reaches.
const MEAN_POP_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    #[serde(serialize_with = "sig15")]
    pub p_hat: f64,
    #[serde(serialize_with = "sig15")]
    pub ci_low: f64,
    #[serde(serialize_with = "sig15")]
    pub ci_high: f64,
    pub trials: u64,
    /// Fraction of trials stopped by the event/population budget before the
    /// horizon; these count as survivors.
    #[serde(serialize_with = "sig15")]
    pub censored_fraction: f64,
    pub seed: u64,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(BrwError::InvalidParameter { name: "trials", reason: "need at least one trial".into() })
    } else {
        Ok(())
    }
}

/// Fraction of trials not extinct by the horizon.
pub fn estimate_survival(params: &SimParams, trials: u64, exec: Execution) -> Result<SurvivalEstimate> {
    params.validate()?;
    check_trials(trials)?;
    let (survived, capped) = exec.map_reduce(
        0..trials,
        (0u64, 0u64),
        |i| {
            let (o, _) = run_trajectory_with(params, &mut trial_rng(params.seed, i)).expect("validated");
            match o.verdict {
                Verdict::Extinct { .. } => (0, 0),
                Verdict::AliveAtHorizon => (1, 0),
                Verdict::CapReached { .. } => (1, 1),
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let (ci_low, ci_high) = wilson_interval(survived, trials);
    Ok(SurvivalEstimate {
        p_hat: survived as f64 / trials as f64,
        ci_low,
        ci_high,
        trials,
        censored_fraction: capped as f64 / trials as f64,
        seed: params.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    #[serde(serialize_with = "sig15")]
    pub mean: f64,
    #[serde(serialize_with = "sig15")]
    pub std_error: f64,
    pub trials: u64,
}

/// Per-type means at a fixed time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeans {
    #[serde(serialize_with = "sig15_seq")]
    pub means: Vec<f64>,
    #[serde(serialize_with = "sig15_seq")]
    pub std_errors: Vec<f64>,
    pub trials: u64,
    /// Trials that hit the budget before `t`; nonzero means the estimate is biased.
    pub capped: u64,
}

fn moments(sum: u128, sum_sq: u128, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let mean = sum as f64 / n;
    if trials < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq as f64) - n * mean * mean).max(0.0) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sums of per-slot counts and squared counts over trials, plus capped trials.
fn sample_sums(
    params: &SimParams,
    trials: u64,
    slots: usize,
    exec: Execution,
    project: impl Fn(&Configuration) -> Vec<u64> + Sync + Send,
) -> (Vec<u128>, Vec<u128>, u64) {
    let zero = (vec![0u128; slots], vec![0u128; slots], 0u64);
    exec.map_reduce(
        0..trials,
        zero,
        |i| {
            let (o, c) = run_trajectory_with(params, &mut trial_rng(params.seed, i)).expect("validated");
            let v = project(&c);
            let capped = u64::from(matches!(o.verdict, Verdict::CapReached { .. }));
            (
                v.iter().map(|&x| x as u128).collect(),
                v.iter().map(|&x| (x as u128) * (x as u128)).collect(),
                capped,
            )
        },
        |mut a, b| {
            a.0.iter_mut().zip(&b.0).for_each(|(x, y)| *x += y);
            a.1.iter_mut().zip(&b.1).for_each(|(x, y)| *x += y);
            (a.0, a.1, a.2 + b.2)
        },
    )
}

/// Monte Carlo mean of per-type counts at `t` on `{-N, ..., N}`, starting
/// from one individual at site `j`.
pub fn empirical_mean_counts(
    n: IntervalRadius,
    lambda: BirthRate,
    t: f64,
    j: u64,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<EmpiricalMeans> {
    check_trials(trials)?;
    if j > n.get() {
        return Err(BrwError::TypeOutOfRange { j, n: n.get() });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(BrwError::InvalidParameter { name: "t", reason: format!("got {t}") });
    }
    let slots = n.types();
    if t == 0.0 {
        let mut means = vec![0.0; slots];
        means[j as usize] = 1.0;
        return Ok(EmpiricalMeans { means, std_errors: vec![0.0; slots], trials, capped: 0 });
    }
    let params = SimParams::new(lambda, Domain::Restricted(n))
        .with_initial(Configuration::single(j as i64))
        .with_t_max(t)
        .with_pop_cap(MEAN_POP_CAP)
        .with_seed(seed);
    let (sum, sum_sq, capped) = sample_sums(&params, trials, slots, exec, |c| c.type_counts(n.get()));
    let (means, std_errors) = (0..slots).map(|k| moments(sum[k], sum_sq[k], trials)).unzip();
    Ok(EmpiricalMeans { means, std_errors, trials, capped })
}

/// Monte Carlo mean of the total population at `params.t_max`.
pub fn empirical_mean_total(params: &SimParams, trials: u64, exec: Execution) -> Result<MeanEstimate> {
    params.validate()?;
    check_trials(trials)?;
    if !params.t_max.is_finite() {
        return Err(BrwError::InvalidParameter { name: "t_max", reason: "needs a finite horizon".into() });
    }
    let (sum, sum_sq, _) = sample_sums(params, trials, 1, exec, |c| vec![c.total()]);
    let (mean, std_error) = moments(sum[0], sum_sq[0], trials);
    Ok(MeanEstimate { mean, std_error, trials })
}
