//! Argument parsing and dispatch for the `brw-phase` binary.
//!
//! Every subcommand produces a payload string; JSON payloads carry a
//! top-level `"schema": "brw-phase/1"` field and CSV payloads have a header
//! row, comma separators and LF line endings.

use std::fmt::Write as _;
use std::path::PathBuf;

use brw_core::format::round_sig15;
use brw_core::mean::{mean_curve, mean_matrix};
use brw_core::sim::{
    build_genealogy, coupling_check, estimate_survival, simulate_path, Configuration, CouplingSpec, Domain,
    Recording, SimParams, DEFAULT_POP_CAP, DEFAULT_TRIALS, DEFAULT_T_MAX,
};
use brw_core::spectral::{asymptotics, critical_lambda, critical_n, phase_table, DEFAULT_TOL};
use brw_core::{BirthRate, BrwError, Execution, IntervalRadius};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA: &str = "brw-phase/1";
/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "BRW_THREADS";

#[derive(Debug, Parser)]
#[command(name = "brw-phase", version, about = "Survival phase diagram of the branching random walk on {-N..N}")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the payload here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Master seed for Monte Carlo subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical birth rate on {-N..N}.
    CriticalLambda {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Least N on which a birth rate is supercritical.
    CriticalN {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Critical rates and scaled gaps for N = 1..=n_max.
    Phase {
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Mean matrix exp(A_N t), or the expected total on a time grid.
    Mean {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Initial type (distance from the origin) for --times.
        #[arg(long, default_value_t = 0)]
        j: u64,
        /// Comma-separated increasing times; switches output to the expected total curve.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// One Gillespie trajectory as (time, site, count) rows.
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
        /// Record every occupied site on this time grid instead of at events.
        #[arg(long)]
        sample_every: Option<f64>,
    },
    /// Finite-horizon survival probability with a Wilson 95% interval.
    Survival {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
    },
    /// Pathwise check of the rate and interval couplings.
    CoupleCheck {
        /// Rate pairs lambda1:lambda2, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        pairs: Vec<String>,
        /// Radius pairs n1:n2, comma separated.
        #[arg(long, value_delimiter = ',')]
        n_pairs: Vec<String>,
        #[arg(long, default_value_t = 100)]
        genealogies: u64,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = DEFAULT_POP_CAP)]
        pop_cap: u64,
    },
    /// Scaled gaps N^2 (2 lambda_c - 1) for a list of N with an extrapolated limit.
    Asymptotics {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1000u64, 2000, 5000, 10000])]
        ns: Vec<u64>,
        #[arg(long, default_value_t = 1e-15)]
        tol: f64,
    },
    /// Genealogy of the unrestricted walk as a list of individual records.
    Genealogy {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100_000)]
        pop_cap: u64,
        #[arg(long, default_value = "0:1")]
        initial: String,
    },
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub lambda: f64,
    /// Interval radius; omit together with --unrestricted for the whole line.
    #[arg(long, required_unless_present = "unrestricted", conflicts_with = "unrestricted")]
    pub n: Option<u64>,
    #[arg(long)]
    pub unrestricted: bool,
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    pub t_max: f64,
    #[arg(long, default_value_t = DEFAULT_POP_CAP)]
    pub pop_cap: u64,
    /// Initial configuration as site:count pairs, comma separated.
    #[arg(long, default_value = "0:1")]
    pub initial: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] BrwError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Model(e) if e.is_numerical() => 3,
            CliError::Model(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

/// JSON payload wrapper adding the schema tag.
#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalN {
    pub lambda: f64,
    pub n_c: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rows<T> {
    pub rows: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub outcome: brw_core::sim::TrialOutcome,
    pub final_configuration: Configuration,
    pub points: Vec<brw_core::sim::TrajectoryPoint>,
}

pub fn to_json<T: Serialize>(body: &T) -> Result<String, CliError> {
    let env = Envelope { schema: SCHEMA.to_string(), body };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| CliError::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// A float as written to CSV: 15 significant digits, shortest form.
pub fn num(x: f64) -> String {
    serde_json::to_string(&round_sig15(x)).unwrap_or_else(|_| x.to_string())
}

fn csv<I, R>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<str>,
{
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(r.as_ref());
        out.push('\n');
    }
    out
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Invalid(format!("--{name} must be positive, got {v}")))
    }
}

fn radius(n: u64) -> Result<IntervalRadius, CliError> {
    IntervalRadius::new(n).map_err(|_| CliError::Invalid(format!("--n must be at least 1, got {n}")))
}

fn rate(lambda: f64) -> Result<BirthRate, CliError> {
    BirthRate::new(lambda).map_err(|_| CliError::Invalid(format!("--lambda must be positive, got {lambda}")))
}

fn pair<T: std::str::FromStr>(s: &str, flag: &str) -> Result<(T, T), CliError> {
    let bad = || CliError::Invalid(format!("--{flag} expects a:b, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn parse_initial(s: &str) -> Result<Configuration, CliError> {
    let mut c = Configuration::empty();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (site, count) = pair::<i64>(part, "initial")?;
        if count < 0 {
            return Err(CliError::Invalid(format!("negative count in --initial `{part}`")));
        }
        c.add(site, count as u64);
    }
    Ok(c)
}

impl SimArgs {
    fn params(&self, seed: u64) -> Result<SimParams, CliError> {
        let lambda = rate(self.lambda)?;
        let domain = match self.n {
            Some(n) => Domain::Restricted(radius(n)?),
            None => Domain::Unrestricted,
        };
        if self.t_max.is_nan() || self.t_max <= 0.0 {
            return Err(CliError::Invalid(format!("--t-max must be positive, got {}", self.t_max)));
        }
        if self.pop_cap == 0 {
            return Err(CliError::Invalid("--pop-cap must be at least 1".into()));
        }
        let params = SimParams::new(lambda, domain)
            .with_initial(parse_initial(&self.initial)?)
            .with_t_max(self.t_max)
            .with_pop_cap(self.pop_cap)
            .with_seed(seed);
        params.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(params)
    }
}

/// Runs one parsed invocation and returns the payload.
pub fn dispatch(cli: &Cli, exec: Execution) -> Result<String, CliError> {
    let fmt = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::CriticalLambda { n, tol } => {
            let cp = critical_lambda(radius(*n)?, positive("tol", *tol)?)?;
            Ok(match fmt(Format::Json) {
                Format::Json => to_json(&cp)?,
                Format::Csv => csv(
                    "n,lambda_c,method,residual,bracket_width",
                    [format!(
                        "{},{},{},{},{}",
                        cp.n.get(),
                        num(cp.lambda_c),
                        match cp.method {
                            brw_core::spectral::CriticalMethod::SturmEigen => "sturm-eigen",
                            brw_core::spectral::CriticalMethod::PolyRoot => "poly-root",
                        },
                        num(cp.residual),
                        num(cp.bracket_width)
                    )],
                ),
            })
        }
        Command::CriticalN { lambda, tol } => {
            let l = rate(*lambda)?;
            let n_c = critical_n(l, positive("tol", *tol)?)?;
            Ok(match fmt(Format::Json) {
                Format::Json => to_json(&CriticalN { lambda: *lambda, n_c })?,
                Format::Csv => csv("lambda,n_c", [format!("{},{}", num(*lambda), n_c)]),
            })
        }
        Command::Phase { n_max, tol } => {
            if *n_max == 0 {
                return Err(CliError::Invalid("--n-max must be at least 1".into()));
            }
            let rows = phase_table(*n_max, positive("tol", *tol)?, exec)?;
            Ok(match fmt(Format::Csv) {
                Format::Json => to_json(&Rows { rows })?,
                Format::Csv => csv(
                    "n,lambda_c,scaled_gap",
                    rows.iter().map(|r| format!("{},{},{}", r.n, num(r.lambda_c), num(r.scaled_gap))),
                ),
            })
        }
        Command::Mean { n, lambda, t, j, times } => {
            let (n, l) = (radius(*n)?, rate(*lambda)?);
            match times {
                Some(times) => {
                    let curve = mean_curve(n, l, times, *j)?;
                    Ok(match fmt(Format::Csv) {
                        Format::Json => to_json(&curve)?,
                        Format::Csv => csv(
                            "t,expected_total",
                            curve
                                .times
                                .iter()
                                .zip(&curve.expected_total)
                                .map(|(t, v)| format!("{},{}", num(*t), num(*v))),
                        ),
                    })
                }
                None => {
                    let m = mean_matrix(n, l, *t)?;
                    Ok(match fmt(Format::Json) {
                        Format::Json => to_json(&m)?,
                        Format::Csv => csv(
                            "j,k,mean",
                            m.entries.iter().enumerate().flat_map(|(j, row)| {
                                row.iter().enumerate().map(move |(k, v)| format!("{j},{k},{}", num(*v)))
                            }),
                        ),
                    })
                }
            }
        }
        Command::Simulate { sim, sample_every } => {
            let params = sim.params(cli.seed)?;
            let recording = match sample_every {
                Some(dt) => Recording::Grid(positive("sample-every", *dt)?),
                None => Recording::Events,
            };
            let (outcome, final_configuration, points) = simulate_path(&params, recording)?;
            Ok(match fmt(Format::Csv) {
                Format::Json => to_json(&Trajectory { outcome, final_configuration, points })?,
                Format::Csv => csv(
                    "time,site,count",
                    points.iter().map(|p| format!("{},{},{}", num(p.time), p.site, p.count)),
                ),
            })
        }
        Command::Survival { sim, trials } => {
            if *trials == 0 {
                return Err(CliError::Invalid("--trials must be at least 1".into()));
            }
            let params = sim.params(cli.seed)?;
            let est = estimate_survival(&params, *trials, exec)?;
            Ok(match fmt(Format::Json) {
                Format::Json => to_json(&est)?,
                Format::Csv => csv(
                    "p_hat,ci_low,ci_high,trials,censored_fraction,seed",
                    [format!(
                        "{},{},{},{},{},{}",
                        num(est.p_hat),
                        num(est.ci_low),
                        num(est.ci_high),
                        est.trials,
                        num(est.censored_fraction),
                        est.seed
                    )],
                ),
            })
        }
        Command::CoupleCheck { pairs, n_pairs, genealogies, t_max, pop_cap } => {
            let spec = CouplingSpec {
                lambda_pairs: pairs.iter().map(|p| pair::<f64>(p, "pairs")).collect::<Result<_, _>>()?,
                n_pairs: n_pairs.iter().map(|p| pair::<u64>(p, "n-pairs")).collect::<Result<_, _>>()?,
                genealogies: *genealogies,
                t_max: positive("t-max", *t_max)?,
                pop_cap: *pop_cap,
                seed: cli.seed,
                initial: Configuration::single(0),
            };
            if spec.pop_cap == 0 {
                return Err(CliError::Invalid("--pop-cap must be at least 1".into()));
            }
            let report = coupling_check(&spec, exec).map_err(|e| match e {
                BrwError::RateOrder { .. } | BrwError::InvalidParameter { .. } => CliError::Invalid(e.to_string()),
                other => other.into(),
            })?;
            Ok(match fmt(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => csv(
                    "all_dominated,genealogies,comparisons,instants_checked,truncated",
                    [format!(
                        "{},{},{},{},{}",
                        report.all_dominated,
                        report.genealogies,
                        report.comparisons,
                        report.instants_checked,
                        report.truncated
                    )],
                ),
            })
        }
        Command::Asymptotics { ns, tol } => {
            let report = asymptotics(ns, positive("tol", *tol)?, exec)?;
            Ok(match fmt(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => csv(
                    "n,lambda_c,scaled_gap",
                    report
                        .rows
                        .iter()
                        .map(|r| format!("{},{},{}", r.n, num(r.lambda_c), num(r.scaled_gap))),
                ),
            })
        }
        Command::Genealogy { lambda, t_max, pop_cap, initial } => {
            let params = SimParams::new(rate(*lambda)?, Domain::Unrestricted)
                .with_initial(parse_initial(initial)?)
                .with_t_max(positive("t-max", *t_max)?)
                .with_pop_cap(*pop_cap)
                .with_seed(cli.seed);
            let g = build_genealogy(&params).map_err(|e| CliError::Invalid(e.to_string()))?;
            Ok(match fmt(Format::Json) {
                Format::Json => to_json(&g)?,
                Format::Csv => {
                    let mut out = String::from("id,parent,site,birth_time,death_time,birth_mark\n");
                    for i in &g.individuals {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            i.id,
                            i.parent.map(|p| p.to_string()).unwrap_or_default(),
                            i.site,
                            num(i.birth_time),
                            num(i.death_time),
                            i.birth_mark.map(num).unwrap_or_default()
                        );
                    }
                    out
                }
            })
        }
    }
}

/// Thread count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_override() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(CliError::Invalid(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Dispatches inside a rayon pool sized by [`THREADS_ENV`] when set.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match thread_override()? {
        None => dispatch(cli, Execution::default()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            pool.install(|| dispatch(cli, Execution::default()))
        }
    }
}
