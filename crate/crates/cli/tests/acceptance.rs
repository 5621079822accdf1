//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p brw-cli --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use brw_core::mean::{mean_matrix, unrestricted_mean_total};
use brw_core::sim::{empirical_mean_counts, empirical_mean_total, estimate_survival, SimParams};
use brw_core::spectral::{
    asymptotics, candidate_limits, critical_lambda_poly, critical_lambda_sturm, phase_table,
    DEFAULT_TOL,
};
use brw_core::{BirthRate, Execution, IntervalRadius};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_brw-phase");

struct Report {
    failures: usize,
}

impl Report {
    fn record(&mut self, id: u32, title: &str, pass: bool, detail: String, elapsed: Duration) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id:>2}: {title} ({detail}; {:.2}s)", elapsed.as_secs_f64());
        if !pass {
            self.failures += 1;
        }
    }
}

fn r(n: u64) -> IntervalRadius {
    IntervalRadius::new(n).unwrap()
}

fn l(v: f64) -> BirthRate {
    BirthRate::new(v).unwrap()
}

fn cli(args: &[&str], threads: Option<&str>) -> Vec<u8> {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match threads {
        Some(k) => cmd.env("BRW_THREADS", k),
        None => cmd.env_remove("BRW_THREADS"),
    };
    let out = cmd.output().expect("run brw-phase");
    assert!(out.status.success(), "brw-phase {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn closed_form(n: u64) -> f64 {
    1.0 / (2.0 * (std::f64::consts::PI / (2.0 * n as f64 + 2.0)).cos())
}

fn criterion_1(rep: &mut Report) {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (n, want) in [(1u64, std::f64::consts::FRAC_1_SQRT_2), (2, 1.0 / 3f64.sqrt())] {
        let out = cli(&["critical-lambda", "--n", &n.to_string()], None);
        let v: Value = serde_json::from_slice(&out).unwrap();
        let got = v["lambda_c"].as_f64().unwrap();
        worst = worst.max((got - want).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-10 && elapsed < Duration::from_secs(1);
    rep.record(1, "lambda_c(1) = sqrt2/2, lambda_c(2) = sqrt3/3 via CLI", pass, format!("max abs err {worst:.2e}"), elapsed);
}

fn criterion_2(rep: &mut Report) {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=200 {
        let (a, _) = critical_lambda_sturm(r(n), DEFAULT_TOL).unwrap();
        let (b, _) = critical_lambda_poly(r(n), DEFAULT_TOL).unwrap();
        worst = worst.max((a - b).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && elapsed < Duration::from_secs(10);
    rep.record(2, "Sturm vs polynomial root agree for N <= 200", pass, format!("max gap {worst:.2e}"), elapsed);
}

fn criterion_3(rep: &mut Report) {
    let start = Instant::now();
    let values = Execution::default().map_collect(1..10_001, |n| critical_lambda_poly(r(n), 2e-16).map(|v| v.0));
    let values: Result<Vec<f64>, _> = values.into_iter().collect();
    let elapsed = start.elapsed();
    let (pass, detail) = match values {
        Err(e) => (false, format!("error: {e}")),
        Ok(v) => {
            let above = v.iter().all(|&c| c > 0.5);
            let first_bad = v.windows(2).position(|w| w[1] >= w[0]);
            let min_step = v.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
            (
                above && first_bad.is_none() && elapsed < Duration::from_secs(60),
                format!(
                    "all > 1/2: {above}, first non-decrease: {first_bad:?}, smallest step {min_step:.2e}, lambda_c(1e4) - 1/2 = {:.4e}",
                    v[v.len() - 1] - 0.5
                ),
            )
        }
    };
    rep.record(3, "lambda_c(N) strictly decreasing and > 1/2 for N <= 1e4", pass, detail, elapsed);
}

fn criterion_4(rep: &mut Report) {
    let start = Instant::now();
    // closed form validated against the spectral values first
    let table = phase_table(1000, DEFAULT_TOL, Execution::default()).unwrap();
    let cf_err = table.iter().map(|row| (row.lambda_c - closed_form(row.n)).abs()).fold(0.0, f64::max);
    for (n, want) in [(1u64, std::f64::consts::FRAC_1_SQRT_2), (2, 1.0 / 3f64.sqrt())] {
        assert!((closed_form(n) - want).abs() < 1e-15);
    }
    let report = asymptotics(&[5_000, 10_000], 1e-15, Execution::default()).unwrap();
    let rel = report.relative_change;
    // limit implied by the closed form, far out
    let big = 1e7f64;
    let implied = big * big * (2.0 / (2.0 * (std::f64::consts::PI / (2.0 * big + 2.0)).cos()) - 1.0);
    let nearest = candidate_limits()
        .into_iter()
        .min_by(|a, b| (a.1 - implied).abs().total_cmp(&(b.1 - implied).abs()))
        .unwrap()
        .0;
    let elapsed = start.elapsed();
    let pass = rel < 1e-3 && cf_err <= 1e-9 && report.converged && report.supported.as_deref() == Some(nearest.as_str());
    let cands: Vec<String> = report
        .candidates
        .iter()
        .map(|c| format!("{} = {:.6} (rel diff {:.3e})", c.label, c.value, c.relative_difference))
        .collect();
    rep.record(
        4,
        "scaled gap N^2(2 lambda_c - 1) converges; limit constant reported",
        pass,
        format!(
            "|s(1e4) - s(5e3)|/s(1e4) = {rel:.3e}, closed-form err (N <= 1e3) {cf_err:.2e}, extrapolated limit {:.6}, candidates [{}], supported: {:?}",
            report.extrapolated_limit,
            cands.join(", "),
            report.supported
        ),
        elapsed,
    );
}

fn criterion_5(rep: &mut Report) {
    let start = Instant::now();
    let p1 = SimParams::restricted(0.6, 1).unwrap().with_t_max(200.0).with_seed(2024);
    let p2 = SimParams::restricted(0.6, 2).unwrap().with_t_max(100.0).with_seed(2025);
    let e1 = estimate_survival(&p1, 10_000, Execution::default()).unwrap();
    let e2 = estimate_survival(&p2, 10_000, Execution::default()).unwrap();
    let elapsed = start.elapsed();
    let pass = e1.ci_high < 0.01 && e2.ci_low > 0.0 && elapsed < Duration::from_secs(120);
    rep.record(
        5,
        "lambda = 0.6: dies on I_1, survives on I_2",
        pass,
        format!(
            "I_1 p = {:.4} ci_high {:.4}; I_2 p = {:.4} ci [{:.4}, {:.4}] censored {:.4}",
            e1.p_hat, e1.ci_high, e2.p_hat, e2.ci_low, e2.ci_high, e2.censored_fraction
        ),
        elapsed,
    );
}

fn criterion_6(rep: &mut Report) {
    let start = Instant::now();
    let p = SimParams::restricted(0.5, 10).unwrap().with_t_max(200.0).with_seed(2026);
    let e = estimate_survival(&p, 10_000, Execution::default()).unwrap();
    let elapsed = start.elapsed();
    rep.record(
        6,
        "lambda = 0.5, N = 10 dies out",
        e.ci_high < 0.02,
        format!("p = {:.4}, ci_high {:.4}", e.p_hat, e.ci_high),
        elapsed,
    );
}

fn criterion_7(rep: &mut Report) {
    let start = Instant::now();
    let m = mean_matrix(r(2), l(0.6), 2.0).unwrap();
    let e = empirical_mean_counts(r(2), l(0.6), 2.0, 0, 100_000, 2027, Execution::default()).unwrap();
    let z: Vec<f64> = (0..3).map(|k| (e.means[k] - m.entries[0][k]).abs() / e.std_errors[k]).collect();
    let elapsed = start.elapsed();
    let pass = z.iter().all(|&z| z <= 3.0) && e.capped == 0 && elapsed < Duration::from_secs(120);
    rep.record(
        7,
        "empirical per-type means match exp(A_2 t) row 0",
        pass,
        format!("means {:?} vs {:?}, z {:?}", rounded(&e.means), rounded(&m.entries[0]), rounded(&z)),
        elapsed,
    );
}

fn criterion_8(rep: &mut Report) {
    let start = Instant::now();
    let want = unrestricted_mean_total(l(0.75), 2.0, 1.0).unwrap();
    let p = SimParams::unrestricted(0.75).unwrap().with_t_max(2.0).with_seed(2028);
    let e = empirical_mean_total(&p, 100_000, Execution::default()).unwrap();
    let z = (e.mean - want).abs() / e.std_error;
    let elapsed = start.elapsed();
    rep.record(
        8,
        "unrestricted mean total at lambda = 0.75, t = 2 equals e",
        z <= 3.0,
        format!("mean {:.5} +- {:.5} vs {want:.5} (z = {z:.2})", e.mean, e.std_error),
        elapsed,
    );
}

fn criterion_9(rep: &mut Report) {
    let start = Instant::now();
    let out = cli(
        &["couple-check", "--pairs", "0.55:0.65", "--n-pairs", "2:4", "--genealogies", "100", "--t-max", "5", "--seed", "9"],
        None,
    );
    let v: Value = serde_json::from_slice(&out).unwrap();
    let all = v["all_dominated"].as_bool().unwrap();
    let violations = v["violations"].as_array().unwrap().len();
    let genealogies = v["genealogies"].as_u64().unwrap();
    let truncated = v["truncated"].as_u64().unwrap();
    let elapsed = start.elapsed();
    rep.record(
        9,
        "pathwise domination under thinning 0.65 -> 0.55 and restriction 4 vs 2",
        all && violations == 0 && genealogies == 100,
        format!(
            "{} comparisons over {} event times, {violations} violations, {truncated} truncated",
            v["comparisons"], v["instants_checked"]
        ),
        elapsed,
    );
}

fn criterion_10(rep: &mut Report) {
    let start = Instant::now();
    let args = ["survival", "--lambda", "0.6", "--n", "2", "--t-max", "50", "--trials", "4000", "--seed", "42"];
    let a = cli(&args, None);
    let b = cli(&args, None);
    let c = cli(&args, Some("1"));
    let d = cli(&args, Some("4"));
    let elapsed = start.elapsed();
    let pass = a == b && b == c && c == d && !a.is_empty();
    rep.record(
        10,
        "survival JSON byte-identical across runs and thread counts",
        pass,
        format!("{} bytes, threads default/1/4", a.len()),
        elapsed,
    );
}

fn rounded(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}

fn main() {
    let mut rep = Report { failures: 0 };
    criterion_1(&mut rep);
    criterion_2(&mut rep);
    criterion_3(&mut rep);
    criterion_4(&mut rep);
    criterion_5(&mut rep);
    criterion_6(&mut rep);
    criterion_7(&mut rep);
    criterion_8(&mut rep);
    criterion_9(&mut rep);
    criterion_10(&mut rep);
    println!("acceptance: {} of 10 criteria passed", 10 - rep.failures);
    if rep.failures > 0 {
        std::process::exit(1);
    }
}
