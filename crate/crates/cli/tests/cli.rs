use std::process::{Command, Output};

use brw_cli::Envelope;
use brw_core::format::round_sig15;
use brw_core::mean::{mean_matrix, MeanMatrix};
use brw_core::sim::{estimate_survival, CouplingReport, SimParams, SurvivalEstimate};
use brw_core::spectral::{critical_lambda, CriticalPoint, DEFAULT_TOL};
use brw_core::{BirthRate, Execution, IntervalRadius};
use serde::de::DeserializeOwned;

fn brw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brw-phase")).args(args).env_remove("BRW_THREADS").output().unwrap()
}

fn parse<T: DeserializeOwned>(args: &[&str]) -> T {
    let out = brw(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let env: Envelope<T> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(env.schema, "brw-phase/1");
    env.body
}

#[test]
fn critical_lambda_round_trips() {
    let got: CriticalPoint = parse(&["critical-lambda", "--n", "7"]);
    let want = critical_lambda(IntervalRadius::new(7).unwrap(), DEFAULT_TOL).unwrap();
    assert_eq!(got.n, want.n);
    assert_eq!(got.method, want.method);
    assert_eq!(got.lambda_c, round_sig15(want.lambda_c));
    assert_eq!(got.residual, round_sig15(want.residual));
}

#[test]
fn mean_matrix_round_trips() {
    let got: MeanMatrix = parse(&["mean", "--n", "3", "--lambda", "0.6", "--t", "2.5"]);
    let want = mean_matrix(IntervalRadius::new(3).unwrap(), BirthRate::new(0.6).unwrap(), 2.5).unwrap();
    assert_eq!(got.entries.len(), want.entries.len());
    for (a, b) in got.entries.iter().flatten().zip(want.entries.iter().flatten()) {
        assert_eq!(*a, round_sig15(*b));
    }
}

#[test]
fn survival_round_trips() {
    let got: SurvivalEstimate =
        parse(&["--seed", "5", "survival", "--lambda", "0.7", "--n", "1", "--t-max", "20", "--trials", "500"]);
    let p = SimParams::restricted(0.7, 1).unwrap().with_t_max(20.0).with_seed(5);
    let want = estimate_survival(&p, 500, Execution::Sequential).unwrap();
    assert_eq!(got.trials, want.trials);
    assert_eq!(got.seed, want.seed);
    assert_eq!(got.p_hat, round_sig15(want.p_hat));
    assert_eq!(got.ci_low, round_sig15(want.ci_low));
    assert_eq!(got.ci_high, round_sig15(want.ci_high));
}

#[test]
fn couple_check_reports_domination() {
    let r: CouplingReport =
        parse(&["--seed", "3", "couple-check", "--pairs", "0.6:0.7", "--n-pairs", "1:3", "--genealogies", "20"]);
    assert!(r.all_dominated);
    assert!(r.violations.is_empty());
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        &["--seed", "11", "simulate", "--lambda", "0.65", "--n", "2", "--t-max", "10"][..],
        &["--seed", "11", "genealogy", "--lambda", "0.6", "--t-max", "3"][..],
        &["phase", "--n-max", "50"][..],
    ] {
        let a = brw(args);
        let b = brw(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| brw(args).status.code();
    assert_eq!(code(&["critical-lambda", "--n", "3"]), Some(0));
    assert_eq!(code(&["critical-lambda", "--n", "0"]), Some(2));
    assert_eq!(code(&["mean", "--n", "2", "--lambda=-1"]), Some(2));
    assert_eq!(code(&["critical-n", "--lambda", "0.5"]), Some(2));
    assert_eq!(code(&["critical-lambda", "--n", "3", "--tol", "1e-30"]), Some(3));
    assert_eq!(code(&["--out", "/nonexistent/dir/x.json", "critical-lambda", "--n", "1"]), Some(1));
    assert_eq!(code(&["survival", "--lambda", "0.6", "--n", "2", "--trials", "10", "--initial", "9:1"]), Some(2));
}

#[test]
fn csv_output_has_header_and_rows() {
    let out = brw(&["--format", "csv", "mean", "--n", "1", "--lambda", "0.5", "--times", "0,1,2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,expected_total");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "0.0,1.0");
}
