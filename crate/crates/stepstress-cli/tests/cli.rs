//! End-to-end checks of the command-line surface: outputs, exit codes,
//! determinism, and the persisted-sample round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stepstress"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn estimate_solar_json_report() {
    let out = run(&[
        "estimate",
        "--data",
        fixture("solar.csv").to_str().unwrap(),
        "--seed",
        "11",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // config echo is complete enough to rerun
    assert_eq!(doc["config"]["seed"], 11);
    assert_eq!(doc["config"]["n_draws"], 15000);
    assert_eq!(doc["dataset"]["n_star"], 31);
    assert_eq!(doc["dataset"]["censored"], 4);
    let alpha = doc["estimates"]["alpha"].as_f64().unwrap();
    assert!((alpha - 1.44).abs() < 0.15, "alpha = {alpha}");
    // three levels, three kinds, four parameters
    assert_eq!(doc["intervals"]["alpha"].as_array().unwrap().len(), 3);
    assert!(doc["intervals"]["theta2"][1]["hpd"]["upper"].as_f64().unwrap() > 0.0);
    assert_eq!(doc["mle"]["boundary"], false);
}

#[test]
fn estimate_is_deterministic_for_a_seed() {
    let data = fixture("table7_type1.csv");
    let args = [
        "estimate",
        "--data",
        data.to_str().unwrap(),
        "--seed",
        "42",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    // this fixture's weights are concentrated; the degeneracy warning must be on
    let doc: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(doc["ess_warning"], true);
}

#[test]
fn estimate_rejects_malformed_dataset_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "tau1,5\ntimes\n1.0\noops\n").unwrap();
    let out = run(&["estimate", "--data", path.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "stderr: {err}");
}

#[test]
fn missing_dataset_is_an_io_error() {
    let out = run(&["estimate", "--data", "/nonexistent/x.csv", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn degenerate_dataset_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("degenerate.csv");
    // type-I window before the first failure leaves no observations
    std::fs::write(&path, "n,3\ntau1,1\nscheme,type-i\ntau2,0.5\ntimes\n2.0\n2.5\n3.0\n")
        .unwrap();
    let out = run(&["estimate", "--data", path.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gof_solar_reports_both_sources() {
    let out = run(&[
        "gof",
        "--data",
        fixture("solar.csv").to_str().unwrap(),
        "--seed",
        "3",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["source"], "bayes");
    assert_eq!(reports[1]["source"], "mle");
    for r in reports {
        let d = r["statistic"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&d));
        assert_eq!(r["approximate_for_censored"], true);
    }
}

#[test]
fn gof_with_explicit_params_matches_published_fit() {
    let out = run(&[
        "gof",
        "--data",
        fixture("solar.csv").to_str().unwrap(),
        "--params",
        "1.4434,0.1810,1.7921",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let d = doc["reports"][0]["statistic"].as_f64().unwrap();
    let p = doc["reports"][0]["p_value"].as_f64().unwrap();
    assert!((d - 0.2070).abs() < 0.005);
    assert!((p - 0.1212).abs() < 0.02);
}

#[test]
fn simulate_writes_byte_identical_outputs_for_same_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.toml");
    std::fs::write(
        &cfg,
        "reps = 8\nn_draws = 800\n\n[[experiment]]\nalpha = 0.6\ntheta1 = 0.1\ntheta2 = 0.2\ntau1 = 5.0\nn = 10\n",
    )
    .unwrap();
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for (out, base) in [(&out1, "a"), (&out2, "b")] {
        let r = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "99",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{base}: {}", String::from_utf8_lossy(&r.stderr));
    }
    let a = std::fs::read(out1.with_extension("csv")).unwrap();
    let b = std::fs::read(out2.with_extension("csv")).unwrap();
    assert_eq!(a, b);
    let header = String::from_utf8(a).unwrap();
    assert!(header.starts_with("alpha_true,"));
    assert!(header.lines().count() == 2);
}

#[test]
fn simulate_rejects_zero_reps_and_unknown_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.toml");
    std::fs::write(
        &cfg,
        "reps = 0\n[[experiment]]\nalpha = 0.6\ntheta1 = 0.1\ntheta2 = 0.2\ntau1 = 5.0\nn = 10\n",
    )
    .unwrap();
    let out = run(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["simulate", "--preset", "nope", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimize_emits_monotone_grid_curve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("opt.toml");
    std::fs::write(
        &cfg,
        "reps = 30\n\n[[design]]\nalpha = 0.6\ntheta1 = 0.1\ntheta2 = 0.2\nn = 20\ntau_min = 3.0\ntau_max = 5.0\ntau_step = 1.0\n",
    )
    .unwrap();
    let base = dir.path().join("opt");
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(base.with_extension("csv")).unwrap();
    let taus: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(taus.len(), 3);
    assert!(taus.windows(2).all(|w| w[0] < w[1]));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap())
            .unwrap();
    let tau_opt = doc["optima"][0]["tau_opt"].as_f64().unwrap();
    assert!(taus.contains(&tau_opt));
}

#[test]
fn optimize_infeasible_grid_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("opt.toml");
    // reps below the stability floor can never yield a feasible point
    std::fs::write(
        &cfg,
        "reps = 4\n\n[[design]]\nalpha = 0.6\ntheta1 = 0.1\ntheta2 = 0.2\nn = 20\ntau_min = 3.0\ntau_max = 4.0\ntau_step = 1.0\n",
    )
    .unwrap();
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sample_posterior_round_trip_preserves_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("sample.csv");
    let out = run(&[
        "sample-posterior",
        "--data",
        fixture("solar.csv").to_str().unwrap(),
        "--n-draws",
        "5000",
        "--seed",
        "21",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_file).unwrap();
    assert!(text.contains("# seed,21"));
    assert!(text.contains("# data_sha256,"));
    assert!(text.lines().filter(|l| !l.starts_with('#')).count() == 5001);
}

#[test]
fn every_randomized_command_echoes_a_seed_when_omitted() {
    let out = run(&[
        "estimate",
        "--data",
        fixture("table7_type1.csv").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["config"]["seed"].as_u64().is_some());
}
