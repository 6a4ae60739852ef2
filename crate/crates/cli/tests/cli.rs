use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use robust_forecast::bayes::{bounds_sample, draw_posterior, PosteriorSource};
use robust_forecast::decision::{
    minimax_binary, minimax_classification, minimax_quadratic, minimax_regret_binary,
    mmr_classification, mmr_log, mmr_quadratic,
};
use robust_forecast::linear_model::{extreme_probs_binary, uniform_grid};
use robust_forecast::panel::{
    build_panel_spec, honore_tamer_dgp, honore_tamer_model, ingest_panel_csv, HistoryDistribution,
};
use robust_forecast::{LossSpec, MultinomialBounds};
use serde_json::Value;
use tempfile::TempDir;

fn run_in(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_robust-forecast"));
    cmd.current_dir(dir).arg("--out-dir").arg(dir).args(args);
    cmd.env_remove("ROBUST_FORECAST_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    run_in(dir, args, &[])
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).expect("report written")).expect("valid JSON")
}

/// Report text with the wall-clock line removed.
fn without_clock(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name))
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_clock_seconds\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn write_panel(dir: &Path, name: &str, rows: &[Vec<u8>]) -> String {
    let t = rows[0].len();
    let header: Vec<String> = (1..=t).map(|k| format!("y{k}")).collect();
    let mut text = header.join(",") + "\n";
    for r in rows {
        text += &r.iter().map(u8::to_string).collect::<Vec<_>>().join(",");
        text.push('\n');
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn write_model(dir: &Path, beta_step: f64) -> String {
    let path = dir.join("model.json");
    let json = format!(
        r#"{{"T": 2, "lambda_grid": {{"min": -3, "max": 3, "step": 0.2}}, "link": "probit",
            "beta": {{"min": -5, "max": 5, "step": {beta_step}}}}}"#
    );
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

// --- extreme-probs -------------------------------------------------------

#[test]
fn extreme_probs_reproduces_the_probit_design() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["--seed", "1", "extreme-probs", "--dgp", "honore-tamer", "--T", "2", "--history", "00"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(dir.path(), "extreme_probs.json");
    let h = &r["result"]["histories"][0];
    assert_eq!(h["history"], "00");
    assert!((f(&h["p_lower"]) - 0.2997).abs() < 0.005, "{h}");
    assert!((f(&h["p_upper"]) - 0.6803).abs() < 0.005, "{h}");
    assert_eq!(f(&h["d_mm"]["value"]), 0.0);
    assert_eq!(f(&h["d_mmr"]["value"]), 0.0);
    assert_eq!(f(&h["truth"]), 0.5);
    let iv = &r["result"]["feasible_interval"];
    assert!((f(&iv["lo"]) + 2.4403).abs() < 0.01 && (f(&iv["hi"]) - 1.2428).abs() < 0.01, "{iv}");
    // Six decimals and the header-documented profile table.
    let text = fs::read_to_string(dir.path().join("extreme_probs.json")).unwrap();
    assert!(text.contains("\"p_lower\": 0.299712"), "{text}");
    let profile = fs::read_to_string(dir.path().join("profile_00.csv")).unwrap();
    assert!(profile.starts_with("beta,p_lower,p_upper\n"));
    assert!(profile.lines().count() > 100);
}

#[test]
fn extreme_probs_on_a_uniform_panel_file() {
    let dir = TempDir::new().unwrap();
    let rows = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
    let panel = write_panel(dir.path(), "data.csv", &rows);
    let spec = write_model(dir.path(), 0.05);
    let o = run(dir.path(), &["--seed", "1", "extreme-probs", "--panel", &panel, "--spec", &spec]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(dir.path(), "extreme_probs.json");
    assert_eq!(r["result"]["num_observations"], 4);
    let hs = r["result"]["histories"].as_array().unwrap();
    assert_eq!(hs.len(), 4);
    for h in hs {
        let (lo, hi) = (f(&h["p_lower"]), f(&h["p_upper"]));
        assert!(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= 1.0, "{h}");
        assert!(h.get("truth").is_none());
        assert!(dir.path().join(h["profile_file"].as_str().unwrap()).exists());
    }
}

#[test]
fn extreme_probs_exit_codes() {
    let dir = TempDir::new().unwrap();
    let panel = write_panel(dir.path(), "data.csv", &[vec![0, 1], vec![1, 0]]);
    let missing = dir.path().join("no_such_model.json");
    let o = run(dir.path(), &["extreme-probs", "--panel", &panel, "--spec", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no_such_model.json"), "{}", stderr(&o));

    fs::write(dir.path().join("bad.csv"), "y1,y2\n0,2\n").unwrap();
    let o = run(dir.path(), &["extreme-probs", "--panel", "bad.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.csv"));

    let o = run(dir.path(), &["extreme-probs"]);
    assert_eq!(code(&o), 2, "neither --dgp nor --panel");

    // Every unit follows 0 then 1: no finite heterogeneity reproduces it.
    let sure = write_panel(dir.path(), "sure.csv", &[vec![0, 1], vec![0, 1], vec![0, 1]]);
    let o = run(dir.path(), &["extreme-probs", "--panel", &sure, "--history", "01", "--beta-step", "0.5"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("empty"));
}

// --- forecast ------------------------------------------------------------

fn forecast(dir: &Path, args: &[&str]) -> Value {
    let mut all = vec!["forecast"];
    all.extend_from_slice(args);
    let o = run(dir, &all);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    report(dir, "forecast.json")["result"].clone()
}

#[test]
fn forecast_binary_bounds_of_the_probit_design() {
    let dir = TempDir::new().unwrap();
    let r = forecast(dir.path(), &["--pl", "0.2997", "--pu", "0.6803", "--loss", "binary", "--a01", "1", "--a10", "1"]);
    assert_eq!(f(&r["minimax"]["decision"]["value"]), 0.0);
    assert_eq!(f(&r["minimax_regret"]["decision"]["value"]), 0.0);
    assert_eq!(f(&r["minimax"]["value"]), 0.6803);
    assert!(r.get("theta_optimal").is_none());
}

#[test]
fn forecast_log_loss_with_point_bounds() {
    let dir = TempDir::new().unwrap();
    let r = forecast(dir.path(), &["--pl", "0.3", "--pu", "0.3", "--loss", "log"]);
    for rule in ["theta_optimal", "minimax", "minimax_regret"] {
        assert_eq!(f(&r[rule]["decision"]["value"]), 0.3, "{rule}");
    }
    assert_eq!(f(&r["minimax_regret"]["value"]), 0.0);
}

#[test]
fn forecast_classification_example() {
    let dir = TempDir::new().unwrap();
    let r = forecast(dir.path(), &["--lower", "0.2,0.2,0,0", "--gaps", "0.6,0.6,0.8,0.5", "--loss", "classification"]);
    let mm = &r["minimax"]["decision"];
    assert_eq!(f(&mm["value"]), 0.0);
    assert_eq!(mm["tie"], true);
    assert_eq!(mm["tie_set"], serde_json::json!([0, 1]));
    assert_eq!(f(&r["minimax"]["value"]), 0.8);
    assert_eq!(f(&r["minimax_regret"]["decision"]["value"]), 3.0);
    assert_eq!(f(&r["minimax_regret"]["value"]), 0.5);
}

#[test]
fn forecast_oracle_rule_with_a_point() {
    let dir = TempDir::new().unwrap();
    let r = forecast(dir.path(), &["--pl", "0.2", "--pu", "0.7", "--loss", "quadratic", "--p", "0.4"]);
    assert_eq!(f(&r["theta_optimal"]["decision"]["value"]), 0.4);
    assert_eq!(f(&r["theta_optimal"]["value"]), 0.24);
    assert_eq!(f(&r["minimax"]["decision"]["value"]), 0.5);
    assert_eq!(f(&r["minimax_regret"]["decision"]["value"]), 0.45);
    assert_eq!(f(&r["minimax_regret"]["value"]), 0.0625);
}

#[test]
fn forecast_input_errors() {
    let dir = TempDir::new().unwrap();
    for args in [
        // Three lower probabilities against four gaps.
        vec!["forecast", "--lower", "0.2,0.2,0", "--gaps", "0.6,0.6,0.8,0.5", "--loss", "classification"],
        vec!["forecast", "--pl", "0.7", "--pu", "0.2", "--loss", "binary"],
        vec!["forecast", "--pl", "0.2", "--loss", "binary"],
        vec!["forecast", "--pl", "0.2", "--pu", "0.4", "--loss", "binary", "--a01", "-1"],
        vec!["forecast", "--lower", "0.6,0.6", "--gaps", "0,0", "--loss", "classification"],
        vec!["forecast", "--pl", "0.2", "--pu", "0.4", "--loss", "hinge"],
    ] {
        let o = run(dir.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
    assert!(!dir.path().join("forecast.json").exists());
}

// --- bayes-forecast ------------------------------------------------------

/// Simulated probit panel, written as CSV.
fn simulated_panel(dir: &Path, n: usize) -> String {
    let (dgp, _) = honore_tamer_dgp(2).unwrap();
    write_panel(dir, "sim.csv", &dgp.simulate(2, n, 3).unwrap())
}

#[test]
fn bayes_single_bootstrap_draw_equals_the_oracle_rules() {
    let dir = TempDir::new().unwrap();
    let panel = simulated_panel(dir.path(), 300);
    let args = ["--seed", "7", "bayes-forecast", "--panel", &panel, "--history", "00", "--S", "1", "--source", "bootstrap", "--beta-step", "0.1"];
    let o = run(dir.path(), &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(dir.path(), "bayes_forecast.json")["result"].clone();

    // The same resample and bounds through the library.
    let data = ingest_panel_csv(&panel).unwrap();
    let draws = draw_posterior(&data, 1, 7, PosteriorSource::Bootstrap).unwrap();
    let m = honore_tamer_model(vec![0, 0]);
    let beta = uniform_grid(-5.0, 5.0, 0.1).unwrap();
    let bs = bounds_sample(&draws, |p| {
        extreme_probs_binary(&build_panel_spec(&m, &HistoryDistribution::new(2, p.to_vec())?, beta.clone())?)
    })
    .unwrap();
    let b = bs.bounds[0];
    let p6 = |x: f64| (x * 1e6).round() / 1e6;
    assert_eq!(f(&r["mean_p_lower"]), p6(b.p_lower));
    assert_eq!(f(&r["mean_p_upper"]), p6(b.p_upper));

    let loss = LossSpec::symmetric();
    let mb = MultinomialBounds::from_binary(&b);
    let expected = [
        ("binary_minimax", minimax_binary(&loss, &b).unwrap().0.value()),
        ("binary_minimax_regret", minimax_regret_binary(&loss, &b).unwrap().0.value()),
        ("quadratic_minimax", minimax_quadratic(&b).value()),
        ("quadratic_minimax_regret", mmr_quadratic(&b).0.value()),
        ("log_minimax", minimax_quadratic(&b).value()),
        ("log_minimax_regret", mmr_log(&b).value()),
        ("classification_minimax", minimax_classification(&mb).0.value()),
        ("classification_minimax_regret", mmr_classification(&mb).0.value()),
    ];
    for (rule, want) in expected {
        assert_eq!(f(&r["rules"][rule]["value"]), p6(want), "{rule}");
    }
    assert_eq!(r["skipped"], 0);
}

#[test]
fn bayes_reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    fs::create_dir_all(&a).unwrap();
    fs::create_dir_all(&b).unwrap();
    let args = [
        "--seed", "11", "bayes-forecast", "--dgp", "honore-tamer", "--simulate-n", "500", "--history", "00", "--S", "8", "--beta-step", "0.2",
    ];
    for d in [&a, &b] {
        let o = run(d, &args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    assert_eq!(without_clock(&a, "bayes_forecast.json"), without_clock(&b, "bayes_forecast.json"));
    let r = report(&a, "bayes_forecast.json");
    assert_eq!(r["seed"], 11);
    assert_eq!(r["result"]["num_observations"], 500);
    assert_eq!(r["result"]["draws"], 8);
    assert!(r["result"]["skipped_fraction"].is_number());
}

#[test]
fn bayes_exit_codes() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("empty.csv"), "y1,y2\n").unwrap();
    let o = run(dir.path(), &["bayes-forecast", "--panel", "empty.csv", "--history", "00"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("empty.csv"));

    let o = run(dir.path(), &["bayes-forecast", "--dgp", "honore-tamer", "--history", "00"]);
    assert_eq!(code(&o), 2, "population design has no counts");

    let panel = simulated_panel(dir.path(), 50);
    let o = run(dir.path(), &["bayes-forecast", "--panel", &panel, "--history", "00", "--source", "dirichlet-custom"]);
    assert_eq!(code(&o), 2, "custom prior without --alpha");

    // Every resample of this panel is the same degenerate distribution.
    let sure = write_panel(dir.path(), "sure.csv", &[vec![0, 1], vec![0, 1]]);
    let o = run(dir.path(), &["bayes-forecast", "--panel", &sure, "--history", "01", "--S", "2", "--source", "bootstrap", "--beta-step", "0.5"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

// --- limit-experiment ----------------------------------------------------

#[test]
fn limit_experiment_default_ratios_and_files() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["--seed", "4", "limit-experiment", "--h0-max", "8", "--step", "0.01"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(dir.path(), "limit_experiment.json");
    assert_eq!(f(&r["config"]["h0_max"]), 8.0);
    assert_eq!(f(&r["config"]["step"]), 0.01);
    assert_eq!(r["result"]["grid_points"], 1601);
    let ratios = r["result"]["ratios"].as_array().unwrap();
    assert_eq!(ratios.len(), 24);
    let row = ratios
        .iter()
        .find(|x| x["criterion"] == "risk" && x["rule"] == "plugin" && x["baseline"] == "bayes_mm")
        .unwrap();
    // The efficient rule's integrated excess risk is about a sixth below the
    // plug-in's, i.e. the plug-in's is about 20% above.
    let pct = f(&row["integrated_pct"]);
    assert!((pct - 20.3).abs() < 0.5, "{row}");
    assert!((100.0 * (1.0 - 1.0 / (1.0 + pct / 100.0)) - 16.9).abs() < 0.5);

    let risk = fs::read_to_string(dir.path().join("risk_curves.csv")).unwrap();
    let mut lines = risk.lines();
    assert_eq!(lines.next(), Some("h0,bayes_mm,plugin,bayes_mmr,posterior_mean_plugin"));
    assert_eq!(lines.count(), 1601);
    assert!(dir.path().join("regret_curves.csv").exists());
}

#[test]
fn limit_experiment_monte_carlo_check() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["--seed", "1", "limit-experiment", "--rules", "plugin", "--mc-check", "1e5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(dir.path(), "limit_experiment.json");
    assert_eq!(r["config"]["mc_check"], 100_000);
    let rows = r["result"]["mc_check"].as_array().unwrap();
    assert_eq!(rows.len(), 14);
    for row in rows {
        assert_eq!(row["within_3se"], true, "{row}");
        assert!(f(&row["z"]).abs() <= 3.0);
    }
    assert_eq!(r["warnings"], serde_json::json!([]));
}

#[test]
fn limit_experiment_is_byte_identical_apart_from_the_clock() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        fs::create_dir_all(d).unwrap();
        let o = run(d, &["--seed", "9", "limit-experiment", "--h0-max", "4", "--step", "0.05", "--mc-check", "2000"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    assert_eq!(without_clock(&a, "limit_experiment.json"), without_clock(&b, "limit_experiment.json"));
    for csv in ["risk_curves.csv", "regret_curves.csv"] {
        assert_eq!(fs::read(a.join(csv)).unwrap(), fs::read(b.join(csv)).unwrap());
    }
}

#[test]
fn limit_experiment_input_errors() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["limit-experiment", "--rules", "oracle"],
        vec!["limit-experiment", "--h0-max", "1", "--step", "0.3"],
        vec!["limit-experiment", "--h0-max", "-1"],
        vec!["limit-experiment", "--mc-check", "0.5"],
    ] {
        let o = run(dir.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

// --- kl-bounds -----------------------------------------------------------

#[test]
fn kl_bounds_symmetric_index_model() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("kl.json"),
        r#"{"reference": {"kind": "normal", "mean": 0.0, "sd": 1.0}, "delta": 0.1,
            "expectation": {"gauss-hermite": 60}, "family": {"kind": "index", "link": "probit"}}"#,
    )
    .unwrap();
    let o = run(dir.path(), &["--seed", "2", "kl-bounds", "--spec", "kl.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(dir.path(), "kl_bounds.json")["result"].clone();
    let (up, lo) = (f(&r["upper"]["value"]), f(&r["lower"]["value"]));
    assert!(up > 0.5 && up < 1.0);
    assert!((up + lo - 1.0).abs() < 2e-6, "{up} {lo}");
    // Both regret gaps are 2 p_U - 1 by symmetry.
    for g in r["regret_gaps"].as_array().unwrap() {
        assert!((f(g) - (2.0 * up - 1.0)).abs() < 2e-6);
    }
    assert_eq!(r["d_mm"]["tie"], true);

    // A zero radius pins the bound at the reference mean.
    let o = run(dir.path(), &["--seed", "2", "kl-bounds", "--spec", "kl.json", "--delta", "0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(dir.path(), "kl_bounds.json")["result"].clone();
    assert!((f(&r["upper"]["value"]) - 0.5).abs() < 1e-6);
    assert!((f(&r["lower"]["value"]) - 0.5).abs() < 1e-6);
}

#[test]
fn kl_bounds_exit_codes() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["kl-bounds", "--spec", "absent.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("absent.json"));

    fs::write(dir.path().join("bad.json"), r#"{"reference": {"kind": "normal", "mean": 0, "sd": -1}, "delta": 0.1, "family": {"kind": "index"}}"#).unwrap();
    let o = run(dir.path(), &["kl-bounds", "--spec", "bad.json"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));

    // History probabilities far from anything the reference can produce
    // under a tiny radius: the identified set is empty.
    fs::write(
        dir.path().join("far.json"),
        r#"{"reference": {"kind": "normal", "mean": 0.0, "sd": 1.0}, "delta": 0.001, "sample_size": 2000,
            "family": {"kind": "panel", "beta": {"min": 0, "max": 0.4, "step": 0.2},
                       "model": {"t": 2, "y0": 0, "link": "probit", "last_outcome": 1,
                                 "history_probs": [0.9, 0.05, 0.03, 0.02]}}}"#,
    )
    .unwrap();
    let o = run(dir.path(), &["kl-bounds", "--spec", "far.json"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

// --- shared behaviour ----------------------------------------------------

#[test]
fn seed_is_generated_and_echoed_when_absent() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["limit-experiment", "--h0-max", "1", "--step", "0.1", "--mc-check", "1000"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = report(dir.path(), "limit_experiment.json");
    let seed = first["seed"].as_u64().expect("seed recorded");
    let o = run(dir.path(), &["--seed", &seed.to_string(), "limit-experiment", "--h0-max", "1", "--step", "0.1", "--mc-check", "1000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(dir.path(), "limit_experiment.json")["result"], first["result"]);
}

#[test]
fn report_is_echoed_to_stdout_with_version_and_config() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["--seed", "5", "forecast", "--pl", "0.2", "--pu", "0.4", "--loss", "binary"]);
    assert_eq!(code(&o), 0);
    let echoed: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(echoed, report(dir.path(), "forecast.json"));
    assert_eq!(echoed["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(echoed["command"], "forecast");
    assert_eq!(f(&echoed["config"]["pl"]), 0.2);
    assert_eq!(echoed["seed"], 5);
    assert!(f(&echoed["wall_clock_seconds"]) >= 0.0);
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    fs::create_dir_all(&a).unwrap();
    fs::create_dir_all(&b).unwrap();
    let args = ["--seed", "3", "limit-experiment", "--h0-max", "2", "--step", "0.1", "--mc-check", "3000"];
    assert_eq!(code(&run_in(&a, &args, &[("ROBUST_FORECAST_THREADS", "1")])), 0);
    assert_eq!(code(&run_in(&b, &args, &[("ROBUST_FORECAST_THREADS", "3")])), 0);
    assert_eq!(without_clock(&a, "limit_experiment.json"), without_clock(&b, "limit_experiment.json"));
    for bad in ["0", "many"] {
        let o = run_in(dir.path(), &args, &[("ROBUST_FORECAST_THREADS", bad)]);
        assert_eq!(code(&o), 2, "{bad}");
        assert!(stderr(&o).contains("ROBUST_FORECAST_THREADS"));
    }
}
