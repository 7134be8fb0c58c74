use std::process::{Command, Output};

use serde_json::Value;

fn busyloss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_busyloss"))
        .args(args)
        .env_remove("BUSYLOSS_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analytic_mm21() {
    let v = json(&busyloss(&["analytic", "--lambda", "2", "--mu", "1", "--m", "2", "--n", "1"]));
    assert_eq!(v["expected_losses"], 2.0);
    assert_eq!(v["expected_busy_period"], 3.0);
    assert_eq!(v["expected_orbital_busy_period"], 1.0);
    assert_eq!(v["expected_orbital_count"], 2.0);
    assert_eq!(v["expected_level_crossings"], serde_json::json!([1.0, 2.0, 2.0, 2.0]));
    assert_eq!(v["expected_state_times"], serde_json::json!([0.5, 1.0, 1.0, 1.0]));
}

#[test]
fn analytic_rounds_to_twelve_digits() {
    let v = json(&busyloss(&["analytic", "--lambda", "1", "--mu", "3", "--m", "1", "--n", "0"]));
    assert_eq!(v["expected_busy_period"], 0.333333333333);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(busyloss(&["analytic", "--lambda", "2", "--m", "0", "--n", "1"]).status.code(), Some(2));
    assert_eq!(busyloss(&["analytic", "--lambda", "x", "--m", "1", "--n", "1"]).status.code(), Some(2));
    assert_eq!(busyloss(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        busyloss(&["simulate", "--config", "/nonexistent/config.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn oracle_examples() {
    let v = json(&busyloss(&["oracle", "--lambda", "2", "--service", "exp:1", "--m", "2", "--n", "1"]));
    assert_eq!(v["expected_losses"], 2.0);
    assert_eq!(v["expected_busy_period"], 3.0);
    assert_eq!(v["state_count"], 3);
    let v = json(&busyloss(&["oracle", "--lambda", "1", "--service", "exp:1", "--m", "1", "--n", "0"]));
    assert_eq!(v["loss_probability"], 0.5);
    let v = json(&busyloss(&[
        "oracle", "--lambda", "2", "--service", "hyperexp:0.9:1.8:0.2", "--m", "2", "--n", "1",
    ]));
    assert_eq!(v["state_count"], 8);
    assert_eq!(v["full_chain_state_count"], 9);
    assert_eq!(v["expected_losses"], 1.93218648716);
}

#[test]
fn oracle_rejects_deterministic() {
    let out = busyloss(&["oracle", "--lambda", "1", "--service", "det:1.0", "--m", "1", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not representable"));
}

#[test]
fn oracle_capacity_exit_3() {
    let out = busyloss(&[
        "oracle", "--lambda", "4", "--service", "erlang:5:5", "--m", "4", "--n", "2", "--max-states", "50",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

const SIM: &[&str] = &["simulate", "--service", "exp:1", "--m", "2", "--n", "1", "--reps", "20000"];

#[test]
fn simulate_is_deterministic_across_runs_and_workers() {
    let with = |w: &str| {
        let mut args = SIM.to_vec();
        args.extend(["--seed", "7", "--workers", w]);
        busyloss(&args)
    };
    let a = with("1");
    let b = with("1");
    let c = with("4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn simulate_aggregate_fields() {
    let v = json(&busyloss(SIM));
    assert_eq!(v["master_seed"], 42);
    let p = &v["points"][0];
    assert_eq!(p["system"], "M/M/2/1");
    assert_eq!(p["replications"], 20000);
    for key in [
        "losses",
        "duration",
        "time_in_state_m_minus_1",
        "orbital_losses_per_orbital_period",
    ] {
        let e = &p[key];
        let mean = e["mean"].as_f64().unwrap();
        let hw = e["half_width"].as_f64().unwrap();
        assert!(mean.is_finite() && hw > 0.0, "{key}: {e}");
    }
    let losses = p["losses"]["mean"].as_f64().unwrap();
    assert!((losses - 2.0).abs() < 0.15, "{losses}");
    assert!(v["losses_consistent_across_n"].is_null());
}

#[test]
fn seed_env_replaces_default_only() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_busyloss"));
        cmd.args(SIM).args(extra).args(["--reps", "200"]);
        match env {
            Some(s) => cmd.env("BUSYLOSS_SEED", s),
            None => cmd.env_remove("BUSYLOSS_SEED"),
        };
        json(&cmd.output().unwrap())
    };
    assert_eq!(run(None, &[])["master_seed"], 42);
    assert_eq!(run(Some("9"), &[])["master_seed"], 9);
    assert_eq!(run(Some("9"), &["--seed", "5"])["master_seed"], 5);
}

#[test]
fn config_file_with_sweep_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("records.csv");
    let cfg = dir.path().join("experiment.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "system": {
                "arrival_rate": 2.0,
                "service": {"type": "det", "value": 1.0},
                "servers": 2,
                "waiting_places": 1
            },
            "replications": 500,
            "master_seed": 11,
            "confidence": 0.95,
            "sweep": [1, 2, 3],
            "outputs": [{"format": "csv", "path": csv}]
        })
        .to_string(),
    )
    .unwrap();
    let v = json(&busyloss(&["simulate", "--config", cfg.to_str().unwrap()]));
    assert_eq!(v["master_seed"], 11);
    assert_eq!(v["confidence"], 0.95);
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    let seeds: Vec<u64> = points.iter().map(|p| p["seed"].as_u64().unwrap()).collect();
    assert!(seeds[0] != seeds[1] && seeds[1] != seeds[2]);
    assert!(v["losses_consistent_across_n"].is_boolean());

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "waiting_places,replication,duration,losses,served,orbital_count,queueing_period_count,\
         orbital_time,f1,f2,f3,f4,f5,f6,b0,b1,b2,b3,b4,b5"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1500);
    // n = 1 rows have capacity 3: f5, f6, b4, b5 are empty.
    assert!(rows[0].starts_with("1,0,"));
    assert!(rows[0].ends_with(",,"));
    assert_eq!(rows[0].split(',').count(), 20);
}

#[test]
fn json_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("agg.json");
    let mut args = SIM.to_vec();
    args.extend(["--reps", "100", "--json", path.to_str().unwrap()]);
    let out = busyloss(&args);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["points"][0]["replications"], 100);
}

#[test]
fn verify_subset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = busyloss(&[
        "verify", "--quick", "--seed", "42", "--only", "1,5,8", "--json", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS   1"));
    assert!(text.contains("3/3 criteria passed"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["criteria"].as_array().unwrap().len(), 3);
    assert_eq!(v["scale"], "quick");
}

#[test]
fn verify_failure_exits_1() {
    // Criterion 3 is false for deterministic service (see README).
    let out = busyloss(&["verify", "--quick", "--seed", "42", "--only", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL   3"));
}

#[test]
fn help_exits_0() {
    let out = busyloss(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["analytic", "simulate", "oracle", "verify"] {
        assert!(text.contains(sub));
    }
}
