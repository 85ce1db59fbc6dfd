use std::fs;
use std::process::{Command, Output};

fn hitemp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitemp"))
        .args(args)
        .env_remove("HITEMP_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn rate_grid_has_eleven_rows() {
    let out = hitemp(&["rate", "--x", "2:0.1:3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,J,phi");
    assert_eq!(lines.len(), 12);
    // J(2) = 0 and the potential at the edge is −1/2.
    assert_eq!(lines[1], "2.0000000000000000e0,0.0000000000000000e0,-5.0000000000000000e-1");
}

#[test]
fn rate_below_the_edge_is_infinite() {
    let text = stdout(&hitemp(&["rate", "--x", "1.5"]));
    assert!(text.lines().nth(1).unwrap().contains(",inf,"), "{text}");
}

#[test]
fn partition_sweep_has_four_rows_per_lemma() {
    let out = hitemp(&["partition", "--schedule", "invlogsq", "--c", "1", "--n", "1e3,1e4,1e5,1e6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "lemma,n,beta,exact,asymptotic,gap");
    for lemma in ["shift", "perturbed"] {
        assert_eq!(text.lines().filter(|l| l.starts_with(&format!("{lemma},"))).count(), 4);
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hitemp(&["sample", "--beta", "1"]).status.code(), Some(2));
    assert_eq!(hitemp(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(hitemp(&["partition", "--schedule", "bogus"]).status.code(), Some(2));
    assert_eq!(hitemp(&["sweep", "--x", "1.5", "--n", "20"]).status.code(), Some(2));
    assert_eq!(hitemp(&["check", "--criteria", "11"]).status.code(), Some(2));
}

#[test]
fn config_file_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"replicas": 10, "no_such_field": 1}"#).unwrap();
    let out = hitemp(&["partition", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&cfg, "not json").unwrap();
    assert_eq!(hitemp(&["partition", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"n_values": [100, 200, 300], "schedule": {"name": "const", "rule": {"form": "constant", "c": 0.5}}}"#).unwrap();
    let path = cfg.to_str().unwrap();
    let from_file = stdout(&hitemp(&["partition", "--config", path]));
    assert_eq!(from_file.lines().count(), 7);
    assert!(from_file.contains("shift,100,5.0000000000000000e-1,"));
    let overridden = stdout(&hitemp(&["partition", "--config", path, "--n", "50"]));
    assert_eq!(overridden.lines().count(), 3);
    assert!(overridden.contains("shift,50,5.0000000000000000e-1,"));
}

#[test]
fn sample_then_eig_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    let out = hitemp(&["sample", "--n", "6", "--beta", "0.5", "--seed", "9", "--out", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let eig = stdout(&hitemp(&["eig", "--matrix", m.to_str().unwrap()]));
    let lambdas: Vec<f64> = eig.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(lambdas.len(), 6);
    assert!(lambdas.windows(2).all(|w| w[0] <= w[1]));
    // Trace of the dumped matrix equals the eigenvalue sum.
    let text = fs::read_to_string(&m).unwrap();
    let trace: f64 = text.lines().nth(1).unwrap().split_whitespace().map(|v| v.parse::<f64>().unwrap()).sum();
    assert!((trace - lambdas.iter().sum::<f64>()).abs() < 1e-8);
}

#[test]
fn manifest_replays_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let first = hitemp(&[
        "sweep", "--schedule", "const", "--c", "0.1", "--n", "40,60", "--x", "2.2,2.4", "--replicas", "500",
        "--seed", "17", "--workers", "1", "--out", &p("a.csv"), "--manifest", &p("run.json"), "--summary", &p("s.json"),
    ]);
    assert!(first.status.code() == Some(0) || first.status.code() == Some(1));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(p("run.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 17);
    assert_eq!(manifest["command"], "sweep");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);

    let replay = hitemp(&["sweep", "--config", &p("run.json"), "--workers", "3", "--out", &p("b.csv")]);
    assert_eq!(replay.status.code(), first.status.code());
    assert_eq!(fs::read(p("a.csv")).unwrap(), fs::read(p("b.csv")).unwrap());
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(p("s.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "sweep");
}

#[test]
fn workers_env_fallback_does_not_change_output() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_hitemp"))
            .args(["tail", "--schedule", "const", "--c", "0.2", "--n", "30", "--replicas", "400", "--t", "2.5,3"])
            .env("HITEMP_WORKERS", workers)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("2"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("n,beta,t,q_hat,stderr,log_bound,pass\n"));
}

#[test]
fn check_runs_selected_criteria() {
    let out = hitemp(&["check", "--criteria", "1,3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.starts_with("[PASS]")));
}
