use std::path::Path;
use std::process::Command;

use bandit_transfer::cli::run;

fn bt(args: &[&str]) -> i32 {
    run(std::iter::once("bt").chain(args.iter().copied()))
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn missing_seed_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let status = Command::new(env!("CARGO_BIN_EXE_bt"))
        .args([
            "qd",
            "--family",
            "bernoulli",
            "--sigma",
            "0.1",
            "--t",
            "20",
            "--alpha-max",
            "1",
            "--samples",
            "5",
        ])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("seed"));
    assert!(!out.exists());
}

#[test]
fn usage_and_validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(bt(&["frobnicate"]), 2);
    assert_eq!(bt(&["qd", "--seed", "1", "--samples", "not-a-number"]), 2);
    assert_eq!(
        bt(&[
            "qd",
            "--seed",
            "1",
            "--out",
            out,
            "--family",
            "poisson",
            "--sigma",
            "0.1",
            "--t",
            "10",
            "--samples",
            "2"
        ]),
        2
    );
    assert_eq!(
        bt(&[
            "qd",
            "--seed",
            "1",
            "--out",
            out,
            "--family",
            "bernoulli",
            "--sigma=-1",
            "--t",
            "10",
            "--samples",
            "2"
        ]),
        2
    );
    assert_eq!(
        bt(&[
            "tune",
            "--seed",
            "1",
            "--out",
            out,
            "--tapes",
            "/nonexistent/logs.csv",
            "--t-offline",
            "10"
        ]),
        2
    );
    assert_eq!(
        bt(&[
            "budget",
            "--seed",
            "1",
            "--out",
            out,
            "--epsilon",
            "2",
            "--delta",
            "0.1",
            "--log-qd",
            "1",
            "--n-arms",
            "2",
            "--t",
            "5"
        ]),
        2
    );
    assert_eq!(
        bt(&[
            "collect", "--seed", "1", "--out", out, "--family", "uniform", "--sigma", "0.1", "--t", "10", "--policy",
            "greedy"
        ]),
        2
    );
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "seed = 9\nfamily = \"bernoulli\"\nsigma = 0.1\nt = 30\nalpha_max = 1.0\nsamples = 12\n",
    )
    .unwrap();
    let out = dir.path().join("qd");
    let code = bt(&[
        "--config",
        cfg.to_str().unwrap(),
        "qd",
        "--sigma",
        "0.4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "qd");
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["config"]["sigma"], 0.4);
    assert_eq!(manifest["config"]["samples"], 12);
    assert_eq!(manifest["outputs"], serde_json::json!(["qd.json"]));
    assert_eq!(read_json(&out.join("qd.json"))["n_samples"], 12);

    std::fs::write(&cfg, "seed = 9\nsmaples = 12\n").unwrap();
    assert_eq!(bt(&["--config", cfg.to_str().unwrap(), "qd"]), 2);
}

#[test]
fn tuning_from_collected_logs() {
    let dir = tempfile::tempdir().unwrap();
    let logs = dir.path().join("logs");
    let common = ["--seed", "4", "--family", "bernoulli", "--sigma", "0.2"];
    let mut args = vec![
        "collect",
        "--out",
        logs.to_str().unwrap(),
        "--t",
        "25",
        "--alpha-max",
        "1",
        "--n-tasks",
        "4",
    ];
    args.extend(common);
    assert_eq!(bt(&args), 0);
    let tapes = logs.join("tapes.csv");
    let tuned = dir.path().join("tuned");
    let code = bt(&[
        "tune",
        "--seed",
        "4",
        "--tapes",
        tapes.to_str().unwrap(),
        "--t-offline",
        "25",
        "--alpha-max",
        "1",
        "--out",
        tuned.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let result = read_json(&tuned.join("tuner.json"));
    assert_eq!(result["per_task_pieces"].as_array().unwrap().len(), 4);
    let alpha = result["param"]["alpha"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&alpha));
}

#[test]
fn worker_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(workers);
        let code = bt(&[
            "--workers",
            workers,
            "qd",
            "--seed",
            "2",
            "--family",
            "gaussian",
            "--sigma",
            "0.3",
            "--t",
            "30",
            "--alpha-max",
            "1",
            "--samples",
            "40",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        files.push(std::fs::read(out.join("qd.json")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(bt(&["--workers", "0", "budget", "--seed", "1"]), 2);
}
