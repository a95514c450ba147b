use std::path::Path;
use std::process::{Command, Output};

use spinsense::sweep::{fit_rows, run_sweep, SweepSpec};

const CAT_CONFIG: &str = r#"{
    "state": {"kind": "cat", "z": [1.0, 0.0]},
    "noise": {"kind": "gaussian", "gamma": 1.0},
    "n_grid": {"min": 100, "max": 100000, "per_decade": 5},
    "schedule": {"s1": 0.5, "alpha": 0.1},
    "T": 1.0
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinsense"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn sweep_csv_is_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cat.json", CAT_CONFIG);
    let mut outputs = Vec::new();
    for jobs in ["1", "2", "4", "8", "1"] {
        let out = dir.path().join(format!("out_{}.csv", outputs.len()));
        let o = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn fit_on_emitted_csv_matches_in_memory_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cat.json", CAT_CONFIG);
    let csv = dir.path().join("cat.csv");
    let svg = dir.path().join("cat.svg");
    let o = run(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        csv.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));

    let o = run(&["fit", "--in", csv.to_str().unwrap(), "--x", "N", "--y", "delta_omega"]);
    assert!(o.status.success());
    let printed: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();

    let rows = run_sweep(&SweepSpec::from_json(CAT_CONFIG).unwrap(), 1).unwrap();
    let fit = fit_rows(&rows, "N", "delta_omega").unwrap();
    assert_eq!(printed["slope"].as_f64().unwrap().to_bits(), fit.slope.to_bits());
    assert_eq!(printed["intercept"].as_f64().unwrap().to_bits(), fit.intercept.to_bits());
    assert_eq!(printed["n_points"].as_u64().unwrap() as usize, fit.n_points);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"state": {"kind": "cat"}, "surprise": 1}"#);
    let out = dir.path().join("x.csv");
    let o = run(&["sweep", "--config", &bad, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    let o = run(&["sweep", "--config", "/definitely/missing.json", "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(4));

    let cfg = write(dir.path(), "cat.json", CAT_CONFIG);
    let o = run(&["sweep", "--config", &cfg, "--out", "/definitely/missing/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(4));

    let o = run(&["state", "--kind", "cat", "--n", "4", "--z", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["state", "--kind", "nope", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["protocol", "--n", "4", "--z", "1,0", "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(2));

    let short = write(
        dir.path(),
        "short.csv",
        "state,noise,N,t,gamma,omega,chi,z_re,z_im,delta_omega,xi2,var_r,mean_m,status\n\
         cat,gaussian,10,1e-1,1e0,0e0,NaN,1e0,0e0,1e-1,1e0,1e0,1e0,ok\n",
    );
    let o = run(&["fit", "--in", &short]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn state_report() {
    let o = run(&["state", "--kind", "coherent", "--n", "10", "--z", "1,0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["xi2"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["axes"]["m"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let o = run(&["state", "--kind", "tat", "--n", "40", "--chi-opt"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["xi2"].as_f64().unwrap() < 0.5);
}

#[test]
fn protocol_report() {
    let o = run(&["protocol", "--n", "8", "--z", "1,0", "--mode", "ideal", "--omega-t", "0", "--gamma-t", "0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["prep_fidelity"].as_f64().unwrap() > 1.0 - 1e-10);
    assert!((v["p_plus"].as_f64().unwrap() - 0.5).abs() < 1e-10);
}
