//! Command-line plumbing: exit codes, config-file merge, manifests, and
//! output schemas.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_paritytrack")
}

fn temp_dir(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("paritytrack_cli_{}_{label}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn usage_errors_exit_2() {
    let out = Command::new(bin()).args(["simulate", "--mutau", "1e-3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "missing filter/trials");
    let out = Command::new(bin())
        .args(["simulate", "--filter", "bayes", "--mutau", "1e-3", "--trials", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "zero trials");
    let out = Command::new(bin())
        .args(["simulate", "--filter", "nosuch", "--mutau", "1e-3", "--trials", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "unknown filter");
    let out = Command::new(bin()).args(["optimize", "--mutau-grid", "bad"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "bad grid");
}

#[test]
fn infeasible_optimization_exits_3() {
    let dir = temp_dir("infeasible");
    let out = Command::new(bin())
        .args(["optimize", "--filter", "bayes", "--mutau", "0.05", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = temp_dir("config");
    let config_path = dir.join("config.json");
    std::fs::write(
        &config_path,
        r#"{"filter": "boxcar", "mutau": 1e-3, "dt-box": 10.0, "trials": "200", "seed": 5}"#,
    )
    .unwrap();
    let status = Command::new(bin())
        .args(["simulate", "--config"])
        .arg(&config_path)
        .args(["--out-dir"])
        .arg(&dir)
        .args(["--horizon-tau", "120"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.join("simulate_boxcar_mutau1e-3_seed5.csv").exists());
    // CLI flag overrides the config value
    let dir2 = temp_dir("config_override");
    let status = Command::new(bin())
        .args(["simulate", "--config"])
        .arg(&config_path)
        .args(["--filter", "halfbox", "--out-dir"])
        .arg(&dir2)
        .args(["--horizon-tau", "120"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir2.join("simulate_halfbox_mutau1e-3_seed5.csv").exists());
}

#[test]
fn simulate_writes_reproducible_outputs_with_manifest() {
    let dir_a = temp_dir("repro_a");
    let dir_b = temp_dir("repro_b");
    for dir in [&dir_a, &dir_b] {
        let status = Command::new(bin())
            .args([
                "simulate",
                "--filter",
                "double",
                "--mutau",
                "1e-3",
                "--auto-params",
                "--trials",
                "500",
                "--seed",
                "9",
                "--dump-trajectory",
                "--out-dir",
            ])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let base = "simulate_double_mutau1e-3_seed9";
    for name in [format!("{base}.csv"), format!("{base}_fit.json"), format!("{base}_trajectory.csv")] {
        let a = read(&dir_a.join(&name));
        let b = read(&dir_b.join(&name));
        assert_eq!(a, b, "{name} differs between reruns");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&dir_a.join(format!("{base}_manifest.json")))).unwrap();
    assert_eq!(manifest["master_seed"], 9);
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 3);
    assert_eq!(manifest["config"]["params"]["auto"], true);
    assert!(manifest["config"]["params"]["dt_box_over_tau"].as_f64().unwrap() > 1.0);
    // fit JSON carries the contract fields
    let fit: serde_json::Value = serde_json::from_str(&read(&dir_a.join(format!("{base}_fit.json")))).unwrap();
    for key in ["filter", "mutau", "params", "delta_f_in", "gamma_tau", "fit_window", "residual_rms"] {
        assert!(fit.get(key).is_some(), "fit JSON missing {key}");
    }
    // trajectory dump schema
    let dump = read(&dir_a.join(format!("{base}_trajectory.csv")));
    assert!(dump.starts_with("step,t,b1,b2,b3,r12,r23\n"));
}

#[test]
fn sweep_emits_sim_and_theory_sources() {
    let dir = temp_dir("sweep");
    let status = Command::new(bin())
        .args([
            "sweep",
            "--filters",
            "bayes,halfbox",
            "--mutau-grid",
            "5e-4:1e-3:2",
            "--trials",
            "300",
            "--seed",
            "3",
            "--out-dir",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&dir.join("sweep.csv"));
    assert!(csv.starts_with(
        "source,filter,mutau,dt_over_tau,a,delta_f_in,gamma_tau,gamma_tau_stderr,n_trials\n"
    ));
    for needle in ["sim,bayes", "sim,halfbox", "theory_full,halfbox", "theory_crude,bayes"] {
        assert!(csv.contains(needle), "sweep.csv missing {needle}");
    }
}

#[test]
fn figures_emit_expected_files() {
    let dir = temp_dir("figures");
    let status = Command::new(bin())
        .args([
            "figures",
            "--which",
            "fig5b",
            "--mutau-grid",
            "1e-4:1e-3:3",
            "--trials",
            "1",
            "--out-dir",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&dir.join("fig5b.csv"));
    // the projective reference appears as a constant rapid-cycle line
    let projective_rows: Vec<&str> =
        csv.lines().filter(|l| l.contains("projective-ideal")).collect();
    assert_eq!(projective_rows.len(), 3);
    assert!(projective_rows.iter().all(|l| l.ends_with(",4")));

    // fig5a: late-time simulated fidelity orders bayes > halfbox > double >
    // boxcar (larger drops and rates lower the curve)
    let dir5a = temp_dir("fig5a");
    let status = Command::new(bin())
        .args(["figures", "--which", "fig5a", "--trials", "1e4", "--seed", "6", "--out-dir"])
        .arg(&dir5a)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&dir5a.join("fig5a.csv"));
    let mut last_sim: std::collections::HashMap<String, f64> = Default::default();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[0] == "sim" {
            last_sim.insert(f[1].to_string(), f[3].parse().unwrap());
        }
    }
    let get = |name: &str| *last_sim.get(name).unwrap();
    assert!(get("bayes") > get("halfbox"), "bayes {} halfbox {}", get("bayes"), get("halfbox"));
    assert!(get("halfbox") > get("double"), "halfbox {} double {}", get("halfbox"), get("double"));
    assert!(get("double") > get("boxcar"), "double {} boxcar {}", get("double"), get("boxcar"));

    let dir2 = temp_dir("fig2");
    let status = Command::new(bin())
        .args([
            "figures",
            "--which",
            "fig2",
            "--inject-double-flip",
            "--seed",
            "2",
            "--out-dir",
        ])
        .arg(&dir2)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&dir2.join("fig2.csv"));
    let last = csv.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    // injected rapid double flip: truth XIX (5), estimate locked on the
    // complementary encoding IXI (2)
    assert_eq!(fields[2], "5", "true encoding at the end");
    assert_eq!(fields[3], "2", "estimate locked on the complement");
}
