//! End-to-end runs of the `multichain` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use multichain::cli::{EVENT_COLUMNS, SPECTRUM_COLUMNS, STEADY_COLUMNS};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multichain"))
        .args(args)
        .env("MULTICHAIN_THREADS", "2")
        .output()
        .expect("spawn binary")
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'), "{} has CR line endings", path.display());
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

const ZETA_SWEEP: &str = r#"{
  "configuration": "ho_st",
  "sweep": {"axes": [{"param": "zeta", "min": -1.0, "max": 1.0, "steps": 201}]}
}"#;

#[test]
fn spectrum_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), ZETA_SWEEP);
    let out = dir.path().join("out");
    let o = run(&["spectrum", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let (header, rows) = read_csv(&out.join("spectrum.csv"));
    assert_eq!(header, SPECTRUM_COLUMNS);
    // 2x8 sites + cavity + vacuum level, 201 grid points.
    assert_eq!(rows.len(), 18 * 201);
    let branch = col(&header, "branch");
    let first: Vec<i64> = rows[..18].iter().map(|r| r[branch].parse().unwrap()).collect();
    assert_eq!(first, (-1..17).collect::<Vec<_>>());
    for r in &rows {
        assert_eq!(r[0], "zeta");
        let w: f64 = r[col(&header, "photon_weight")].parse().unwrap();
        let s: f64 = r[col(&header, "entropy_bits")].parse().unwrap();
        assert!((-1e-12..=1.0 + 1e-12).contains(&w));
        assert!((-1e-12..=1.0 + 1e-12).contains(&s));
        // Fixed-width scientific format with 17 significant digits.
        assert!(r[1].contains('e') && r[1].split('e').next().unwrap().len() >= 18);
    }

    let (header, events) = read_csv(&out.join("events.csv"));
    assert_eq!(header, EVENT_COLUMNS);
    assert!(!events.is_empty());
    for e in &events {
        assert!(e[0] == "CROSSING" || e[0] == "ANTICROSSING");
        let x: f64 = e[1].parse().unwrap();
        assert!((-1.0..=1.0).contains(&x));
    }

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "spectrum");
    assert_eq!(manifest["outputs"], serde_json::json!(["spectrum.csv", "events.csv"]));
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(manifest["config"]["configuration"], "ho_st");
}

#[test]
fn runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), ZETA_SWEEP);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["spectrum", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_multichain"))
        .args(["--threads", "1", "spectrum", "--config", &cfg, "--out", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    for f in ["spectrum.csv", "events.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn steady_sweep_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
  "configuration": "he_tt", "N": 6,
  "sweep": {"axes": [
    {"param": "L", "values": [2, 3]},
    {"param": "zeta", "min": -0.5, "max": 0.5, "steps": 3}
  ]}
}"#,
    );
    let out = dir.path().join("out");
    let o = run(&["steady", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out.join("steady.csv"));
    assert_eq!(header, STEADY_COLUMNS);
    assert_eq!(rows.len(), 6);
    let (l, zeta, status) = (col(&header, "L"), col(&header, "zeta"), col(&header, "status"));
    let seen: Vec<(String, f64)> = rows.iter().map(|r| (r[l].clone(), r[zeta].parse().unwrap())).collect();
    assert_eq!(
        seen,
        [("2", -0.5), ("2", 0.0), ("2", 0.5), ("3", -0.5), ("3", 0.0), ("3", 0.5)]
            .map(|(a, b)| (a.to_string(), b))
    );
    for r in &rows {
        assert_eq!(r[status], "ok");
        assert_eq!(r[0], "he_tt");
        let get = |name: &str| r[col(&header, name)].parse::<f64>().unwrap();
        assert!(get("flux_residual") < 1e-10);
        assert!((get("eta") - get("I_o") / get("I_i")).abs() < 1e-14);
        assert!((get("I_o") - get("gamma_R") * get("p_N")).abs() < 1e-15);
    }
}

#[test]
fn single_point_without_cavity() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"L": 1, "N": 1, "cavity": false, "Delta_eV": 0.0, "xi_T_eV": 0.1}"#,
    );
    let out = dir.path().join("out");
    assert!(run(&["steady", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let (header, rows) = read_csv(&out.join("steady.csv"));
    assert_eq!(rows.len(), 1);
    let get = |name: &str| rows[0][col(&header, name)].parse::<f64>().unwrap();
    let p = 0.01 / (0.11f64.powi(2) / 4.0 + 0.02);
    assert!((get("p_11") - p).abs() < 1e-12);
    assert!((get("eta") - 0.1 / 0.11).abs() < 1e-12);
    assert_eq!(get("p_c"), 0.0);
}

#[test]
fn rejects_bad_configs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    for bad in [
        r#"{"configuration": "ho_st", "zeta": 0.1}"#,
        r#"{"OmegaR_eV": 1.0, "g_eV": 0.1}"#,
        r#"{"configuration": "ring"}"#,
        r#"{"N": 0}"#,
        r#"{"sweep": {"axes": [{"param": "L", "min": 1, "max": 4, "steps": 4}]}}"#,
    ] {
        let cfg = write_config(dir.path(), bad);
        let o = run(&["steady", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "accepted {bad}");
        assert!(!o.stderr.is_empty());
    }
    assert!(!out.join("steady.csv").exists());
}

#[test]
fn verify_reports_checks() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), r#"{"L": 2, "N": 3, "configuration": "hohe_tt"}"#);
    let o = run(&["verify", "--config", &cfg, "--t-final", "2000"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert_eq!(lines.len(), 8, "{text}");
    assert!(lines.iter().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn kappa_per_chain_changes_losses() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), r#"{"L": 3, "N": 4}"#);
    let once = dir.path().join("once");
    let per = dir.path().join("per");
    assert!(run(&["steady", "--config", &cfg, "--out", once.to_str().unwrap()]).status.success());
    assert!(run(&["--kappa-per-chain", "steady", "--config", &cfg, "--out", per.to_str().unwrap()])
        .status
        .success());
    let eta = |d: &Path| {
        let (h, rows) = read_csv(&d.join("steady.csv"));
        rows[0][col(&h, "eta")].parse::<f64>().unwrap()
    };
    assert!(eta(&once) != eta(&per));
    let manifest = fs::read_to_string(per.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"kappa_per_chain\": true"));
}
