//! End-to-end runs of the `moyal-phase` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moyal-phase"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Column `col` of every data line.
fn values(p: &Path, col: usize) -> Vec<f64> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

fn gaussian(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut args = vec!["state", "gaussian", "--out", s(&out)];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

#[test]
fn gaussian_file_has_header_and_one_row_per_point() {
    let dir = TempDir::new().unwrap();
    let out = gaussian(&dir, "psi.csv", &["--x0", "0", "--p0", "0", "--a", "1", "--grid", "256:-10:10"]);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 257);
    assert_eq!(text.lines().next(), Some("# moyal-phase wavefunction v1"));
}

#[test]
fn negative_fock_level_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let o = run(&["state", "fock", "--n", "-1", "--out", s(&path(&dir, "f.csv"))]);
    assert_eq!(code(&o), 2);
    let msg = stderr(&o);
    assert!(msg.contains("`n`"), "{msg}");
    assert_eq!(msg.trim().lines().count(), 1);
}

#[test]
fn bad_grid_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let o = run(&["state", "gaussian", "--grid", "100:-10:10", "--out", s(&path(&dir, "g.csv"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn cat_state_wigner_has_negative_fringes() {
    let dir = TempDir::new().unwrap();
    let cat = path(&dir, "cat.csv");
    assert_eq!(code(&run(&["state", "cat", "--sep", "6", "--out", s(&cat)])), 0);
    let w = path(&dir, "w.csv");
    assert_eq!(code(&run(&["transform", "wigner", "--input", s(&cat), "--out", s(&w)])), 0);
    let min = values(&w, 2).into_iter().fold(f64::INFINITY, f64::min);
    assert!(min < 0.0, "{min}");
}

#[test]
fn gaussian_wigner_peak_is_one_over_pi() {
    let dir = TempDir::new().unwrap();
    let psi = gaussian(&dir, "psi.csv", &[]);
    let w = path(&dir, "w.csv");
    assert_eq!(code(&run(&["transform", "wigner", "--input", s(&psi), "--out", s(&w)])), 0);
    let text = fs::read_to_string(&w).unwrap();
    assert_eq!(text.lines().next(), Some("# moyal-phase wigner v1"));
    let origin = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .find(|r| r[0] == 0.0 && r[1] == 0.0)
        .expect("grid contains the origin");
    assert!((origin[2] - 0.31831).abs() < 1e-5);
    assert!((origin[2] - std::f64::consts::FRAC_1_PI).abs() < 1e-6);
}

#[test]
fn transforms_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let psi = gaussian(&dir, "psi.csv", &["--x0", "1", "--p0", "-0.5", "--grid", "64:-8:8"]);
    for which in ["wigner", "characteristic", "density", "marginal"] {
        let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
        for out in [&a, &b] {
            let o = run(&["transform", which, "--input", s(&psi), "--out", s(out)]);
            assert_eq!(code(&o), 0, "{which}: {}", stderr(&o));
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{which}");
        let header = fs::read_to_string(&a).unwrap().lines().next().unwrap().to_string();
        assert_eq!(header, format!("# moyal-phase {which} v1"));
    }
}

#[test]
fn density_input_transforms_like_the_wavefunction() {
    let dir = TempDir::new().unwrap();
    let psi = gaussian(&dir, "psi.csv", &["--x0", "1", "--grid", "64:-8:8"]);
    let rho = path(&dir, "rho.csv");
    assert_eq!(code(&run(&["transform", "density", "--input", s(&psi), "--out", s(&rho)])), 0);
    let (w1, w2) = (path(&dir, "w1.csv"), path(&dir, "w2.csv"));
    assert_eq!(code(&run(&["transform", "wigner", "--input", s(&psi), "--out", s(&w1)])), 0);
    assert_eq!(code(&run(&["transform", "wigner", "--input", s(&rho), "--out", s(&w2)])), 0);
    for (a, b) in values(&w1, 2).iter().zip(values(&w2, 2)) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn malformed_inputs_exit_3() {
    let dir = TempDir::new().unwrap();
    let empty = path(&dir, "empty.csv");
    fs::write(&empty, "").unwrap();
    let o = run(&["transform", "wigner", "--input", s(&empty), "--out", s(&path(&dir, "x.csv"))]);
    assert_eq!(code(&o), 3);

    let future = path(&dir, "v9.csv");
    fs::write(&future, "# moyal-phase wavefunction v9\n0,1,0\n").unwrap();
    assert_eq!(code(&run(&["transform", "wigner", "--input", s(&future), "--out", s(&path(&dir, "x.csv"))])), 3);

    let broken = path(&dir, "broken.csv");
    fs::write(&broken, "# moyal-phase wavefunction v1\n0,0,0\n0.1,zero,0\n").unwrap();
    let o = run(&["transform", "density", "--input", s(&broken), "--out", s(&path(&dir, "x.csv"))]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn zero_steps_reproduce_the_input() {
    let dir = TempDir::new().unwrap();
    let psi = gaussian(&dir, "psi.csv", &["--x0", "1", "--grid", "64:-8:8"]);
    let rho = path(&dir, "rho.csv");
    let w = path(&dir, "w.csv");
    assert_eq!(code(&run(&["transform", "density", "--input", s(&psi), "--out", s(&rho)])), 0);
    assert_eq!(code(&run(&["transform", "wigner", "--input", s(&psi), "--out", s(&w)])), 0);
    for (input, method) in [(&psi, "schrodinger_oracle"), (&rho, "density_liouville"), (&w, "moyal")] {
        let out = path(&dir, "out.csv");
        let o = run(&[
            "evolve", "--input", s(input), "--potential", "harmonic", "--method", method, "--dt", "1e-3", "--steps",
            "0", "--out", s(&out),
        ]);
        assert_eq!(code(&o), 0, "{method}: {}", stderr(&o));
        assert_eq!(fs::read(&out).unwrap(), fs::read(input).unwrap(), "{method}");
    }
}

#[test]
fn compare_report_meets_the_benchmark() {
    let dir = TempDir::new().unwrap();
    let psi = gaussian(&dir, "psi.csv", &["--x0", "2", "--grid", "128:-10:10"]);
    let out = path(&dir, "final.csv");
    let o = run(&[
        "evolve", "--input", s(&psi), "--potential", "harmonic", "--omega", "1", "--dt", "1e-3", "--time",
        "1.5707963267948966", "--out", s(&out), "--compare",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(path(&dir, "final.compare.json")).unwrap()).unwrap();
    let pairs = report["pairs"].as_object().unwrap();
    assert_eq!(pairs.len(), 3);
    for (name, p) in pairs {
        assert!(p["linf"].as_f64().unwrap() < 1e-5, "{name}");
        assert!(p["l2"].as_f64().is_some());
    }
    assert!((report["config"]["t_final"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn oversized_step_exits_4_with_step_index() {
    let dir = TempDir::new().unwrap();
    let psi = gaussian(&dir, "psi.csv", &[]);
    let o = run(&[
        "evolve", "--input", s(&psi), "--potential", "quartic", "--dt", "0.5", "--steps", "10", "--out",
        s(&path(&dir, "q.csv")),
    ]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("step at index 0"), "{}", stderr(&o));
}

#[test]
fn tabulated_potential_matches_harmonic() {
    let dir = TempDir::new().unwrap();
    let psi = gaussian(&dir, "psi.csv", &["--x0", "1", "--grid", "64:-8:8"]);
    let table = path(&dir, "v.txt");
    let text: String = (0..64)
        .map(|i| {
            let x = -8.0 + i as f64 * 0.25;
            format!("{}\n", 0.5 * x * x)
        })
        .collect();
    fs::write(&table, text).unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    let common = ["evolve", "--input", s(&psi), "--method", "schrodinger_oracle", "--dt", "1e-2", "--steps", "50"];
    let mut args = common.to_vec();
    args.extend(["--potential", "harmonic", "--out", s(&a)]);
    assert_eq!(code(&run(&args)), 0);
    let mut args = common.to_vec();
    args.extend(["--potential", "tabulated", "--table", s(&table), "--out", s(&b)]);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for (u, v) in values(&a, 1).iter().zip(values(&b, 1)) {
        assert!((u - v).abs() < 1e-12);
    }
}

#[test]
fn small_dimension_weyl_suite_fails_with_report() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "w2.json");
    let o = run(&["verify", "weyl", "--dim", "2", "--out", s(&out)]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let rel = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "weyl_relation")
        .unwrap();
    assert_eq!(rel["pass"], false);
    assert!(rel["residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn bridge_suite_has_405_records() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "b.json");
    let o = bin()
        .args(["verify", "bridge", "--out", s(&out)])
        .env("SOURCE_DATE_EPOCH", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["version"], 1);
    assert_eq!(report["timestamp"], "1970-01-01T00:00:00Z");
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 405);
    let worst = checks.iter().map(|c| c["residual"].as_f64().unwrap()).fold(0.0, f64::max);
    assert!(worst < 1e-8);
    for c in checks {
        for key in ["name", "paper_eq", "residual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn tolerance_overrides_reach_the_report() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "b.json");
    let o = run(&["verify", "bridge", "--out", s(&out), "--tol", "bridge=1e-30", "--timestamp", "fixed"]);
    assert_eq!(code(&o), 5);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["timestamp"], "fixed");
    let tol = report["config"]["tolerances"]["bridge"].as_f64().unwrap();
    assert!((tol / 1e-30 - 1.0).abs() < 1e-12);

    let o = run(&["verify", "bridge", "--out", s(&out), "--tol", "nonsense=1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn help_lists_commands_and_flags() {
    let o = run(&["--help"]);
    let text = String::from_utf8_lossy(&o.stdout);
    for cmd in ["state", "transform", "evolve", "verify"] {
        assert!(text.contains(cmd), "{cmd}");
    }
    let o = run(&["evolve", "--help"]);
    let text = String::from_utf8_lossy(&o.stdout);
    for flag in ["--input", "--potential", "--method", "--dt", "--steps", "--time", "--out", "--compare"] {
        assert!(text.contains(flag), "{flag}");
    }
}
