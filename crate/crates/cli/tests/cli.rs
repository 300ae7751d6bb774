use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use supertime::kvn::KvNWave;
use supertime_cli::RunConfig;
use tempfile::TempDir;

fn supertime(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supertime"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Vec<Value> {
    let text = std::fs::read_to_string(dir.join("report.json")).expect("report written");
    let v: Value = serde_json::from_str(&text).expect("valid json");
    v["rows"].as_array().expect("rows").clone()
}

fn row<'a>(rows: &'a [Value], id: &str) -> &'a Value {
    rows.iter().find(|r| r["id"] == id).unwrap_or_else(|| panic!("no row {id}"))
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn identities_pass_by_default() {
    let dir = TempDir::new().unwrap();
    let out = supertime(&["identities"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rows = report(dir.path());
    assert!(rows.len() >= 11);
    assert!(rows.iter().all(|r| r["status"] == "pass"));
}

#[test]
fn quartic_hamiltonian_gives_the_same_pass_set() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    supertime(&["identities"], a.path());
    let out = supertime(&["identities", "--hamiltonian", "q1*p1^3"], b.path());
    assert_eq!(out.status.code(), Some(0));
    let status = |rows: Vec<Value>| -> Vec<(String, String)> {
        rows.iter().map(|r| (r["id"].to_string(), r["status"].to_string())).collect()
    };
    assert_eq!(status(report(a.path())), status(report(b.path())));
}

#[test]
fn malformed_hamiltonian_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = supertime(&["identities", "--hamiltonian", "q1*+"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q1*+"));
    let out = supertime(&["identities", "--hamiltonian", "x1^2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_exits_2() {
    let dir = TempDir::new().unwrap();
    for text in ["[dynamics]\ndt = 0.0\n", "[kvn]\ndt = -1e-3\n", "[kvn]\ngrid = 100\n", "[pathint]\nladder = [8, 12]\n", "[system]\ncolour = 1\n"] {
        let cfg = write_config(&dir, text);
        let out = supertime(&["dynamics", "--config", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    let out = supertime(&["coherent", "--config", "/nonexistent/run.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runs_are_deterministic_apart_from_wall_time() {
    let strip = |rows: Vec<Value>| -> Vec<Value> {
        rows.into_iter()
            .map(|mut r| {
                r.as_object_mut().unwrap().remove("wall_ms");
                r
            })
            .collect()
    };
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        for suite in ["pathint", "dynamics"] {
            let out = supertime(&[suite, "--seed", "7"], dir.path());
            assert_eq!(out.status.code(), Some(0));
            std::fs::rename(dir.path().join("report.json"), dir.path().join(format!("{suite}.json"))).unwrap();
        }
    }
    for suite in ["pathint", "dynamics"] {
        let read = |d: &TempDir| -> Vec<Value> {
            let v: Value = serde_json::from_str(&std::fs::read_to_string(d.path().join(format!("{suite}.json"))).unwrap()).unwrap();
            strip(v["rows"].as_array().unwrap().clone())
        };
        assert_eq!(read(&a), read(&b));
    }
    for file in ["kernel_table.csv", "ds_sweep.csv", "trajectory.csv"] {
        assert_eq!(std::fs::read(a.path().join(file)).unwrap(), std::fs::read(b.path().join(file)).unwrap(), "{file}");
    }
}

#[test]
fn coherent_eigen_residual_at_d32() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[coherent]\ndim = 32\nz = [1.0, 0.0]\n");
    let out = supertime(&["coherent", "--config", &cfg, "--json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    let rows = v["rows"].as_array().unwrap();
    assert!(row(rows, "eigen")["residual"].as_f64().unwrap() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("coherent_state.csv")).unwrap();
    assert_eq!(csv.lines().count(), 33);
}

#[test]
fn pathint_halving_table() {
    let dir = TempDir::new().unwrap();
    let out = supertime(&["pathint"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("kernel_table.csv")).unwrap();
    let ratios: Vec<f64> = csv.lines().skip(2).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 4);
    assert!(ratios.iter().all(|r| (1.8..=2.2).contains(r)), "{ratios:?}");
}

#[test]
fn small_grid_kvn_writes_dumps() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[kvn]\ngrid = 64\ndt = 5e-3\n");
    let out = supertime(&["kvn", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let psi = KvNWave::read_dump(&std::fs::read(dir.path().join("psi_t.bin")).unwrap()).unwrap();
    assert_eq!((psi.grid.nq, psi.grid.np), (64, 64));
    assert!((psi.norm() - 1.0).abs() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("marginals.csv")).unwrap();
    let dq = psi.grid.dq();
    let mass: f64 = csv
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("q,"))
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap() * dq)
        .sum();
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");
}

#[test]
fn non_quadratic_kvn_failure_is_reported() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[kvn]\ngrid = 64\ndt = 5e-3\n");
    let out = supertime(&["kvn", "--config", &cfg, "--hamiltonian", "q1*p1^3"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let rows = report(dir.path());
    assert_eq!(row(&rows, "rho.user")["status"], "fail");
    assert_eq!(row(&rows, "rho.oscillator")["status"], "pass");
}

#[test]
fn default_config_round_trips() {
    let text = toml::to_string(&RunConfig::default()).unwrap();
    let back = RunConfig::from_toml(&text).unwrap();
    assert_eq!(back.kvn.grid, 256);
    assert_eq!(back.pathint.ladder, vec![8, 16, 32, 64, 128]);
    assert!(back.prepare().is_ok());
}
