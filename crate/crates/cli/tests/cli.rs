use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn replicator(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_replicator"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn digests(dir: &Path) -> Vec<(String, String)> {
    manifest(dir)["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["name"].as_str().unwrap().to_string(), f["sha256"].as_str().unwrap().to_string()))
        .collect()
}

const SMALL: &[&str] = &["--k", "2", "--generations", "2", "--elections", "300", "--seed", "42"];

fn run_small(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out", out.to_str().unwrap()];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    replicator(&args)
}

#[test]
fn run_writes_every_output_and_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o = run_small(a.path(), &["--probe", "0.3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["ecdf.csv", "hist.csv", "probes.csv", "summary.json", "manifest.json"] {
        assert!(a.path().join(f).exists(), "{f}");
    }
    assert_eq!(code(&run_small(b.path(), &["--probe", "0.3"])), 0);
    let da = digests(a.path());
    assert_eq!(da.len(), 4);
    assert_eq!(da, digests(b.path()));
    let m = manifest(a.path());
    assert_eq!(m["master_seed"], 42);
    assert_eq!(m["config"]["k"], 2);
}

#[test]
fn golden_headers_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_small(dir.path(), &[])), 0);
    let hist = fs::read_to_string(dir.path().join("hist.csv")).unwrap();
    let ecdf = fs::read_to_string(dir.path().join("ecdf.csv")).unwrap();
    assert_eq!(hist.lines().next(), Some("trial,t,bin_left,count"));
    assert_eq!(ecdf.lines().next(), Some("trial,t,grid_x,ecdf_value"));
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/run_k2_seed42.txt")).unwrap();
    let mut lines = golden.lines();
    // rows around the centre of the last generation of trial 0
    for (name, text, skip) in [("hist.csv", &hist, 95), ("ecdf.csv", &ecdf, 250)] {
        let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("0,2,")).skip(skip).take(6).collect();
        for row in rows {
            assert_eq!(Some(row), lines.next(), "{name}");
        }
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["trials"][0]["generations"].as_array().unwrap().len(), 3);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "k_counts = [{ k = 3, p = 0.5 }, { k = 4, p = 0.4 }]\ngenerations = 2\nelections = 10\n").unwrap();
    let o = replicator(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    fs::write(&cfg, "k = 3\ngenerations = 2\nelections = 10\ncolour = 1\n").unwrap();
    let o = replicator(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    // flags fix the file: they override the bad entry
    fs::write(&cfg, "k_counts = [{ k = 3, p = 0.5 }, { k = 4, p = 0.4 }]\ngenerations = 2\nelections = 10\n").unwrap();
    let o = replicator(&["run", "--config", cfg.to_str().unwrap(), "--k", "6", "--epsilon", "0.01", "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(manifest(&dir.path().join("o"))["config"]["epsilon"], 0.01);
    assert_eq!(code(&replicator(&["run", "--out", "x"])), 2);
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    let o = run_small(&file.join("inside"), &[]);
    assert_eq!(code(&o), 3);
}

#[test]
fn bounds_command_checks_compatibility() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_small(dir.path(), &["--symmetry"])), 0);
    let run = dir.path().to_str().unwrap();
    let o = replicator(&["bounds", "--run", run, "--kind", "k2-exact", "--x", "0.25"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,empirical_ecdf_mean,bound_value,satisfied"));
    let bound: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(bound, vec![0.25, 0.125, 0.03125]);
    let o = replicator(&["bounds", "--run", run, "--kind", "k3-upper", "--x", "0.25"]);
    assert_eq!(code(&o), 2);
    let o = replicator(&["bounds", "--run", run, "--kind", "k2-exact", "--x", "0.3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn nash_check_reports_verdicts() {
    let o = replicator(&["nash-check", "--profile", "0.5,0.5,0.5", "--rule", "equal-split"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["is_equilibrium"], false);
    let o = replicator(&["nash-check", "--profile", "0.3,0.3,0.7,0.7"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["is_equilibrium"], true);
    let o = replicator(&["nash-check", "--two-spike", "0.3", "--k", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["is_equilibrium"], false);
    assert_eq!(code(&replicator(&["nash-check", "--profile", "0.5"])), 2);
}

#[test]
fn maps_report_fixed_points() {
    let o = replicator(&["maps", "--map", "large-k", "--k", "5", "--p0", "0.3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fixed_points"].as_array().unwrap().len(), 5);
    assert!((v["orbit"]["last"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(code(&replicator(&["maps", "--map", "cubic-noisy-k3"])), 2);
}

#[test]
fn heatmap_skips_infeasible_cells() {
    let dir = tempfile::tempdir().unwrap();
    let o = replicator(&[
        "heatmap", "--out", dir.path().to_str().unwrap(), "--resolution", "1", "--generations", "2",
        "--elections", "200",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("heatmap.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("fraction_k3,fraction_k4,fraction_k5,seed,mode\n"));
    let notes = manifest(dir.path())["notes"].to_string();
    assert!(notes.contains("skipped cell (1, 1)"), "{notes}");
}
