use std::path::Path;
use std::process::{Command, Output};

fn scslab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scslab"))
        .current_dir(dir)
        .env_remove("SCSLAB_CACHE_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn variance_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    ok(&scslab(dir.path(), &["variance", "--k", "1000", "--h1", "1", "--h2", "1", "--window", "bump:1:2", "--xgrid", "4:30:2"]));
    let csv = std::fs::read_to_string(dir.path().join("variance.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# scslab-csv-1 variance"));
    assert_eq!(lines.next(), Some("X,lhs_petersson,main_term,residual,tail_bound"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 14);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], 4.0 + 2.0 * i as f64);
        assert!((r[1] - r[2] - r[3]).abs() <= 1e-12 * (1.0 + r[1].abs()));
        assert!(r[4] >= 0.0);
    }
    let report = json(&dir.path().join("variance.json"));
    assert_eq!(report["schema"], "scslab-report-1");
    assert_eq!(report["payload"]["type"], "variance");
    assert_eq!(report["config"]["k"], 1000);
}

#[test]
fn eigen_second_run_hits_cache() {
    let dir = tempfile::tempdir().unwrap();
    let first = ok(&scslab(dir.path(), &["eigen", "--k", "24", "--n", "100"]));
    assert!(first.contains("phase compute") && first.contains("phase store"), "{first}");
    assert!(dir.path().join(".scslab-cache/eig-k24-n100.bin").is_file());
    let second = ok(&scslab(dir.path(), &["eigen", "--k", "24", "--n", "100"]));
    assert!(second.contains("phase load") && !second.contains("phase compute"), "{second}");
    let report = json(&dir.path().join("eigen.json"));
    assert_eq!(report["payload"]["data"]["cache_hit"], true);
    assert_eq!(report["timings"][0]["name"], "load");
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("elsewhere");
    let out = Command::new(env!("CARGO_BIN_EXE_scslab"))
        .current_dir(dir.path())
        .env("SCSLAB_CACHE_DIR", &cache)
        .args(["eigen", "--k", "16", "--n", "40"])
        .output()
        .unwrap();
    ok(&out);
    assert!(cache.join("eig-k16-n40.bin").is_file());
    assert!(!dir.path().join(".scslab-cache").exists());
    let flag = dir.path().join("flagged");
    let out = Command::new(env!("CARGO_BIN_EXE_scslab"))
        .current_dir(dir.path())
        .env("SCSLAB_CACHE_DIR", &cache)
        .args(["eigen", "--k", "16", "--n", "40", "--cache-dir", flag.to_str().unwrap()])
        .output()
        .unwrap();
    ok(&out);
    assert!(flag.join("eig-k16-n40.bin").is_file());
}

#[test]
fn meansquare_reports_fitted_exponents() {
    let dir = tempfile::tempdir().unwrap();
    ok(&scslab(dir.path(), &["meansquare", "--k", "12", "--h", "1,2,3,4", "--xgrid", "1024:65536:x2"]));
    let report = json(&dir.path().join("meansquare.json"));
    let fits = report["payload"]["data"][0]["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 4);
    for (fit, h) in fits.iter().zip(1..) {
        assert_eq!(fit["h"], h);
        let e = fit["exponent"].as_f64().unwrap();
        let band = fit["band"].as_array().unwrap();
        assert!(band[0].as_f64().unwrap() <= e && e <= band[1].as_f64().unwrap());
    }
}

#[test]
fn invalid_field_exits_nonzero_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = scslab(dir.path(), &["variance", "--k", "13", "--xgrid", "4:8:1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("invalid value for `k`"), "{err}");

    let out = scslab(dir.path(), &["smoothscan", "--k", "12", "--xgrid", "100:10:x2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`xgrid`"));

    let out = scslab(dir.path(), &["sum", "--k", "12", "--xgrid", "100", "--window", "bump:2:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`window`"));

    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "command = \"variance\"\nk = 24\nxgird = \"3:5:1\"\n").unwrap();
    let out = scslab(dir.path(), &["--config", "run.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("xgird"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "command = \"sum\"\nk = 12\nh = [1]\nxgrid = \"50:150:50\"\n").unwrap();
    ok(&scslab(dir.path(), &["--config", "run.toml", "--k", "16", "--name", "over"]));
    let report = json(&dir.path().join("over.json"));
    assert_eq!(report["config"]["k"], 16);
    assert_eq!(report["config"]["xgrid"], "50:150:50");
    let csv = std::fs::read_to_string(dir.path().join("over.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 3);
}

#[test]
fn embedded_config_reproduces_csv_bytes() {
    let dir = tempfile::tempdir().unwrap();
    ok(&scslab(
        dir.path(),
        &["smoothscan", "--k", "20", "--h", "1,3", "--xgrid", "100:3200:x2", "--window", "cosine:1:2", "--plot"],
    ));
    let first = std::fs::read(dir.path().join("smoothscan.csv")).unwrap();
    let script = std::fs::read_to_string(dir.path().join("smoothscan.plot.py")).unwrap();
    assert!(script.contains("\"smoothscan.csv\"") && script.contains("\"ratio\""));

    std::fs::create_dir(dir.path().join("again")).unwrap();
    ok(&scslab(dir.path(), &["--config", "smoothscan.json", "--out-dir", "again"]));
    let second = std::fs::read(dir.path().join("again/smoothscan.csv")).unwrap();
    assert_eq!(first, second);
    let a = json(&dir.path().join("smoothscan.json"));
    let b = json(&dir.path().join("again/smoothscan.json"));
    assert_eq!(a["payload"], b["payload"]);
}

#[test]
fn petersson_check_rows_agree() {
    let dir = tempfile::tempdir().unwrap();
    ok(&scslab(dir.path(), &["petersson-check", "--k", "24", "--n-max", "6"]));
    let csv = std::fs::read_to_string(dir.path().join("petersson-check.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.ends_with(",1")), "{csv}");
}
