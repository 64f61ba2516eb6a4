use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SPEC: &str = r#"
scheme = "pi"
output = "pi_line"

[[axes]]
name = "cooperativity"
start = 10.0
stop = 1000.0
points = 5
grid = "log"
"#;

fn reigate(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reigate"))
        .current_dir(dir)
        .env_remove("REIGATE_CONFIG_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sweep_writes_then_skips() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pi.toml"), SPEC).unwrap();
    let o = reigate(dir.path(), &["sweep", "pi.toml", "--out", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("5 rows, 0 failed"));
    let csv = fs::read_to_string(dir.path().join("out/pi_line.csv")).unwrap();
    assert!(csv.starts_with("# rei-gates"));

    let o = reigate(dir.path(), &["sweep", "pi.toml", "--out", "out"]);
    assert!(stdout(&o).contains("up to date"));
    let o = reigate(dir.path(), &["sweep", "pi.toml", "--out", "out", "--force", "--workers", "2"]);
    assert!(stdout(&o).contains("wrote"));
    assert_eq!(fs::read_to_string(dir.path().join("out/pi_line.csv")).unwrap(), csv);
}

#[test]
fn config_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("configs");
    fs::create_dir(&cfg).unwrap();
    fs::write(cfg.join("pi.toml"), SPEC).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_reigate"))
        .current_dir(dir.path())
        .env("REIGATE_CONFIG_DIR", &cfg)
        .args(["sweep", "pi.toml"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("pi_line.csv").exists());
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(reigate(dir.path(), &["sweep", "missing.toml"]).status.code(), Some(2));
    fs::write(dir.path().join("bad.toml"), SPEC.replace("\"pi\"", "\"xx\"")).unwrap();
    assert_eq!(reigate(dir.path(), &["sweep", "bad.toml"]).status.code(), Some(2));
    assert_eq!(reigate(dir.path(), &["validate", "everything"]).status.code(), Some(2));
    fs::write(dir.path().join("x.csv"), "a\n1\n").unwrap();
    assert_eq!(reigate(dir.path(), &["plot", "x.csv", "--kind", "contour"]).status.code(), Some(2));
}

#[test]
fn failed_validation_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = reigate(dir.path(), &["validate", "pi"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL pi/") && text.contains("PASS pi/"));
}

#[test]
fn passing_validation_exits_with_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = reigate(dir.path(), &["validate", "perturbation"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn plot_writes_script() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pi.toml"), SPEC).unwrap();
    reigate(dir.path(), &["sweep", "pi.toml"]);
    let o = reigate(dir.path(), &["plot", "pi_line.csv", "--out", "plots"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let script = fs::read_to_string(dir.path().join("plots/plot_pi_line_line.py")).unwrap();
    assert!(script.contains("matplotlib"));
}

#[test]
fn compare_prints_table_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cmp.toml"), "[slice]\nstart = 10.0\nstop = 100.0\npoints = 3\n").unwrap();
    let o = reigate(dir.path(), &["compare", "cmp.toml"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("md"));
    for f in ["comparison.csv", "slice_ps.csv", "slice_pi.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
