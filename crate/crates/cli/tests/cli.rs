use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ficogarch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ficogarch")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CONFIG: &str = r#"
[model]
alpha0 = 0.0195
alpha1 = 0.0105
beta1 = 0.0513
sigma0_sq = "stationary"

[kernel]
d = -0.4

[driver]
jump_rate = 5.0
jump_size = "normal"
jump_var = 0.5

[simulation]
t_end = 20.0
step = 0.1
seed = 4
"#;

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_paths_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("out");
    let o = ficogarch(&["simulate", "--config", &cfg, "--paths", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
    assert!(manifest["diagnostics"]["kappa"].as_f64().unwrap() > 0.0);
    assert!(manifest["diagnostics"]["max_truncation_bound"].as_f64().unwrap() > 0.0);
    let csv = fs::read_to_string(out.join("path_0001.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,G,dG,sigma2,Sad,X");
    assert_eq!(lines.count(), 201);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let a = ficogarch(&["simulate", "--config", &cfg, "--seed", "9"]);
    let b = ficogarch(&["simulate", "--config", &cfg, "--seed", "9"]);
    let c = ficogarch(&["simulate", "--config", &cfg, "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn fracsub_simulate_and_acf_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = ficogarch(&["fracsub", "simulate", "--t-end", "50", "--step", "0.1", "--seed", "2", "--out", out]);
    assert!(o.status.success());
    let csv = dir.path().join("fracsub.csv");
    assert!(fs::read_to_string(&csv).unwrap().starts_with("t,S,Sad\n"));
    let acf = ficogarch(&["stats", "acf", "--input", csv.to_str().unwrap(), "--column", "Sad", "--max-lag", "5"]);
    assert!(acf.status.success());
    let text = stdout(&acf);
    assert!(text.starts_with("lag,acf\n0,1.0"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn unmodified_mvn_paths_need_flag() {
    let base = ["fracsub", "simulate", "--family", "mvn", "--t-end", "1", "--step", "0.5"];
    assert_eq!(ficogarch(&base).status.code(), Some(2));
    let mut flagged = base.to_vec();
    flagged.push("--pathological");
    assert!(ficogarch(&flagged).status.success());
}

#[test]
fn cov_table_ratio_is_increasing() {
    let o = ficogarch(&["cov", "table", "--d", "-0.25", "--hmax", "1000", "--log-points", "6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let ratios: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 6);
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn kernel_norm_diverges_with_error() {
    let ok = ficogarch(&["kernel", "norm", "--d", "-0.25", "--p", "2"]);
    assert!(ok.status.success());
    assert!(stdout(&ok).trim().parse::<f64>().unwrap() > 0.0);
    let bad = ficogarch(&["kernel", "norm", "--d", "-0.25", "--p", "0.5"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(ficogarch(&["validate", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(ficogarch(&["simulate"]).status.code(), Some(2));
    assert_eq!(ficogarch(&["fracsub", "simulate", "--paths", "2"]).status.code(), Some(2));
    let ok = ficogarch(&["validate", "--suite", "kernels"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("PASS 10 "));
    let red = ficogarch(&["validate", "--suite", "covariance"]);
    assert_eq!(red.status.code(), Some(1));
    assert!(stdout(&red).contains("FAIL  2 "));
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &CONFIG.replace("t_end", "t_final"));
    let o = ficogarch(&["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("t_final"));
}
