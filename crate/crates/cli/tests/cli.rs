use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const MODEL: &str = r#""model": {
    "tau0": {"family": "gen_gamma", "alpha": 0.4, "theta": 1.0, "zeta": 0.5},
    "taus": [{"family": "gen_gamma", "alpha": 0.3, "theta": 1.0, "zeta": 0.2}, {"family": "gen_gamma", "alpha": 0.6, "theta": 2.0, "zeta": 0.1}],
    "gammas": [1.0, 1.5]
}"#;

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(task: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phibp"))
        .args([task, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn header(path: &Path) -> (String, String) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    (lines.next().unwrap().to_string(), lines.next().unwrap().to_string())
}

#[test]
fn verify_duality_passes_and_writes_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run("verify-duality", &repo_config("verify_duality.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (comment, cols) = header(&tmp.path().join("duality.csv"));
    assert_eq!(comment, "# duality: config_id, r, K_tilde, log_lhs, log_rhs, residual");
    assert_eq!(cols, "config_id,r,K_tilde,log_lhs,log_rhs,residual");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("verify-duality.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert!(report["max_duality_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn normalize_and_mc_tables_carry_documented_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run("normalize", &repo_config("normalize.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    let (_, cols) = header(&tmp.path().join("normalize.csv"));
    assert!(cols.ends_with("law,sum,abs_error"), "{cols}");

    let cfg = write_config(tmp.path(), &format!(r#"{{ {MODEL}, "draws": 10000, "seeds": [3], "tolerances": {{"tv": 1.0, "p_value": 0.0}} }}"#));
    let o = run("mc-compare", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, cols) = header(&tmp.path().join("mc.csv"));
    assert!(cols.starts_with("statistic,chi2,dof,p_value"), "{cols}");
}

#[test]
fn malformed_family_reports_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{
  "model": {
    "tau0": {"family": "gama", "theta": 1.0, "zeta": 0.5},
    "taus": [{"family": "gamma", "theta": 1.0, "zeta": 0.2}],
    "gammas": [1.0]
  },
  "counts": [2]
}"#,
    );
    let o = run("verify-duality", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("model.tau0.family"), "{err}");
}

#[test]
fn missing_required_field_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{{ {MODEL} }}"));
    let o = run("verify-duality", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("counts"));
    let o = run("mc-compare", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_field_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!(r#"{{ {MODEL}, "counts": [2, 1], "cuonts": 1 }}"#));
    let o = run("verify-duality", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cuonts"));
}

#[test]
fn failed_criterion_exits_one_but_still_writes_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!(r#"{{ {MODEL}, "counts": [3, 2], "tolerances": {{"duality": 1e-300}} }}"#));
    let o = run("verify-duality", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("criterion failed"));
    assert!(tmp.path().join("verify-duality.json").exists());
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!(r#"{{ {MODEL}, "draws": 50, "seeds": [1] }}"#));
    let read = |d: &Path| std::fs::read(d.join("samples.csv")).unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert_eq!(run("sample", &cfg, &a, &[]).status.code(), Some(0));
    assert_eq!(run("sample", &cfg, &b, &["--seed", "1"]).status.code(), Some(0));
    assert_eq!(run("sample", &cfg, &c, &["--seed", "2"]).status.code(), Some(0));
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}
