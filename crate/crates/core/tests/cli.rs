use std::path::Path;
use std::process::{Command, Output};

fn statlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("STATLAB_OUT")
        .output()
        .expect("spawn statlab")
}

fn csv(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(format!("{name}.csv"))).unwrap()
}

#[test]
fn pooling_defaults_write_tables_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = statlab(&["pooling", "--figures"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let optimum = csv(dir.path(), "pooling_optimum");
    assert!(optimum.contains("5.022"), "{optimum}");
    let candidates = csv(dir.path(), "pooling_candidates");
    assert!(candidates.lines().count() > 2);
    assert!(dir.path().join("pooling_cost_curve.svg").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["tables"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(statlab(&["all", "--seed", "1", "--reps", "200", "--workers", "1"], a.path()).status.success());
    assert!(statlab(&["all", "--seed", "1", "--reps", "200"], b.path()).status.success());
    let mut n = 0;
    for entry in std::fs::read_dir(a.path()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "csv") {
            let other = b.path().join(p.file_name().unwrap());
            assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(other).unwrap(), "{}", p.display());
            n += 1;
        }
    }
    assert!(n >= 10, "{n} tables");
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_statlab")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_value_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = statlab(&["pooling", "--p", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn short_chain_warns() {
    let dir = tempfile::tempdir().unwrap();
    let out = statlab(&["mh", "--burn-in", "100", "--samples", "2000"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("short chain"));
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(summary.contains("short chain"));
}

#[test]
fn config_file_is_applied_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 5\n[gof]\nbins = 4\nsizes = [8]\nreps = 300\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = statlab(&["--config", cfg.to_str().unwrap(), "gof", "--sizes", "12"], &out_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = csv(&out_dir, "gof_summary");
    assert!(summary.lines().nth(1).unwrap().starts_with("12,"), "{summary}");
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[gof]\ncolour = 1\n").unwrap();
    assert_eq!(statlab(&["--config", bad.to_str().unwrap(), "gof"], &out_dir).status.code(), Some(2));
}

#[test]
fn unwritable_output_dir_fails_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = statlab(&["pooling"], &blocker.join("sub"));
    assert_eq!(out.status.code(), Some(1));
}
