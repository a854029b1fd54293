use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ptpsim(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ptpsim"));
    cmd.args(args).env_remove("PTPSIM_OUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("PTPSIM_OUT_DIR", dir);
    }
    cmd.output().unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

#[test]
fn shipped_configs_validate() {
    let mut n = 0;
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let out = ptpsim(&["validate", "--config", path.to_str().unwrap()], None);
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        n += 1;
    }
    assert!(n >= 4);
}

#[test]
fn missing_config_fails() {
    let out = ptpsim(&["run", "--config", "/nonexistent/cfg.toml"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read config"));
}

#[test]
fn unknown_flag_fails() {
    let out = ptpsim(&["validate", "--config", &config("baseline_fifo.toml"), "--frobnicate"], None);
    assert!(!out.status.success());
}

#[test]
fn invalid_config_lists_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "duration_s = 0.5\n[link]\nrate_mbps = -1.0\n[traffic.up]\nsrc = \"nobody\"\ndst = \"trafGen1\"\n").unwrap();
    let out = ptpsim(&["validate", "--config", path.to_str().unwrap()], None);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    for needle in ["duration_s", "rate_mbps", "nobody"] {
        assert!(err.contains(needle), "{needle} missing from {err}");
    }
    let run = ptpsim(&["run", "--config", path.to_str().unwrap()], None);
    assert!(!run.status.success());
}

#[test]
fn run_writes_three_files_and_honours_env_dir() {
    let flag_dir = tempfile::tempdir().unwrap();
    let env_dir = tempfile::tempdir().unwrap();
    let cfg = config("static_asymmetry.toml");
    let out = ptpsim(&["run", "--config", &cfg, "--seed", "3", "--out", flag_dir.path().to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["summary.csv", "pdf_static_asymmetry_seed3.csv", "vector_static_asymmetry_seed3.csv"] {
        assert!(flag_dir.path().join(f).exists(), "{f}");
    }
    let line = String::from_utf8_lossy(&out.stdout);
    assert!(line.starts_with("static_asymmetry,3,0,0,fifo,none,1,20000.000,"), "{line}");

    let out = ptpsim(
        &["run", "--config", &cfg, "--out", flag_dir.path().join("ignored").to_str().unwrap()],
        Some(env_dir.path()),
    );
    assert!(out.status.success());
    assert!(env_dir.path().join("vector_static_asymmetry_seed1.csv").exists());
    assert!(!flag_dir.path().join("ignored").exists());
}

#[test]
fn sweep_writes_per_run_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptpsim(&["sweep", "--config", &config("static_asymmetry.toml"), "--out", dir.path().to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.contains(&"summary.csv".to_string()));
    assert!(names.contains(&"pdf_static_asymmetry_u0_d0_r00.csv".to_string()));
    assert!(names.contains(&"vector_static_asymmetry_u0_d0_r00.csv".to_string()));
}

#[test]
fn sweep_without_out_dir_fails() {
    let out = ptpsim(&["sweep", "--config", &config("static_asymmetry.toml")], None);
    assert!(!out.status.success());
}

#[test]
fn unwritable_out_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = ptpsim(
        &["run", "--config", &config("static_asymmetry.toml"), "--out", blocker.join("sub").to_str().unwrap()],
        None,
    );
    assert!(!out.status.success());
}
