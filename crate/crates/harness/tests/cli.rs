use std::process::Command;

fn sportsim() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sportsim"));
    c.env_remove("SPORTSIM_CONFIG_ROOT");
    c
}

#[test]
fn eval_prints_a_table() {
    let out = sportsim()
        .args(["eval", "--sport", "golf", "--trials", "5", "--batch", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("golf: 5 trials"));
    assert!(text.contains("Hit Rate | Error Dis"));
}

#[test]
fn unknown_sport_exits_with_config_error() {
    let out = sportsim().args(["eval", "--sport", "curling"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_file_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("golf.toml"), "sport = \"golf\"\ntime_limit = -1.0\n").unwrap();
    let out = sportsim()
        .env("SPORTSIM_CONFIG_ROOT", dir.path())
        .args(["eval", "--sport", "golf", "--trials", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_root_supplies_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.toml"), "sport = \"golf\"\ntime_limit = 0.5\n").unwrap();
    let out = sportsim()
        .env("SPORTSIM_CONFIG_ROOT", dir.path())
        .args(["card", "--sport", "golf", "--config", "short.toml"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let card = String::from_utf8(out.stdout).unwrap();
    assert!(card.contains("| action | 69 |"));
    assert!(card.contains("0.5"));
}

#[test]
fn eval_log_replays_and_corruption_faults() {
    let dir = tempfile::tempdir().unwrap();
    let out = sportsim()
        .args(["eval", "--sport", "golf", "--trials", "3", "--batch", "2", "--log-trajectories", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let log = dir.path().join("golf.traj");
    assert!(dir.path().join("golf.traj.schema.txt").exists());
    let ok = sportsim().arg("replay").arg(&log).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8(ok.stdout).unwrap().starts_with("clean"));
    let mut bytes = std::fs::read(&log).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x10;
    std::fs::write(&log, bytes).unwrap();
    let bad = sportsim().arg("replay").arg(&log).output().unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn bench_reports_throughput() {
    let out = sportsim()
        .args(["bench", "--sport", "penalty_kick", "--batch", "1", "--seconds", "0.05"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("env-steps/s"));
    assert!(text.contains("allocations  "));
}
