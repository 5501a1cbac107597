use sportsim_core::envs::{CurriculumMode, Sport, SportConfig};
use sportsim_core::metrics::Metric;
use sportsim_harness::policy::{PolicySource, Scripted};
use sportsim_harness::{run_eval, run_eval_with, Error, RunSpec};

fn spec(sport: Sport, policy: PolicySource, trials: usize) -> RunSpec {
    let mut s = RunSpec::new(sport, policy);
    s.trials = trials;
    s.batch = 16;
    s
}

#[test]
fn collects_exactly_the_requested_trials() {
    for trials in [1, 7, 40] {
        let out = run_eval(&spec(Sport::Golf, PolicySource::Scripted(None), trials)).unwrap();
        assert_eq!(out.episodes.len(), trials);
        assert_eq!(out.report.trials, trials as u64);
    }
}

#[test]
fn identical_specs_give_identical_tables() {
    let s = spec(Sport::PenaltyKick, PolicySource::Random, 20);
    let a = run_eval(&s).unwrap();
    let b = run_eval(&s).unwrap();
    assert_eq!(a.csv(), b.csv());
    assert_eq!(a.text(), b.text());
}

#[test]
fn workers_do_not_change_results() {
    let mut s = spec(Sport::Golf, PolicySource::Random, 30);
    let a = run_eval(&s).unwrap();
    s.workers = 3;
    let b = run_eval(&s).unwrap();
    assert_eq!(a.episodes, b.episodes);
    assert_eq!(a.csv(), b.csv());
}

#[test]
fn straight_runner_finishes_flat_hurdles() {
    let mut cfg = SportConfig::new(Sport::Hurdling);
    cfg.curriculum.mode = CurriculumMode::Fixed { value: 0.0 };
    let s = spec(Sport::Hurdling, PolicySource::Scripted(Some(Scripted::StraightRunner)), 32);
    let out = run_eval_with(&s, &cfg).unwrap();
    assert_eq!(out.report.get(Metric::SucRate).value, Some(100.0));
    assert!(out.report.get(Metric::Time).value.unwrap() > 10.0);
}

#[test]
fn outputs_carry_seed_and_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(Sport::Golf, PolicySource::Scripted(None), 5);
    s.seed = 42;
    s.out_dir = Some(dir.path().to_path_buf());
    s.log_trajectories = true;
    let out = run_eval(&s).unwrap();
    for f in &out.files {
        if f.extension().is_some_and(|e| e == "traj") {
            continue;
        }
        let text = std::fs::read_to_string(f).unwrap();
        assert!(text.contains(&out.config_hash), "{}", f.display());
        assert!(text.contains("seed 42") || text.contains("seed=42"), "{}", f.display());
    }
    assert_eq!(out.files.len(), 4);
    let log = sportsim_harness::TrajectoryLog::read(&dir.path().join("golf.traj")).unwrap();
    assert!(sportsim_harness::replay(&log).unwrap().is_clean());
}

#[test]
fn config_file_must_match_the_sport() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.toml");
    std::fs::write(&p, "sport = \"golf\"\n").unwrap();
    let mut s = spec(Sport::Hurdling, PolicySource::Random, 1);
    s.config = Some(p);
    let e = run_eval(&s).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn zero_trials_is_a_config_error() {
    let e = run_eval(&spec(Sport::Golf, PolicySource::Random, 0)).unwrap_err();
    assert!(matches!(e, Error::Config(_)));
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn unreachable_policy_server_fails_after_retries() {
    let port = {
        let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let s = spec(Sport::Golf, PolicySource::Bridge(format!("127.0.0.1:{port}")), 1);
    match run_eval(&s) {
        Err(Error::Connection { attempts, .. }) => assert_eq!(attempts, 3),
        other => panic!("expected a connection error, got {other:?}"),
    }
}

#[test]
fn policy_sources_parse() {
    assert_eq!("random".parse::<PolicySource>().unwrap(), PolicySource::Random);
    assert_eq!(
        "ball_chaser".parse::<PolicySource>().unwrap(),
        PolicySource::Scripted(Some(Scripted::BallChaser))
    );
    assert_eq!(
        "tcp://127.0.0.1:9".parse::<PolicySource>().unwrap(),
        PolicySource::Bridge("127.0.0.1:9".into())
    );
    assert!("moonwalk".parse::<PolicySource>().is_err());
    for p in ["random", "zero", "scripted", "fixed-swing", "tcp://h:1"] {
        assert_eq!(p.parse::<PolicySource>().unwrap().to_string(), p);
    }
}
