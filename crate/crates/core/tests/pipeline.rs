//! Library-level runs over the shipped example configs.

use std::path::PathBuf;

use bsvbs::baselines::LearnerKind;
use bsvbs::config::EnvMode;
use bsvbs::harness::{self, RunOptions};
use bsvbs::RunConfig;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn opts(dir: &tempfile::TempDir, name: &str) -> RunOptions {
    RunOptions {
        out_dir: dir.path().join(name),
        jobs: 1,
        plots: false,
    }
}

#[test]
fn example_configs_validate() {
    for name in ["scenario_a.toml", "scenario_b.toml", "trace.toml"] {
        let config = RunConfig::load(&configs_dir().join(name)).unwrap();
        if config.env.mode == EnvMode::Trace {
            assert!(config.env.trace_path.unwrap().ends_with("trace.csv"));
        } else {
            config.validate().unwrap();
        }
    }
}

#[test]
fn compare_shares_environment_streams() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::load(&configs_dir().join("scenario_b.toml")).unwrap();
    config.run.horizon = 600;
    config.run.seeds = vec![3, 4];
    let reports = harness::compare(
        &config,
        &[LearnerKind::Bsvbs, LearnerKind::Ucb1, LearnerKind::StaleCtxUcb],
        &opts(&dir, "cmp"),
    )
    .unwrap();
    assert_eq!(reports.len(), 3);
    // the hindsight minimum depends only on the environment stream
    for r in &reports[1..] {
        assert_eq!(r.min_total_kw, reports[0].min_total_kw);
        assert_eq!(r.min_cpu_kw, reports[0].min_cpu_kw);
    }
    for r in &reports {
        assert!(r.total_kw >= r.min_total_kw);
    }
}

#[test]
fn single_run_matches_compare_entry() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    config.run.horizon = 500;
    config.run.seeds = vec![11];
    let alone = harness::run(&config, &opts(&dir, "alone")).unwrap();
    let both = harness::compare(&config, &[LearnerKind::Bsvbs, LearnerKind::EpsilonGreedy], &opts(&dir, "both")).unwrap();
    assert_eq!(alone.final_regret(), both[0].final_regret());
    assert_eq!(alone.total_kw, both[0].total_kw);
}
