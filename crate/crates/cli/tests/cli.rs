use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bsvbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsvbs"))
        .args(args)
        .env_remove("BSVBS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

const SMALL: &str = "[run]\nhorizon = 400\nseeds = [1, 2]\n";

#[test]
fn bound_prints_the_formula_value() {
    let out = bsvbs(&["bound", "--arms", "2", "--horizon", "1"]);
    assert!(out.status.success());
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 3.0867746335665966).abs() < 1e-12);
    let out = bsvbs(&["bound", "--arms", "256", "--horizon", "50000"]);
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 22087.161318).abs() < 1e-3);
    assert_eq!(bsvbs(&["bound", "--arms", "1", "--horizon", "10"]).status.code(), Some(1));
}

#[test]
fn run_writes_results_and_honours_seed_list() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = bsvbs(&[
        "run",
        "-c",
        &config,
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--seed-list",
        "7,8,9",
        "--plots",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for seed in [7, 8, 9] {
        assert!(out_dir.join(format!("records/seed_{seed}.csv")).is_file());
    }
    assert!(!out_dir.join("records/seed_1.csv").exists());
    assert!(out_dir.join("regret.svg").is_file());
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.starts_with("learner,T,seeds,R_T,R_T_over_T,bound,percent_below_bound,total_kw,cpu_kw\nbsvbs,400,3,"));
}

#[test]
fn out_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let env_dir = dir.path().join("from_env");
    let out = Command::new(env!("CARGO_BIN_EXE_bsvbs"))
        .args(["run", "-c", &config])
        .env("BSVBS_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.join("summary.csv").is_file());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    for name in ["a", "b"] {
        let p = dir.path().join(name);
        assert!(bsvbs(&["run", "-c", &config, "--out-dir", p.to_str().unwrap(), "--jobs", "2"]).status.success());
    }
    for file in ["regret.csv", "power.csv", "summary.csv", "metadata.json", "records/seed_2.csv"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(file)).unwrap(),
            fs::read(dir.path().join("b").join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn compare_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("cmp");
    let out = bsvbs(&[
        "compare",
        "-c",
        &config,
        "--learners",
        "bsvbs,ucb1,epsilon_greedy,stale_ctx_ucb",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert!(summary.lines().next().unwrap().contains("saving_total_pct"));

    let sweep_dir = dir.path().join("sweep");
    let out = bsvbs(&["sweep-delta", "-c", &config, "--deltas", "5e-4,100", "--out-dir", sweep_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let power = fs::read_to_string(sweep_dir.join("power_delta.csv")).unwrap();
    assert_eq!(power.lines().count(), 1 + 2 * 2);
}

#[test]
fn gen_trace_writes_header_and_all_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let trace = dir.path().join("trace.csv");
    let out = bsvbs(&["gen-trace", "-c", &config, "-o", trace.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&trace).unwrap();
    assert_eq!(text.lines().count(), 33);
    assert_eq!(text.lines().next().unwrap(), "bucket,arm,r_dl_mbit,r_ul_mbit,p_total_w,p_cpu_w");

    let traced = write_config(
        dir.path(),
        &format!("[env]\nmode = \"trace\"\ntrace_path = \"trace.csv\"\n{SMALL}"),
    );
    let out_dir = dir.path().join("traced");
    let out = bsvbs(&["run", "-c", &traced, "--out-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes_separate_validation_from_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "[run]\nhorizon = 0\n");
    assert_eq!(bsvbs(&["run", "-c", &bad]).status.code(), Some(1));

    let good = write_config(dir.path(), SMALL);
    assert_eq!(bsvbs(&["compare", "-c", &good, "--learners", "gp_ucb"]).status.code(), Some(1));
    assert_eq!(bsvbs(&["sweep-delta", "-c", &good, "--deltas", "1,-2"]).status.code(), Some(1));
    assert_eq!(bsvbs(&["run", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(bsvbs(&["run", "-c", "/nonexistent/config.toml"]).status.code(), Some(2));

    // a regular file where a directory is needed cannot be written into
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "x").unwrap();
    let out = bsvbs(&["run", "-c", &good, "--out-dir", blocker.join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = bsvbs(&["gen-trace", "-c", &good, "-o", blocker.join("t.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let trace_missing = write_config(dir.path(), "[env]\nmode = \"trace\"\ntrace_path = \"missing.csv\"\n");
    assert_eq!(bsvbs(&["run", "-c", &trace_missing]).status.code(), Some(1));
    assert!(bsvbs(&["--help"]).status.success());
}
