//! `bsvbs` command-line runner.
//!
//! Exit codes: 0 on success, 1 for invalid input (config, flags), 2 for
//! runtime failures (I/O, trace problems).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bsvbs::baselines::LearnerKind;
use bsvbs::harness::{self, LearnerReport, RunOptions};
use bsvbs::{regret_bound, Error, RunConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bsvbs", version, about = "Bandit scheduling of vBS radio policies")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Comma-separated seeds, overriding `run.seeds`.
    #[arg(long, global = true, value_delimiter = ',')]
    seed_list: Option<Vec<u64>>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Output directory; falls back to `run.out_dir`, then `bsvbs-out`.
    #[arg(long, global = true, env = "BSVBS_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Also render SVG charts.
    #[arg(long, global = true)]
    plots: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured learner over all seeds.
    Run {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Run several learners on identical environment streams.
    Compare {
        #[arg(short, long)]
        config: PathBuf,
        /// Comma-separated learners; savings are relative to the last one.
        #[arg(long, value_delimiter = ',', required = true)]
        learners: Vec<String>,
    },
    /// Run the configured learner once per power weight.
    SweepDelta {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        deltas: Vec<f64>,
    },
    /// Print the regret bound for a space size and horizon.
    Bound {
        #[arg(long)]
        arms: usize,
        #[arg(long)]
        horizon: u64,
    },
    /// Export the configured surrogate as a trace CSV.
    GenTrace {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn load(path: &Path, global: &Global) -> Result<(RunConfig, RunOptions), Error> {
    let mut config = RunConfig::load(path)?;
    if let Some(seeds) = &global.seed_list {
        config.run.seeds = seeds.clone();
    }
    config.validate()?;
    let out_dir = global
        .out_dir
        .clone()
        .or_else(|| config.run.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("bsvbs-out"));
    let opts = RunOptions {
        out_dir,
        jobs: global.jobs,
        plots: global.plots,
    };
    Ok((config, opts))
}

fn print_summary(reports: &[&LearnerReport]) {
    println!("learner\tT\tseeds\tR_T\tR_T/T\tbound\t%below\ttotal_kW\tcpu_kW");
    for r in reports {
        println!(
            "{}\t{}\t{}\t{:.3}\t{:.5}\t{:.3}\t{:.2}\t{:.3}\t{:.3}",
            r.learner,
            r.horizon,
            r.seeds.len(),
            r.final_regret(),
            r.final_regret() / r.horizon as f64,
            r.bound(),
            r.percent_below_bound(),
            r.total_kw,
            r.cpu_kw
        );
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Run { config } => {
            let (config, opts) = load(config, &cli.global)?;
            let report = harness::run(&config, &opts)?;
            print_summary(&[&report]);
            println!("results in {}", opts.out_dir.display());
        }
        Command::Compare { config, learners } => {
            let kinds = learners
                .iter()
                .map(|s| s.trim().parse::<LearnerKind>())
                .collect::<Result<Vec<_>, _>>()?;
            let (config, opts) = load(config, &cli.global)?;
            let reports = harness::compare(&config, &kinds, &opts)?;
            print_summary(&reports.iter().collect::<Vec<_>>());
            println!("results in {}", opts.out_dir.display());
        }
        Command::SweepDelta { config, deltas } => {
            let (config, opts) = load(config, &cli.global)?;
            let out = harness::sweep_delta(&config, deltas, &opts)?;
            println!("delta\tmean_total_w\tmean_cpu_w");
            for (delta, r) in &out {
                let n = r.horizon as f64;
                println!("{delta}\t{:.4}\t{:.4}", 1000.0 * r.total_kw / n, 1000.0 * r.cpu_kw / n);
            }
            println!("results in {}", opts.out_dir.display());
        }
        Command::Bound { arms, horizon } => {
            if *arms < 2 || *horizon == 0 {
                return Err(Error::Config("bound needs --arms >= 2 and --horizon >= 1".into()));
            }
            println!("{}", regret_bound(*arms, *horizon));
        }
        Command::GenTrace { config, output } => {
            let (config, _) = load(config, &cli.global)?;
            let rows = harness::gen_trace(&config, output)?;
            println!("wrote {rows} rows to {}", output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
