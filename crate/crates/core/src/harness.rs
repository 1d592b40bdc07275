//! Experiment driver: slot loop, seed-parallel runs and result files.
//!
//! One slot runs in this order: the learner computes its distribution from
//! feedback up to the previous slot and samples an arm, the environment
//! applies it, the reward is scaled, and the learner is updated. The full
//! reward row is computed next to the loop for regret only.
//!
//! Output files (all CSV columns are plain decimal):
//!
//! - `regret.csv`: `t,regret_mean,regret_ci`
//! - `power.csv`: `hyperslot,mean_total_w,mean_cpu_w`
//! - `summary.csv`: `learner,T,seeds,R_T,R_T_over_T,bound,percent_below_bound,total_kw,cpu_kw`
//!   (compare adds `min_total_kw,min_cpu_kw,saving_total_pct,saving_cpu_pct`)
//! - `records/seed_<s>.csv`: `t,arm,reward,raw_reward,r_dl,r_ul,total_w,cpu_w`
//! - `metadata.json`

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{build_learner, BaselineParams, LearnerKind};
use crate::config::RunConfig;
use crate::environment::{Envelope, Environment, SlotContext};
use crate::error::{Error, Result};
use crate::learner::{regret_bound, ArmDistribution};
use crate::metrics::{hyperslot_power, savings_percent, RegretCurve, RegretTracker, RunRecord};
use crate::plot::{line_chart, Series};
use crate::reward::{utility, PowerSource, RewardScaler};
use crate::rng::{SlotRng, ENV_STREAM, LEARNER_STREAM};

/// Everything a seed needs, shared read-only across workers.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub env: Environment,
    pub envelope: Envelope,
    pub delta: f64,
    pub power_source: PowerSource,
    pub bounds: (f64, f64),
    pub horizon: u64,
    pub anytime: bool,
    pub params: BaselineParams,
    pub hyperslot: usize,
    pub seeds: Vec<u64>,
}

impl Experiment {
    pub fn from_config(config: &RunConfig) -> Result<Self> {
        let env = config.environment()?;
        let envelope = env.envelope()?;
        let bounds = match (config.reward.f_min, config.reward.f_max) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => envelope
                .scaler(config.reward.delta, config.reward.power_source)?
                .bounds(),
        };
        Ok(Experiment {
            env,
            envelope,
            delta: config.reward.delta,
            power_source: config.reward.power_source,
            bounds,
            horizon: config.run.horizon,
            anytime: config.run.anytime,
            params: config.baseline,
            hyperslot: config.run.hyperslot,
            seeds: config.run.seeds.clone(),
        })
    }

    /// Same experiment under another `delta`, with bounds recomputed from the envelope.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let bounds = self.envelope.scaler(delta, self.power_source)?.bounds();
        Ok(Experiment {
            delta,
            bounds,
            ..self.clone()
        })
    }

    /// A fresh scaler (clamp counter at zero).
    pub fn scaler(&self) -> Result<RewardScaler> {
        RewardScaler::new(self.delta, self.bounds.0, self.bounds.1, self.power_source)
    }
}

/// What an observer sees after each slot.
#[derive(Debug)]
pub struct SlotView<'a> {
    pub ctx: &'a SlotContext,
    /// The slot's record, with the full reward row.
    pub record: &'a RunRecord,
    /// Distribution the arm was sampled from, for randomized learners.
    pub distribution: Option<&'a ArmDistribution>,
}

/// Per-slot hook into [`run_seed`].
pub trait SlotObserver {
    fn on_slot(&mut self, view: &SlotView<'_>) -> Result<()>;
}

impl<F: FnMut(&SlotView<'_>) -> Result<()>> SlotObserver for F {
    fn on_slot(&mut self, view: &SlotView<'_>) -> Result<()> {
        self(view)
    }
}

/// Result of one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub seed: u64,
    /// `R_t` for `t = 1..=T`.
    pub regret: Vec<f64>,
    pub total_w: Vec<f64>,
    pub cpu_w: Vec<f64>,
    /// Sum over slots of the smallest power any arm would have drawn.
    pub min_total_w: f64,
    pub min_cpu_w: f64,
    pub oracle_arm: usize,
    /// Slots where the played arm achieved the row maximum.
    pub optimal_plays: u64,
    pub clamps: u64,
    pub plays: Vec<u64>,
}

/// Runs one learner for one seed. Environment draws depend on the seed only,
/// so every learner sees the same contexts under the same seed.
pub fn run_seed(
    exp: &Experiment,
    kind: LearnerKind,
    seed: u64,
    mut observer: Option<&mut dyn SlotObserver>,
) -> Result<SeedOutcome> {
    let env = &exp.env;
    let k = env.arm_count();
    let scaler = exp.scaler()?;
    let horizon = (!exp.anytime).then_some(exp.horizon);
    let mut learner = build_learner(kind, k, horizon, &exp.params, SlotRng::new(seed, LEARNER_STREAM))?;
    let mut env_rng = SlotRng::new(seed, ENV_STREAM);
    let mut tracker = RegretTracker::new(k);
    let n = exp.horizon as usize;
    let mut out = SeedOutcome {
        seed,
        regret: Vec::with_capacity(n),
        total_w: Vec::with_capacity(n),
        cpu_w: Vec::with_capacity(n),
        min_total_w: 0.0,
        min_cpu_w: 0.0,
        oracle_arm: 0,
        optimal_plays: 0,
        clamps: 0,
        plays: vec![0; k],
    };

    for t in 1..=exp.horizon {
        let ctx = env.next_context(t, &mut env_rng);
        let arm = learner.select(t)?;
        let (outcome, power) = env.evaluate(&ctx, arm)?;
        let raw_reward = scaler.raw_reward(utility(&outcome), &power);
        let reward = scaler.normalize(raw_reward);

        let mut row = Vec::with_capacity(k);
        let (mut min_total, mut min_cpu) = (f64::INFINITY, f64::INFINITY);
        for x in 0..k {
            let (o, p) = env.evaluate(&ctx, x)?;
            row.push(scaler.score(&o, &p));
            min_total = min_total.min(p.total_w);
            min_cpu = min_cpu.min(p.cpu_w);
        }
        if row[arm] != reward {
            return Err(Error::Shape(format!(
                "slot {t}: reward row entry {} differs from delivered reward {reward}",
                row[arm]
            )));
        }
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let record = RunRecord {
            t,
            arm,
            reward,
            raw_reward,
            r_dl: outcome.r_dl,
            r_ul: outcome.r_ul,
            total_w: power.total_w,
            cpu_w: power.cpu_w,
            row: Some(row),
        };
        if let Some(obs) = observer.as_deref_mut() {
            obs.on_slot(&SlotView {
                ctx: &ctx,
                record: &record,
                distribution: learner.last_distribution(),
            })?;
        }
        learner.feedback(arm, reward, Some(&ctx))?;

        let row = record.row.as_deref().expect("row was just set");
        out.regret.push(tracker.push(row, reward)?);
        out.total_w.push(power.total_w);
        out.cpu_w.push(power.cpu_w);
        out.min_total_w += min_total;
        out.min_cpu_w += min_cpu;
        out.plays[arm] += 1;
        if reward >= best {
            out.optimal_plays += 1;
        }
    }
    out.oracle_arm = tracker.best().0;
    out.clamps = scaler.clamp_count();
    Ok(out)
}

/// Per-seed figures kept after aggregation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedStats {
    pub seed: u64,
    pub final_regret: f64,
    pub total_kw: f64,
    pub cpu_kw: f64,
    pub oracle_arm: usize,
    pub optimal_fraction: f64,
    pub clamped_rewards: u64,
}

/// One learner aggregated over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerReport {
    pub learner: LearnerKind,
    pub horizon: u64,
    pub arm_count: usize,
    pub curve: RegretCurve,
    /// Seed-averaged hyper-slot means `(total_w, cpu_w)`.
    pub power: Vec<(f64, f64)>,
    /// Seed means of the summed per-slot watts, divided by 1000.
    pub total_kw: f64,
    pub cpu_kw: f64,
    pub min_total_kw: f64,
    pub min_cpu_kw: f64,
    pub optimal_fraction: f64,
    pub seeds: Vec<SeedStats>,
}

impl LearnerReport {
    pub fn aggregate(learner: LearnerKind, arm_count: usize, hyperslot: usize, outcomes: &[SeedOutcome]) -> Result<Self> {
        let series: Vec<Vec<f64>> = outcomes.iter().map(|o| o.regret.clone()).collect();
        let curve = RegretCurve::from_series(&series)?;
        let horizon = curve.horizon();
        let n = outcomes.len() as f64;
        let mean = |f: &dyn Fn(&SeedOutcome) -> f64| outcomes.iter().map(f).sum::<f64>() / n;

        let windows: Vec<(Vec<f64>, Vec<f64>)> = outcomes
            .iter()
            .map(|o| (hyperslot_power(&o.total_w, hyperslot), hyperslot_power(&o.cpu_w, hyperslot)))
            .collect();
        let count = windows.first().map_or(0, |w| w.0.len());
        let power = (0..count)
            .map(|i| {
                (
                    windows.iter().map(|w| w.0[i]).sum::<f64>() / n,
                    windows.iter().map(|w| w.1[i]).sum::<f64>() / n,
                )
            })
            .collect();

        let seeds = outcomes
            .iter()
            .map(|o| SeedStats {
                seed: o.seed,
                final_regret: o.regret.last().copied().unwrap_or(0.0),
                total_kw: o.total_w.iter().sum::<f64>() / 1000.0,
                cpu_kw: o.cpu_w.iter().sum::<f64>() / 1000.0,
                oracle_arm: o.oracle_arm,
                optimal_fraction: o.optimal_plays as f64 / horizon as f64,
                clamped_rewards: o.clamps,
            })
            .collect::<Vec<_>>();
        Ok(LearnerReport {
            learner,
            horizon,
            arm_count,
            power,
            total_kw: seeds.iter().map(|s| s.total_kw).sum::<f64>() / n,
            cpu_kw: seeds.iter().map(|s| s.cpu_kw).sum::<f64>() / n,
            min_total_kw: mean(&|o| o.min_total_w) / 1000.0,
            min_cpu_kw: mean(&|o| o.min_cpu_w) / 1000.0,
            optimal_fraction: seeds.iter().map(|s| s.optimal_fraction).sum::<f64>() / n,
            curve,
            seeds,
        })
    }

    pub fn final_regret(&self) -> f64 {
        self.curve.final_regret()
    }

    pub fn bound(&self) -> f64 {
        regret_bound(self.arm_count, self.horizon)
    }

    /// `R_t / t` of the seed-averaged curve.
    pub fn average_regret(&self, t: u64) -> f64 {
        self.curve.at(t) / t as f64
    }

    pub fn percent_below_bound(&self) -> f64 {
        100.0 * (1.0 - self.final_regret() / self.bound())
    }

    pub fn clamped_rewards(&self) -> u64 {
        self.seeds.iter().map(|s| s.clamped_rewards).sum()
    }
}

/// Output and parallelism settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub plots: bool,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Runs every seed of `exp` for one learner, in parallel, and aggregates.
/// With `records_dir`, per-seed record CSVs are written there.
pub fn run_learner(
    exp: &Experiment,
    kind: LearnerKind,
    jobs: usize,
    records_dir: Option<&Path>,
) -> Result<LearnerReport> {
    if let Some(dir) = records_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let outcomes: Vec<SeedOutcome> = pool(jobs)?.install(|| {
        exp.seeds
            .par_iter()
            .map(|&seed| match records_dir {
                Some(dir) => {
                    let mut writer = RecordWriter::create(&dir.join(format!("seed_{seed}.csv")))?;
                    let out = run_seed(exp, kind, seed, Some(&mut writer))?;
                    writer.finish()?;
                    Ok(out)
                }
                None => run_seed(exp, kind, seed, None),
            })
            .collect::<Result<_>>()
    })?;
    info!("{kind}: {} seeds x {} slots done", outcomes.len(), exp.horizon);
    LearnerReport::aggregate(kind, exp.env.arm_count(), exp.hyperslot, &outcomes)
}

/// Streams per-slot records to CSV.
pub struct RecordWriter {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl RecordWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        writer.write_record(["t", "arm", "reward", "raw_reward", "r_dl", "r_ul", "total_w", "cpu_w"])?;
        Ok(RecordWriter {
            path: path.to_path_buf(),
            writer,
        })
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }
}

impl SlotObserver for RecordWriter {
    fn on_slot(&mut self, view: &SlotView<'_>) -> Result<()> {
        let r = view.record;
        self.writer.write_record([
            r.t.to_string(),
            r.arm.to_string(),
            r.reward.to_string(),
            r.raw_reward.to_string(),
            r.r_dl.to_string(),
            r.r_ul.to_string(),
            r.total_w.to_string(),
            r.cpu_w.to_string(),
        ])?;
        Ok(())
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_regret_csv(path: &Path, curve: &RegretCurve) -> Result<()> {
    write_csv(
        path,
        &["t", "regret_mean", "regret_ci"],
        curve
            .mean
            .iter()
            .zip(&curve.ci)
            .enumerate()
            .map(|(i, (m, c))| vec![(i + 1).to_string(), m.to_string(), c.to_string()]),
    )
}

pub fn write_power_csv(path: &Path, power: &[(f64, f64)]) -> Result<()> {
    write_csv(
        path,
        &["hyperslot", "mean_total_w", "mean_cpu_w"],
        power
            .iter()
            .enumerate()
            .map(|(i, (t, c))| vec![(i + 1).to_string(), t.to_string(), c.to_string()]),
    )
}

const SUMMARY_HEADER: [&str; 9] = [
    "learner",
    "T",
    "seeds",
    "R_T",
    "R_T_over_T",
    "bound",
    "percent_below_bound",
    "total_kw",
    "cpu_kw",
];

fn summary_fields(r: &LearnerReport) -> Vec<String> {
    vec![
        r.learner.to_string(),
        r.horizon.to_string(),
        r.seeds.len().to_string(),
        r.final_regret().to_string(),
        (r.final_regret() / r.horizon as f64).to_string(),
        r.bound().to_string(),
        r.percent_below_bound().to_string(),
        r.total_kw.to_string(),
        r.cpu_kw.to_string(),
    ]
}

/// Summary CSV; with a reference learner, adds the oracle minimum and the
/// savings of every row relative to that reference.
pub fn write_summary_csv(path: &Path, reports: &[LearnerReport], reference: Option<&LearnerReport>) -> Result<()> {
    let mut header = SUMMARY_HEADER.to_vec();
    if reference.is_some() {
        header.extend(["min_total_kw", "min_cpu_kw", "saving_total_pct", "saving_cpu_pct"]);
    }
    let rows = reports.iter().map(|r| {
        let mut fields = summary_fields(r);
        if let Some(reference) = reference {
            let saving = |alg: f64, rf: f64, min: f64| match savings_percent(alg, rf, min) {
                Ok(v) => v.to_string(),
                Err(e) => {
                    warn!("{}: {e}", r.learner);
                    String::new()
                }
            };
            fields.extend([
                r.min_total_kw.to_string(),
                r.min_cpu_kw.to_string(),
                saving(r.total_kw, reference.total_kw, r.min_total_kw),
                saving(r.cpu_kw, reference.cpu_kw, r.min_cpu_kw),
            ]);
        }
        fields
    });
    write_csv(path, &header, rows)
}

fn write_metadata(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn report_metadata(r: &LearnerReport) -> serde_json::Value {
    serde_json::json!({
        "learner": r.learner,
        "optimal_play_fraction": r.optimal_fraction,
        "clamped_rewards": r.clamped_rewards(),
        "seeds": r.seeds,
    })
}

fn base_metadata(command: &str, config: &RunConfig, exp: &Experiment) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "config": config,
        "arm_count": exp.env.arm_count(),
        "reward_bounds": [exp.bounds.0, exp.bounds.1],
        "envelope": {
            "u_max": exp.envelope.u_max,
            "total_w": [exp.envelope.total_w.0, exp.envelope.total_w.1],
            "cpu_w": [exp.envelope.cpu_w.0, exp.envelope.cpu_w.1],
        },
        "randomness": "each seed re-draws both environment and learner randomness; \
                       learners run under the same seed see identical environment draws",
        "regret": "prefix-hindsight against the best fixed arm, averaged over seeds",
    })
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_plots(dir: &Path, reports: &[LearnerReport]) -> Result<()> {
    let regret: Vec<Series> = reports
        .iter()
        .map(|r| Series {
            name: r.learner.to_string(),
            points: r
                .curve
                .mean
                .iter()
                .enumerate()
                .map(|(i, m)| ((i + 1) as f64, m / (i + 1) as f64))
                .collect(),
        })
        .collect();
    let svg = line_chart("Average regret", "slot t", "R_t / t", &regret);
    let path = dir.join("regret.svg");
    fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;

    let power: Vec<Series> = reports
        .iter()
        .flat_map(|r| {
            let name = r.learner.to_string();
            [
                Series {
                    name: format!("{name} total"),
                    points: r.power.iter().enumerate().map(|(i, p)| ((i + 1) as f64, p.0)).collect(),
                },
                Series {
                    name: format!("{name} cpu"),
                    points: r.power.iter().enumerate().map(|(i, p)| ((i + 1) as f64, p.1)).collect(),
                },
            ]
        })
        .collect();
    let svg = line_chart("Mean power per hyper-slot", "hyper-slot", "W", &power);
    let path = dir.join("power.svg");
    fs::write(&path, svg).map_err(|e| Error::io(&path, e))
}

/// Runs the configured learner over all seeds and writes its result files.
pub fn run(config: &RunConfig, opts: &RunOptions) -> Result<LearnerReport> {
    let exp = Experiment::from_config(config)?;
    prepare_out_dir(&opts.out_dir)?;
    let report = run_learner(&exp, config.run.learner, opts.jobs, Some(&opts.out_dir.join("records")))?;
    write_regret_csv(&opts.out_dir.join("regret.csv"), &report.curve)?;
    write_power_csv(&opts.out_dir.join("power.csv"), &report.power)?;
    write_summary_csv(&opts.out_dir.join("summary.csv"), std::slice::from_ref(&report), None)?;
    let mut meta = base_metadata("run", config, &exp);
    meta["result"] = report_metadata(&report);
    write_metadata(&opts.out_dir.join("metadata.json"), &meta)?;
    if opts.plots {
        write_plots(&opts.out_dir, std::slice::from_ref(&report))?;
    }
    Ok(report)
}

/// Runs several learners on identical environment streams. Savings are
/// reported relative to the last listed learner when more than one is given.
pub fn compare(config: &RunConfig, learners: &[LearnerKind], opts: &RunOptions) -> Result<Vec<LearnerReport>> {
    if learners.is_empty() {
        return Err(Error::Config("compare needs at least one learner".into()));
    }
    let exp = Experiment::from_config(config)?;
    prepare_out_dir(&opts.out_dir)?;
    let mut reports = Vec::with_capacity(learners.len());
    for &kind in learners {
        let report = run_learner(&exp, kind, opts.jobs, None)?;
        let dir = opts.out_dir.join(kind.name());
        prepare_out_dir(&dir)?;
        write_regret_csv(&dir.join("regret.csv"), &report.curve)?;
        write_power_csv(&dir.join("power.csv"), &report.power)?;
        reports.push(report);
    }
    let reference = (reports.len() > 1).then(|| reports.last().expect("non-empty"));
    write_summary_csv(&opts.out_dir.join("summary.csv"), &reports, reference)?;
    let mut meta = base_metadata("compare", config, &exp);
    meta["reference_learner"] = serde_json::json!(reference.map(|r| r.learner));
    meta["results"] = reports.iter().map(report_metadata).collect();
    write_metadata(&opts.out_dir.join("metadata.json"), &meta)?;
    if opts.plots {
        write_plots(&opts.out_dir, &reports)?;
    }
    Ok(reports)
}

/// Runs the configured learner once per `delta` and writes the hyper-slot
/// power series of each to `power_delta.csv`
/// (`delta,hyperslot,mean_total_w,mean_cpu_w`).
pub fn sweep_delta(config: &RunConfig, deltas: &[f64], opts: &RunOptions) -> Result<Vec<(f64, LearnerReport)>> {
    if deltas.is_empty() {
        return Err(Error::Config("sweep-delta needs at least one delta".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
        return Err(Error::Config(format!("delta must be positive, got {d}")));
    }
    if config.reward.f_min.is_some() {
        warn!("sweep-delta recomputes reward bounds per delta; reward.f_min/f_max are ignored");
    }
    let base = Experiment::from_config(config)?;
    prepare_out_dir(&opts.out_dir)?;
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let exp = base.with_delta(delta)?;
        out.push((delta, run_learner(&exp, config.run.learner, opts.jobs, None)?));
    }
    write_csv(
        &opts.out_dir.join("power_delta.csv"),
        &["delta", "hyperslot", "mean_total_w", "mean_cpu_w"],
        out.iter().flat_map(|(delta, r)| {
            r.power.iter().enumerate().map(move |(i, (t, c))| {
                vec![delta.to_string(), (i + 1).to_string(), t.to_string(), c.to_string()]
            })
        }),
    )?;
    let mut header = vec!["delta"];
    header.extend(SUMMARY_HEADER);
    write_csv(
        &opts.out_dir.join("summary.csv"),
        &header,
        out.iter().map(|(delta, r)| {
            let mut row = vec![delta.to_string()];
            row.extend(summary_fields(r));
            row
        }),
    )?;
    let mut meta = base_metadata("sweep-delta", config, &base);
    meta["deltas"] = serde_json::json!(deltas);
    meta["results"] = out.iter().map(|(_, r)| report_metadata(r)).collect();
    write_metadata(&opts.out_dir.join("metadata.json"), &meta)?;
    if opts.plots {
        let series: Vec<Series> = out
            .iter()
            .map(|(delta, r)| Series {
                name: format!("delta={delta}"),
                points: r.power.iter().enumerate().map(|(i, p)| ((i + 1) as f64, p.0)).collect(),
            })
            .collect();
        let path = opts.out_dir.join("power_delta.svg");
        fs::write(&path, line_chart("Total power per hyper-slot", "hyper-slot", "W", &series))
            .map_err(|e| Error::io(&path, e))?;
    }
    Ok(out)
}

/// Exports the configured surrogate as a trace CSV at bucket midpoints.
pub fn gen_trace(config: &RunConfig, path: &Path) -> Result<usize> {
    let env = config.environment()?;
    let table = env.to_trace(config.env.bucket)?;
    table.write(path)?;
    Ok(table.len())
}
