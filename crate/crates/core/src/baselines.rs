//! Online learners behind one interface, plus the hindsight oracle.
//!
//! Every learner picks an arm from past feedback only. After the slot it gets
//! the normalized reward of the arm it played and the context that was in
//! force, which it may use from the next slot on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::environment::{Regime, SlotContext};
use crate::error::{Error, Result};
use crate::learner::{ArmDistribution, Exp3};
use crate::rng::SlotRng;

/// Bandit-feedback learner.
pub trait Learner: Send {
    /// Arm to play at slot `t` (1-based).
    fn select(&mut self, t: u64) -> Result<usize>;

    /// Reward of the arm played this slot and the context observed during it.
    fn feedback(&mut self, arm: usize, reward: f64, observed: Option<&SlotContext>) -> Result<()>;

    /// Sampling distribution behind the last `select`, for randomized learners.
    fn last_distribution(&self) -> Option<&ArmDistribution> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Bsvbs,
    EpsilonGreedy,
    Ucb1,
    StaleCtxUcb,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::Bsvbs,
        LearnerKind::EpsilonGreedy,
        LearnerKind::Ucb1,
        LearnerKind::StaleCtxUcb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Bsvbs => "bsvbs",
            LearnerKind::EpsilonGreedy => "epsilon_greedy",
            LearnerKind::Ucb1 => "ucb1",
            LearnerKind::StaleCtxUcb => "stale_ctx_ucb",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown learner `{s}` (expected bsvbs, epsilon_greedy, ucb1 or stale_ctx_ucb)"
                ))
            })
    }
}

/// Which bucket the stale-context learner credits a reward to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StaleFeedback {
    /// The stale bucket that drove the selection.
    #[default]
    Stale,
    /// The bucket actually in force when the arm was applied.
    Observed,
}

/// Baseline hyperparameters (`baseline.*` in the run config).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineParams {
    pub epsilon: f64,
    pub ucb_c: f64,
    pub stale_c: f64,
    pub stale_feedback: StaleFeedback,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams {
            epsilon: 0.1,
            ucb_c: std::f64::consts::SQRT_2,
            stale_c: 1.0,
            stale_feedback: StaleFeedback::Stale,
        }
    }
}

impl BaselineParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("baseline.epsilon must lie in [0, 1], got {}", self.epsilon)));
        }
        if !(self.ucb_c >= 0.0 && self.ucb_c.is_finite()) || !(self.stale_c >= 0.0 && self.stale_c.is_finite()) {
            return Err(Error::Config("UCB confidence multipliers must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Builds a learner over `arm_count` arms. `horizon = None` selects the
/// anytime exploration schedule for Exp3; other learners ignore it.
pub fn build_learner(
    kind: LearnerKind,
    arm_count: usize,
    horizon: Option<u64>,
    params: &BaselineParams,
    rng: SlotRng,
) -> Result<Box<dyn Learner>> {
    params.validate()?;
    if arm_count == 0 {
        return Err(Error::DegenerateSpace(0));
    }
    Ok(match kind {
        LearnerKind::Bsvbs => Box::new(Exp3Learner::new(match horizon {
            Some(t) => Exp3::new(arm_count, t, rng)?,
            None => Exp3::anytime(arm_count, rng)?,
        })),
        LearnerKind::EpsilonGreedy => Box::new(EpsilonGreedy::new(arm_count, params.epsilon, rng)),
        LearnerKind::Ucb1 => Box::new(Ucb1::new(arm_count, params.ucb_c)),
        LearnerKind::StaleCtxUcb => Box::new(StaleContextUcb::new(
            arm_count,
            params.stale_c,
            params.stale_feedback,
        )),
    })
}

/// Exp3 driven through the [`Learner`] interface.
#[derive(Debug, Clone)]
pub struct Exp3Learner {
    inner: Exp3,
    last: Option<ArmDistribution>,
}

impl Exp3Learner {
    pub fn new(inner: Exp3) -> Self {
        Exp3Learner { inner, last: None }
    }

    pub fn inner(&self) -> &Exp3 {
        &self.inner
    }
}

impl Learner for Exp3Learner {
    fn select(&mut self, _t: u64) -> Result<usize> {
        let dist = self.inner.distribution();
        let arm = self.inner.sample(&dist);
        self.last = Some(dist);
        Ok(arm)
    }

    fn feedback(&mut self, arm: usize, reward: f64, _observed: Option<&SlotContext>) -> Result<()> {
        self.inner.update(arm, reward)
    }

    fn last_distribution(&self) -> Option<&ArmDistribution> {
        self.last.as_ref()
    }
}

/// Running visit count and mean reward per arm.
#[derive(Debug, Clone, PartialEq)]
struct ArmStats {
    counts: Vec<u64>,
    means: Vec<f64>,
    total: u64,
}

impl ArmStats {
    fn new(arm_count: usize) -> Self {
        ArmStats {
            counts: vec![0; arm_count],
            means: vec![0.0; arm_count],
            total: 0,
        }
    }

    fn record(&mut self, arm: usize, reward: f64) -> Result<()> {
        let cardinality = self.counts.len();
        let n = self
            .counts
            .get_mut(arm)
            .ok_or(Error::IndexOutOfRange { index: arm, cardinality })?;
        *n += 1;
        self.means[arm] += (reward - self.means[arm]) / *n as f64;
        self.total += 1;
        Ok(())
    }

    fn first_unplayed(&self) -> Option<usize> {
        self.counts.iter().position(|n| *n == 0)
    }

    /// Index of the largest score, lowest index on ties.
    fn argmax(&self, score: impl Fn(usize) -> f64) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for arm in 0..self.counts.len() {
            let s = score(arm);
            if s > best_score {
                best = arm;
                best_score = s;
            }
        }
        best
    }

    fn ucb(&self, c: f64) -> usize {
        if let Some(arm) = self.first_unplayed() {
            return arm;
        }
        let log_n = (self.total as f64).ln();
        self.argmax(|arm| self.means[arm] + c * (log_n / self.counts[arm] as f64).sqrt())
    }
}

/// Explores uniformly with probability `epsilon`, otherwise plays the best
/// empirical mean. Unplayed arms are tried first, in index order.
#[derive(Debug, Clone)]
pub struct EpsilonGreedy {
    stats: ArmStats,
    epsilon: f64,
    rng: SlotRng,
}

impl EpsilonGreedy {
    pub fn new(arm_count: usize, epsilon: f64, rng: SlotRng) -> Self {
        EpsilonGreedy {
            stats: ArmStats::new(arm_count),
            epsilon,
            rng,
        }
    }
}

impl Learner for EpsilonGreedy {
    fn select(&mut self, _t: u64) -> Result<usize> {
        let k = self.stats.counts.len();
        if self.epsilon > 0.0 && self.rng.next_f64() < self.epsilon {
            return Ok(((self.rng.next_f64() * k as f64) as usize).min(k - 1));
        }
        if let Some(arm) = self.stats.first_unplayed() {
            return Ok(arm);
        }
        Ok(self.stats.argmax(|arm| self.stats.means[arm]))
    }

    fn feedback(&mut self, arm: usize, reward: f64, _observed: Option<&SlotContext>) -> Result<()> {
        self.stats.record(arm, reward)
    }
}

/// UCB1: `mean + c sqrt(ln n / n_arm)`, unplayed arms first in index order.
#[derive(Debug, Clone)]
pub struct Ucb1 {
    stats: ArmStats,
    c: f64,
}

impl Ucb1 {
    pub fn new(arm_count: usize, c: f64) -> Self {
        Ucb1 {
            stats: ArmStats::new(arm_count),
            c,
        }
    }
}

impl Learner for Ucb1 {
    fn select(&mut self, _t: u64) -> Result<usize> {
        Ok(self.stats.ucb(self.c))
    }

    fn feedback(&mut self, arm: usize, reward: f64, _observed: Option<&SlotContext>) -> Result<()> {
        self.stats.record(arm, reward)
    }
}

/// Contextual UCB that acts on the context observed one slot earlier.
///
/// Keeps one [`Ucb1`]-style table per regime. Selection at slot `t` uses the
/// regime seen at `t - 1` (high at `t = 1`).
#[derive(Debug, Clone)]
pub struct StaleContextUcb {
    high: ArmStats,
    low: ArmStats,
    c: f64,
    mode: StaleFeedback,
    stale: Regime,
}

impl StaleContextUcb {
    pub fn new(arm_count: usize, c: f64, mode: StaleFeedback) -> Self {
        StaleContextUcb {
            high: ArmStats::new(arm_count),
            low: ArmStats::new(arm_count),
            c,
            mode,
            stale: Regime::High,
        }
    }

    /// Regime the next selection will be based on.
    pub fn stale_regime(&self) -> Regime {
        self.stale
    }

    /// Visit counts of one regime's table.
    pub fn counts(&self, regime: Regime) -> &[u64] {
        &self.table(regime).counts
    }

    pub fn means(&self, regime: Regime) -> &[f64] {
        &self.table(regime).means
    }

    fn table(&self, regime: Regime) -> &ArmStats {
        match regime {
            Regime::High => &self.high,
            Regime::Low => &self.low,
        }
    }

    fn table_mut(&mut self, regime: Regime) -> &mut ArmStats {
        match regime {
            Regime::High => &mut self.high,
            Regime::Low => &mut self.low,
        }
    }
}

impl Learner for StaleContextUcb {
    fn select(&mut self, _t: u64) -> Result<usize> {
        Ok(self.table(self.stale).ucb(self.c))
    }

    fn feedback(&mut self, arm: usize, reward: f64, observed: Option<&SlotContext>) -> Result<()> {
        let credited = match (self.mode, observed) {
            (StaleFeedback::Observed, Some(ctx)) => ctx.regime,
            _ => self.stale,
        };
        self.table_mut(credited).record(arm, reward)?;
        if let Some(ctx) = observed {
            self.stale = ctx.regime;
        }
        Ok(())
    }
}

/// Best fixed arm in hindsight: argmax of the column sums (lowest index on
/// ties) and its cumulative reward.
pub fn oracle_best_fixed(rows: &[Vec<f64>]) -> Result<(usize, f64)> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Shape("no reward rows".into()))?;
    let mut sums = vec![0.0; first.len()];
    for (t, row) in rows.iter().enumerate() {
        if row.len() != sums.len() {
            return Err(Error::Shape(format!(
                "row {t} has {} entries, expected {}",
                row.len(),
                sums.len()
            )));
        }
        for (s, r) in sums.iter_mut().zip(row) {
            *s += r;
        }
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (arm, s) in sums.into_iter().enumerate() {
        if s > best.1 {
            best = (arm, s);
        }
    }
    Ok(best)
}
