//! Exp3 with uniform exploration: the bandit scheduler itself.
//!
//! Each slot the learner mixes a uniform exploration term with the
//! weight-proportional exploitation term,
//!
//! ```text
//! y(x) = gamma/|X| + (1 - gamma) * w(x) / sum_x' w(x')
//! ```
//!
//! samples an arm from `y`, and after observing the normalized reward `f`
//! of that arm only, multiplies its weight by `exp(gamma * (f / y(x)) / |X|)`.
//!
//! Weights are kept as natural logarithms. The importance-weighted estimate
//! can reach `|X| / gamma` in a single slot, so the raw weights overflow an
//! `f64` within a few thousand slots; the ratio above is evaluated by
//! subtracting the largest log-weight before exponentiating.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::rng::SlotRng;

/// Exploration rate for a known horizon:
/// `min(1, sqrt(|X| ln|X| / ((e - 1) T)))`.
pub fn init_gamma(arm_count: usize, horizon: u64) -> f64 {
    let k = arm_count as f64;
    (k * k.ln() / ((E - 1.0) * horizon as f64)).sqrt().min(1.0)
}

/// Anytime exploration rate: the fixed-horizon value with `T` replaced by the
/// current slot `t`.
pub fn adaptive_gamma(arm_count: usize, t: u64) -> f64 {
    init_gamma(arm_count, t.max(1))
}

/// Upper bound on the expected static regret after `horizon` slots:
/// `2 sqrt(e - 1) sqrt(T |X| ln|X|)`.
pub fn regret_bound(arm_count: usize, horizon: u64) -> f64 {
    let k = arm_count as f64;
    2.0 * (E - 1.0).sqrt() * (horizon as f64 * k * k.ln()).sqrt()
}

/// A probability vector over the arms.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmDistribution {
    probabilities: Vec<f64>,
}

impl ArmDistribution {
    /// Wraps an explicit probability vector (entries in `[0, 1]`, summing to 1).
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::Shape("empty distribution".into()));
        }
        if probabilities
            .iter()
            .any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0)
        {
            return Err(Error::Shape("probabilities must lie in [0, 1]".into()));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Shape(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(ArmDistribution { probabilities })
    }

    pub fn uniform(arm_count: usize) -> Self {
        ArmDistribution {
            probabilities: vec![1.0 / arm_count as f64; arm_count],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn get(&self, arm: usize) -> f64 {
        self.probabilities[arm]
    }
}

/// Importance-weighted reward estimate for `arm` after `chosen` was played:
/// `reward / y(chosen)` when `arm == chosen`, otherwise 0.
pub fn estimate(reward: f64, dist: &ArmDistribution, chosen: usize, arm: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&reward) {
        return Err(Error::RewardOutOfRange(reward));
    }
    if arm != chosen {
        return Ok(0.0);
    }
    Ok(reward / dist.get(chosen))
}

/// Draws an arm by inverse CDF from one uniform variate.
pub fn sample_index(dist: &ArmDistribution, rng: &mut SlotRng) -> usize {
    let u = rng.next_f64();
    let mut cumulative = 0.0;
    for (arm, p) in dist.probabilities().iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return arm;
        }
    }
    // rounding left the total slightly below u
    dist.probabilities()
        .iter()
        .rposition(|p| *p > 0.0)
        .unwrap_or(0)
}

/// State of the scheduler.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3 {
    log_weights: Vec<f64>,
    gamma: f64,
    t: u64,
    /// 0 selects anytime mode.
    horizon: u64,
    rng: SlotRng,
}

impl Exp3 {
    /// Fixed-horizon learner with all weights equal to 1.
    pub fn new(arm_count: usize, horizon: u64, rng: SlotRng) -> Result<Self> {
        if arm_count < 2 {
            return Err(Error::DegenerateSpace(arm_count));
        }
        if horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        Ok(Exp3 {
            log_weights: vec![0.0; arm_count],
            gamma: init_gamma(arm_count, horizon),
            t: 1,
            horizon,
            rng,
        })
    }

    /// Horizon-free learner whose exploration rate decays as `1/sqrt(t)`.
    pub fn anytime(arm_count: usize, rng: SlotRng) -> Result<Self> {
        if arm_count < 2 {
            return Err(Error::DegenerateSpace(arm_count));
        }
        Ok(Exp3 {
            log_weights: vec![0.0; arm_count],
            gamma: adaptive_gamma(arm_count, 1),
            t: 1,
            horizon: 0,
            rng,
        })
    }

    pub fn arm_count(&self) -> usize {
        self.log_weights.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Current slot, starting at 1.
    pub fn slot(&self) -> u64 {
        self.t
    }

    pub fn horizon(&self) -> Option<u64> {
        (self.horizon > 0).then_some(self.horizon)
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Replaces the log-weights; used to set up specific states in tests and replays.
    pub fn set_log_weights(&mut self, log_weights: Vec<f64>) -> Result<()> {
        if log_weights.len() != self.arm_count() {
            return Err(Error::Shape(format!(
                "expected {} log-weights, got {}",
                self.arm_count(),
                log_weights.len()
            )));
        }
        if log_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Shape("log-weights must be finite".into()));
        }
        self.log_weights = log_weights;
        Ok(())
    }

    /// Overrides the exploration rate (must lie in `[0, 1]`).
    pub fn set_gamma(&mut self, gamma: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Config(format!("gamma {gamma} outside [0, 1]")));
        }
        self.gamma = gamma;
        Ok(())
    }

    pub fn distribution(&self) -> ArmDistribution {
        let k = self.arm_count() as f64;
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let shifted: Vec<f64> = self.log_weights.iter().map(|w| (w - max).exp()).collect();
        let total: f64 = shifted.iter().sum();
        let floor = self.gamma / k;
        ArmDistribution {
            probabilities: shifted
                .into_iter()
                .map(|w| floor + (1.0 - self.gamma) * w / total)
                .collect(),
        }
    }

    /// Samples an arm from `dist`, advancing the learner's generator.
    pub fn sample(&mut self, dist: &ArmDistribution) -> usize {
        sample_index(dist, &mut self.rng)
    }

    /// Applies the exponential update for the arm played this slot and moves
    /// to the next slot. `reward` must already be normalized to `[0, 1]`.
    pub fn update(&mut self, chosen: usize, reward: f64) -> Result<()> {
        if chosen >= self.arm_count() {
            return Err(Error::IndexOutOfRange {
                index: chosen,
                cardinality: self.arm_count(),
            });
        }
        let dist = self.distribution();
        let phi = estimate(reward, &dist, chosen, chosen)?;
        self.log_weights[chosen] += self.gamma * phi / self.arm_count() as f64;
        self.t += 1;
        if self.horizon == 0 {
            self.gamma = adaptive_gamma(self.arm_count(), self.t);
        }
        Ok(())
    }
}
