//! Per-slot utility, the power-penalized reward and its `[0, 1]` scaling.
//!
//! Utility is `ln(1 + R_dl/d_dl) + ln(1 + R_ul/d_ul)` (natural log, zero when
//! either backlog is empty). The raw reward subtracts `delta` times the
//! selected power reading, and the scaler maps it affinely onto `[0, 1]`
//! using bounds fixed before the run.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Data delivered and demanded in one slot, in Mbit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrafficOutcome {
    pub r_dl: f64,
    pub r_ul: f64,
    pub d_dl: f64,
    pub d_ul: f64,
}

/// Power drawn during one slot, in watts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerReading {
    pub total_w: f64,
    pub cpu_w: f64,
}

/// Which power reading enters the reward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerSource {
    /// DU and RU share one supply: the whole platform counts.
    #[default]
    Total,
    /// Separate supplies: only the BBU/CPU draw counts.
    Cpu,
}

impl PowerReading {
    pub fn get(&self, source: PowerSource) -> f64 {
        match source {
            PowerSource::Total => self.total_w,
            PowerSource::Cpu => self.cpu_w,
        }
    }
}

pub fn utility(outcome: &TrafficOutcome) -> f64 {
    if outcome.d_dl <= 0.0 || outcome.d_ul <= 0.0 {
        return 0.0;
    }
    (outcome.r_dl / outcome.d_dl).ln_1p() + (outcome.r_ul / outcome.d_ul).ln_1p()
}

/// Reward bounds `(f_min, f_max)` from the extremes of utility and power.
///
/// Utility is never negative, so `f_min = -delta * p_max` and
/// `f_max = u_max - delta * p_min`.
pub fn scaler_bounds(delta: f64, u_max: f64, p_min: f64, p_max: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0) || !(u_max > 0.0) || !(p_min >= 0.0) || !(p_max >= p_min) {
        return Err(Error::Config(format!(
            "invalid reward bound inputs: delta={delta}, u_max={u_max}, p_min={p_min}, p_max={p_max}"
        )));
    }
    let f_min = -delta * p_max;
    let f_max = u_max - delta * p_min;
    if f_max <= f_min {
        return Err(Error::Config(format!(
            "degenerate reward bounds f_min={f_min}, f_max={f_max}"
        )));
    }
    Ok((f_min, f_max))
}

/// Reward weighting and normalization for one run.
///
/// Out-of-range raw rewards are clamped and counted rather than rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardScaler {
    delta: f64,
    f_min: f64,
    f_max: f64,
    power_source: PowerSource,
    clamp_count: Cell<u64>,
}

impl RewardScaler {
    pub fn new(delta: f64, f_min: f64, f_max: f64, power_source: PowerSource) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Config(format!("delta must be positive, got {delta}")));
        }
        if !(f_max > f_min) || !f_min.is_finite() || !f_max.is_finite() {
            return Err(Error::Config(format!(
                "reward bounds need f_max > f_min, got [{f_min}, {f_max}]"
            )));
        }
        Ok(RewardScaler {
            delta,
            f_min,
            f_max,
            power_source,
            clamp_count: Cell::new(0),
        })
    }

    /// Builds the scaler from utility and power extremes via [`scaler_bounds`].
    pub fn from_envelope(
        delta: f64,
        u_max: f64,
        p_min: f64,
        p_max: f64,
        power_source: PowerSource,
    ) -> Result<Self> {
        let (f_min, f_max) = scaler_bounds(delta, u_max, p_min, p_max)?;
        RewardScaler::new(delta, f_min, f_max, power_source)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.f_min, self.f_max)
    }

    pub fn power_source(&self) -> PowerSource {
        self.power_source
    }

    pub fn clamp_count(&self) -> u64 {
        self.clamp_count.get()
    }

    /// `u - delta * p`, with `p` taken from the configured power source.
    pub fn raw_reward(&self, u: f64, power: &PowerReading) -> f64 {
        u - self.delta * power.get(self.power_source)
    }

    /// Affine map onto `[0, 1]`; values outside are clamped and counted.
    pub fn normalize(&self, f_raw: f64) -> f64 {
        let f = (f_raw - self.f_min) / (self.f_max - self.f_min);
        if (0.0..=1.0).contains(&f) {
            f
        } else {
            self.clamp_count.set(self.clamp_count.get() + 1);
            f.clamp(0.0, 1.0)
        }
    }

    /// Normalized reward of one outcome without touching the clamp counter.
    pub fn score(&self, outcome: &TrafficOutcome, power: &PowerReading) -> f64 {
        let f = (self.raw_reward(utility(outcome), power) - self.f_min) / (self.f_max - self.f_min);
        f.clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    fn outcome(r_dl: f64, r_ul: f64, d_dl: f64, d_ul: f64) -> TrafficOutcome {
        TrafficOutcome { r_dl, r_ul, d_dl, d_ul }
    }

    #[test]
    fn utility_cases() {
        assert_eq!(utility(&outcome(5.0, 5.0, 0.0, 10.0)), 0.0);
        assert_eq!(utility(&outcome(5.0, 0.0, 10.0, 0.0)), 0.0);
        assert_abs_diff_eq!(
            utility(&outcome(32.0, 23.0, 32.0, 23.0)),
            1.386_294_361_119_890_6,
            epsilon = 1e-12
        );
        assert_eq!(utility(&outcome(0.0, 0.0, 3.0, 4.0)), 0.0);
    }

    #[test]
    fn raw_reward_cases() {
        let s = RewardScaler::new(1.0, -20.0, 11.14, PowerSource::Total).unwrap();
        let p = PowerReading { total_w: 13.7, cpu_w: 5.0 };
        assert_abs_diff_eq!(s.raw_reward(1.386, &p), -12.314, epsilon = 1e-12);

        let s = RewardScaler::new(1e-9, -1.0, 2.0, PowerSource::Total).unwrap();
        assert_abs_diff_eq!(s.raw_reward(1.0, &p), 1.0, epsilon = 1e-7);

        let s = RewardScaler::new(100.0, -2000.0, 0.0, PowerSource::Cpu).unwrap();
        let p = PowerReading { total_w: 99.0, cpu_w: 10.0 };
        assert_eq!(s.raw_reward(0.0, &p), -1000.0);
    }

    #[test]
    fn bounds_cases() {
        let (lo, hi) = scaler_bounds(1.0, 16.14, 5.0, 20.0).unwrap();
        assert_abs_diff_eq!(lo, -20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 11.14, epsilon = 1e-12);
        let (lo, hi) = scaler_bounds(1e-12, 16.14, 0.0, 0.0).unwrap();
        assert_eq!(lo, 0.0);
        assert_eq!(hi, 16.14);
        let (lo, hi) = scaler_bounds(100.0, 16.14, 5.0, 20.0).unwrap();
        assert_abs_diff_eq!(lo, -2000.0, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, -483.86, epsilon = 1e-9);
        assert!(scaler_bounds(0.0, 1.0, 1.0, 2.0).is_err());
        assert!(scaler_bounds(1.0, 1.0, 3.0, 2.0).is_err());
    }

    #[test]
    fn normalize_anchors_and_clamping() {
        let s = RewardScaler::new(1.0, -20.0, 11.14, PowerSource::Total).unwrap();
        assert_eq!(s.normalize(-20.0), 0.0);
        assert_eq!(s.normalize(11.14), 1.0);
        assert_abs_diff_eq!(s.normalize(-12.314), 0.246_820_809_248_554_9, epsilon = 1e-12);
        assert_eq!(s.clamp_count(), 0);
        assert_eq!(s.normalize(12.0), 1.0);
        assert_eq!(s.normalize(-25.0), 0.0);
        assert_eq!(s.clamp_count(), 2);
    }

    #[test]
    fn scaler_rejects_bad_parameters() {
        assert!(RewardScaler::new(0.0, 0.0, 1.0, PowerSource::Total).is_err());
        assert!(RewardScaler::new(1.0, 1.0, 1.0, PowerSource::Total).is_err());
    }

    #[test]
    fn power_source_parses_lowercase() {
        let s: PowerSource = serde_json::from_str("\"cpu\"").unwrap();
        assert_eq!(s, PowerSource::Cpu);
        assert!(serde_json::from_str::<PowerSource>("\"gpu\"").is_err());
    }

    proptest! {
        #[test]
        fn normalize_is_monotone(a in -100.0f64..100.0, b in -100.0f64..100.0) {
            let s = RewardScaler::new(1.0, -20.0, 11.0, PowerSource::Total).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(s.normalize(lo) <= s.normalize(hi));
        }

        #[test]
        fn normalize_preserves_argmax(raw in prop::collection::vec(-20.0f64..11.0, 2..32)) {
            let s = RewardScaler::new(1.0, -20.0, 11.0, PowerSource::Total).unwrap();
            let argmax = |v: &[f64]| v.iter().enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, x)| if *x > best.1 { (i, *x) } else { best }).0;
            let scaled: Vec<f64> = raw.iter().map(|f| s.normalize(*f)).collect();
            prop_assert_eq!(argmax(&raw), argmax(&scaled));
        }

        #[test]
        fn utility_monotone_in_delivery(d_dl in 0.01f64..40.0, d_ul in 0.01f64..40.0, x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            let a = utility(&outcome(lo * d_dl, 0.5 * d_ul, d_dl, d_ul));
            let b = utility(&outcome(hi * d_dl, 0.5 * d_ul, d_dl, d_ul));
            prop_assert!(a <= b);
            let c = utility(&outcome(0.5 * d_dl, lo * d_ul, d_dl, d_ul));
            let d = utility(&outcome(0.5 * d_dl, hi * d_ul, d_dl, d_ul));
            prop_assert!(c <= d);
        }
    }
}
