//! Regret curves, power aggregation and savings.
//!
//! Regret at slot `t` is prefix-hindsight: the best fixed arm is chosen from
//! the reward sums up to `t`, so `R_t / t` is meaningful at every `t` and
//! `R_T` is the usual static regret.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::regret_bound;

/// One slot of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub t: u64,
    pub arm: usize,
    /// Normalized reward of the played arm.
    pub reward: f64,
    pub raw_reward: f64,
    pub r_dl: f64,
    pub r_ul: f64,
    pub total_w: f64,
    pub cpu_w: f64,
    /// Normalized reward of every arm this slot, when kept.
    #[serde(skip)]
    pub row: Option<Vec<f64>>,
}

/// Streaming prefix-hindsight regret for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTracker {
    sums: Vec<f64>,
    realized: f64,
}

impl RegretTracker {
    pub fn new(arm_count: usize) -> Self {
        RegretTracker {
            sums: vec![0.0; arm_count],
            realized: 0.0,
        }
    }

    /// Adds one slot and returns `R_t`.
    pub fn push(&mut self, row: &[f64], reward: f64) -> Result<f64> {
        if row.len() != self.sums.len() {
            return Err(Error::Shape(format!(
                "reward row has {} entries, expected {}",
                row.len(),
                self.sums.len()
            )));
        }
        for (s, r) in self.sums.iter_mut().zip(row) {
            *s += r;
        }
        self.realized += reward;
        Ok(self.regret())
    }

    pub fn regret(&self) -> f64 {
        self.best().1 - self.realized
    }

    /// Best fixed arm so far (lowest index on ties) and its reward sum.
    pub fn best(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (arm, s) in self.sums.iter().enumerate() {
            if *s > best.1 {
                best = (arm, *s);
            }
        }
        best
    }

    pub fn realized(&self) -> f64 {
        self.realized
    }
}

/// Seed-averaged regret with 95% normal-approximation half-widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub mean: Vec<f64>,
    pub ci: Vec<f64>,
    pub seeds: usize,
}

impl RegretCurve {
    /// Averages per-seed regret series pointwise.
    pub fn from_series(series: &[Vec<f64>]) -> Result<Self> {
        let first = series
            .first()
            .ok_or_else(|| Error::Shape("no runs to average".into()))?;
        let horizon = first.len();
        if series.iter().any(|s| s.len() != horizon) {
            return Err(Error::Shape("runs have different horizons".into()));
        }
        let n = series.len() as f64;
        let mut mean = Vec::with_capacity(horizon);
        let mut ci = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let m = series.iter().map(|s| s[t]).sum::<f64>() / n;
            let half = if series.len() > 1 {
                let var = series.iter().map(|s| (s[t] - m).powi(2)).sum::<f64>() / (n - 1.0);
                1.96 * (var / n).sqrt()
            } else {
                0.0
            };
            mean.push(m);
            ci.push(half);
        }
        Ok(RegretCurve {
            mean,
            ci,
            seeds: series.len(),
        })
    }

    pub fn horizon(&self) -> u64 {
        self.mean.len() as u64
    }

    /// `R_t` at slot `t` (1-based).
    pub fn at(&self, t: u64) -> f64 {
        self.mean[(t - 1) as usize]
    }

    pub fn final_regret(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }
}

/// Regret curve from stored records; every record must carry its row.
pub fn regret_curve(runs: &[Vec<RunRecord>]) -> Result<RegretCurve> {
    let mut series = Vec::with_capacity(runs.len());
    for (run, records) in runs.iter().enumerate() {
        let mut tracker: Option<RegretTracker> = None;
        let mut values = Vec::with_capacity(records.len());
        for rec in records {
            let row = rec
                .row
                .as_ref()
                .ok_or(Error::MissingRows { run, slot: rec.t })?;
            let tracker = tracker.get_or_insert_with(|| RegretTracker::new(row.len()));
            values.push(tracker.push(row, rec.reward)?);
        }
        series.push(values);
    }
    RegretCurve::from_series(&series)
}

/// `R_t / t`.
pub fn average_regret(curve: &RegretCurve, t: u64) -> f64 {
    curve.at(t) / t as f64
}

/// `R_T` over the regret bound; `1 - ratio` is the fraction below the bound.
pub fn bound_ratio(curve: &RegretCurve, arm_count: usize, horizon: u64) -> f64 {
    curve.at(horizon) / regret_bound(arm_count, horizon)
}

/// Mean of consecutive `width`-slot windows. A trailing partial window is
/// dropped with a warning.
pub fn hyperslot_power(watts: &[f64], width: usize) -> Vec<f64> {
    let width = width.max(1);
    let rest = watts.len() % width;
    if rest != 0 {
        warn!("dropping the last {rest} slots: {} is not a multiple of the hyper-slot width {width}", watts.len());
    }
    watts
        .chunks_exact(width)
        .map(|w| w.iter().sum::<f64>() / width as f64)
        .collect()
}

/// Share of the reference's gap to the minimum that the algorithm closes,
/// in percent: `100 (ref - alg) / (ref - min)`.
pub fn savings_percent(alg_kw: f64, ref_kw: f64, min_kw: f64) -> Result<f64> {
    if ref_kw == min_kw {
        return Err(Error::UndefinedSavings(ref_kw));
    }
    Ok(100.0 * (ref_kw - alg_kw) / (ref_kw - min_kw))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    fn records(rows: &[Vec<f64>], arms: &[usize]) -> Vec<RunRecord> {
        rows.iter()
            .zip(arms)
            .enumerate()
            .map(|(i, (row, arm))| RunRecord {
                t: i as u64 + 1,
                arm: *arm,
                reward: row[*arm],
                raw_reward: 0.0,
                r_dl: 0.0,
                r_ul: 0.0,
                total_w: 0.0,
                cpu_w: 0.0,
                row: Some(row.clone()),
            })
            .collect()
    }

    #[test]
    fn oracle_player_has_zero_regret() {
        let rows = vec![vec![0.3, 0.9, 0.1]; 50];
        let curve = regret_curve(&[records(&rows, &[1; 50])]).unwrap();
        assert!(curve.mean.iter().all(|r| *r == 0.0));
        assert_eq!(average_regret(&curve, 50), 0.0);
    }

    #[test]
    fn constant_gap_grows_linearly() {
        let rows = vec![vec![0.2, 0.8]; 100];
        let curve = regret_curve(&[records(&rows, &[0; 100])]).unwrap();
        for t in 1..=100 {
            assert_abs_diff_eq!(curve.at(t), 0.6 * t as f64, epsilon = 1e-9);
            assert_abs_diff_eq!(average_regret(&curve, t), 0.6, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_seed_is_its_own_mean() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![(i % 3) as f64 / 3.0, 0.5]).collect();
        let arms: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let recs = records(&rows, &arms);
        let curve = regret_curve(std::slice::from_ref(&recs)).unwrap();
        let mut tracker = RegretTracker::new(2);
        for (rec, m) in recs.iter().zip(&curve.mean) {
            assert_eq!(tracker.push(rec.row.as_ref().unwrap(), rec.reward).unwrap(), *m);
        }
        assert!(curve.ci.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn prefix_hindsight_switches_best_arm() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]];
        let curve = regret_curve(&[records(&rows, &[0, 0, 0])]).unwrap();
        assert_eq!(curve.mean, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn missing_rows_are_reported() {
        let mut recs = records(&[vec![0.1, 0.2], vec![0.3, 0.4]], &[0, 1]);
        recs[1].row = None;
        match regret_curve(&[recs]) {
            Err(Error::MissingRows { run: 0, slot: 2 }) => {}
            other => panic!("expected missing rows, got {other:?}"),
        }
    }

    #[test]
    fn bound_ratio_cases() {
        let bound = regret_bound(16, 100);
        let at_bound = RegretCurve::from_series(&[vec![bound; 100]]).unwrap();
        assert_abs_diff_eq!(bound_ratio(&at_bound, 16, 100), 1.0, epsilon = 1e-12);
        let zero = RegretCurve::from_series(&[vec![0.0; 100]]).unwrap();
        assert_eq!(bound_ratio(&zero, 16, 100), 0.0);
    }

    #[test]
    fn confidence_half_width() {
        let curve = RegretCurve::from_series(&[vec![1.0], vec![3.0]]).unwrap();
        assert_eq!(curve.mean, vec![2.0]);
        assert_abs_diff_eq!(curve.ci[0], 1.96 * 1.0, epsilon = 1e-12);
        assert!(RegretCurve::from_series(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn hyperslot_cases() {
        assert_eq!(hyperslot_power(&[10.0; 1000], 200), vec![10.0; 5]);
        assert_eq!(hyperslot_power(&[1.0, 3.0, 5.0, 7.0], 2), vec![2.0, 6.0]);
        assert_eq!(hyperslot_power(&vec![0.0; 100_000], 200).len(), 500);
        assert_eq!(hyperslot_power(&[1.0, 3.0, 5.0], 2), vec![2.0]);
    }

    #[test]
    fn savings_cases() {
        assert_abs_diff_eq!(savings_percent(955.1, 1052.6, 955.1).unwrap(), 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(savings_percent(1052.6, 1052.6, 955.1).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(savings_percent(992.1, 1052.6, 955.1).unwrap(), 62.051_282_051_282, epsilon = 1e-9);
        assert!(matches!(savings_percent(1.0, 5.0, 5.0), Err(Error::UndefinedSavings(_))));
    }

    proptest! {
        #[test]
        fn oracle_dominates_every_fixed_arm(rows in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 1..60), arm in 0usize..4) {
            let recs = records(&rows, &vec![arm; rows.len()]);
            let curve = regret_curve(std::slice::from_ref(&recs)).unwrap();
            let (_, best) = crate::baselines::oracle_best_fixed(&rows).unwrap();
            let realized: f64 = recs.iter().map(|r| r.reward).sum();
            prop_assert!(best >= realized);
            prop_assert!(curve.mean.iter().all(|r| *r >= 0.0));
            prop_assert!((curve.final_regret() - (best - realized)).abs() < 1e-9);
        }

        #[test]
        fn regret_is_bit_stable(rows in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 1..60), seed in 0usize..4) {
            let arms: Vec<usize> = (0..rows.len()).map(|i| (i * 7 + seed) % 4).collect();
            let recs = records(&rows, &arms);
            let curve = regret_curve(std::slice::from_ref(&recs)).unwrap();
            let (_, best) = crate::baselines::oracle_best_fixed(&rows).unwrap();
            let realized: f64 = recs.iter().map(|r| r.reward).sum();
            prop_assert!((curve.final_regret() - (best - realized)).abs() < 1e-9);
            prop_assert_eq!(curve, regret_curve(&[recs]).unwrap());
        }
    }
}
