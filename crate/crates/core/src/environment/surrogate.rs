//! Closed-form stand-in for a measured vBS.
//!
//! Throughput follows the capped MCS and airtime; CPU power grows with the
//! delivered load and with poor channels (decoding at low SNR costs more BBU
//! cycles); radio power follows the relative DL transmit power and airtime.

use serde::{Deserialize, Serialize};

use super::SlotContext;
use crate::error::{Error, Result};
use crate::reward::{PowerReading, TrafficOutcome};
use crate::space::{RadioPolicy, MAX_MCS};

/// Highest MCS the channel supports at a given CQI: `clamp(2 cqi - 2, 0, 28)`.
pub fn mcs_cap(cqi: u8) -> u8 {
    (2 * cqi as i32 - 2).clamp(0, MAX_MCS as i32) as u8
}

/// Spectral efficiency of an MCS relative to the top one, `(m + 1) / 29`.
pub fn efficiency(mcs: u8) -> f64 {
    (mcs as f64 + 1.0) / (MAX_MCS as f64 + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateModel {
    /// DL capacity at full efficiency and airtime (Mbit per slot).
    pub cap_dl: f64,
    pub cap_ul: f64,
    /// Idle BBU/CPU power (W).
    pub p0_cpu: f64,
    /// CPU power at full DL load (W).
    pub kappa_dl: f64,
    /// CPU power at full UL load (W).
    pub kappa_ul: f64,
    /// Extra processing per unit load at the worst CQI, relative to the best.
    pub eta: f64,
    /// Idle radio power (W).
    pub p0_rf: f64,
    /// Radio power at maximum DL power and full airtime (W).
    pub beta_tx: f64,
}

impl Default for SurrogateModel {
    fn default() -> Self {
        SurrogateModel {
            cap_dl: 32.0,
            cap_ul: 23.0,
            p0_cpu: 4.0,
            kappa_dl: 1.2,
            kappa_ul: 1.8,
            eta: 0.5,
            p0_rf: 7.0,
            beta_tx: 3.0,
        }
    }
}

impl SurrogateModel {
    pub fn validate(&self) -> Result<()> {
        let coefficients = [
            ("p0_cpu", self.p0_cpu),
            ("kappa_dl", self.kappa_dl),
            ("kappa_ul", self.kappa_ul),
            ("eta", self.eta),
            ("p0_rf", self.p0_rf),
            ("beta_tx", self.beta_tx),
        ];
        for (name, value) in coefficients {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::Config(format!(
                    "env.model.{name} must be a finite non-negative number, got {value}"
                )));
            }
        }
        if !(self.cap_dl > 0.0) || !(self.cap_ul > 0.0) {
            return Err(Error::Config("env.model capacities must be positive".into()));
        }
        Ok(())
    }

    fn snr_penalty(&self, cqi: u8) -> f64 {
        1.0 + self.eta * (15.0 - cqi as f64) / 14.0
    }

    /// Delivered traffic and power for `policy` under `ctx`, before noise.
    ///
    /// `max_tx_power` is the largest DL power level of the space.
    pub fn evaluate(
        &self,
        ctx: &SlotContext,
        policy: &RadioPolicy,
        max_tx_power: f64,
    ) -> (TrafficOutcome, PowerReading) {
        let mcs_dl = policy.mcs_dl.min(mcs_cap(ctx.cqi_dl));
        let mcs_ul = policy.mcs_ul.min(mcs_cap(ctx.cqi_ul));
        let r_dl = ctx
            .d_dl
            .min(self.cap_dl * efficiency(mcs_dl) * policy.airtime_dl);
        let r_ul = ctx
            .d_ul
            .min(self.cap_ul * efficiency(mcs_ul) * policy.airtime_ul);
        let cpu_w = self.p0_cpu
            + self.kappa_dl * (r_dl / self.cap_dl) * self.snr_penalty(ctx.cqi_dl)
            + self.kappa_ul * (r_ul / self.cap_ul) * self.snr_penalty(ctx.cqi_ul);
        let total_w = cpu_w
            + self.p0_rf
            + self.beta_tx * (policy.tx_power_dl / max_tx_power) * policy.airtime_dl;
        (
            TrafficOutcome {
                r_dl,
                r_ul,
                d_dl: ctx.d_dl,
                d_ul: ctx.d_ul,
            },
            PowerReading { total_w, cpu_w },
        )
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::environment::Regime;

    fn ctx(d_dl: f64, d_ul: f64, cqi_dl: u8, cqi_ul: u8) -> SlotContext {
        SlotContext::new(d_dl, d_ul, cqi_dl, cqi_ul, Regime::High)
    }

    fn policy(mcs_dl: u8, airtime_dl: f64, mcs_ul: u8, airtime_ul: f64) -> RadioPolicy {
        RadioPolicy {
            tx_power_dl: 20.0,
            mcs_dl,
            airtime_dl,
            mcs_ul,
            airtime_ul,
        }
    }

    #[test]
    fn cqi_to_mcs_link() {
        assert_eq!(mcs_cap(1), 0);
        assert_eq!(mcs_cap(2), 2);
        assert_eq!(mcs_cap(14), 26);
        assert_eq!(mcs_cap(15), 28);
        assert_eq!(efficiency(28), 1.0);
    }

    #[test]
    fn zero_demand_leaves_idle_cpu() {
        let m = SurrogateModel::default();
        let (o, p) = m.evaluate(&ctx(0.0, 0.0, 15, 15), &policy(27, 1.0, 27, 1.0), 20.0);
        assert_eq!((o.r_dl, o.r_ul), (0.0, 0.0));
        assert_eq!(p.cpu_w, m.p0_cpu);
        assert_eq!(p.total_w, m.p0_cpu + m.p0_rf + m.beta_tx);
    }

    #[test]
    fn best_channel_full_airtime_reaches_capacity() {
        let m = SurrogateModel::default();
        let (o, _) = m.evaluate(&ctx(40.0, 1.0, 15, 15), &policy(28, 1.0, 28, 1.0), 20.0);
        assert_eq!(o.r_dl, 32.0);
    }

    #[test]
    fn worst_channel_forces_mcs_zero() {
        let m = SurrogateModel::default();
        let (o, _) = m.evaluate(&ctx(10.0, 1.0, 1, 15), &policy(27, 0.5, 27, 1.0), 20.0);
        assert_abs_diff_eq!(o.r_dl, 32.0 / 29.0 * 0.5, epsilon = 1e-12);
        let (o, _) = m.evaluate(&ctx(0.3, 1.0, 1, 15), &policy(27, 1.0, 27, 1.0), 20.0);
        assert_eq!(o.r_dl, 0.3);
    }

    #[test]
    fn low_snr_costs_more_cpu_at_equal_load() {
        let m = SurrogateModel::default();
        // demand small enough that both channels deliver all of it
        let (good_o, good_p) = m.evaluate(&ctx(0.5, 0.5, 15, 15), &policy(27, 1.0, 27, 1.0), 20.0);
        let (bad_o, bad_p) = m.evaluate(&ctx(0.5, 0.5, 3, 3), &policy(27, 1.0, 27, 1.0), 20.0);
        assert_eq!(good_o.r_dl, bad_o.r_dl);
        assert!(bad_p.cpu_w > good_p.cpu_w);
    }

    proptest! {
        #[test]
        fn delivery_is_monotone_and_bounded(
            d_dl in 0.0f64..40.0, d_ul in 0.0f64..30.0,
            cqi in 1u8..=15, cqi_ul in 1u8..=15,
            mcs in 0u8..=28, air_lo in 0.05f64..1.0, air_hi in 0.05f64..1.0,
        ) {
            let m = SurrogateModel::default();
            let (lo, hi) = if air_lo <= air_hi { (air_lo, air_hi) } else { (air_hi, air_lo) };
            let c = ctx(d_dl, d_ul, cqi, cqi_ul);
            let (a, pa) = m.evaluate(&c, &policy(mcs, lo, mcs, lo), 20.0);
            let (b, pb) = m.evaluate(&c, &policy(mcs, hi, mcs, hi), 20.0);
            prop_assert!(a.r_dl <= b.r_dl && a.r_ul <= b.r_ul);
            prop_assert!(a.r_dl <= d_dl && a.r_ul <= d_ul);
            prop_assert!(pa.cpu_w <= pb.cpu_w);
            prop_assert!(pa.cpu_w <= pa.total_w);
            if mcs < 28 {
                let (c2, _) = m.evaluate(&c, &policy(mcs + 1, lo, mcs, lo), 20.0);
                prop_assert!(a.r_dl <= c2.r_dl);
            }
            if cqi < 15 {
                let (c3, _) = m.evaluate(&ctx(d_dl, d_ul, cqi + 1, cqi_ul), &policy(mcs, lo, mcs, lo), 20.0);
                prop_assert!(a.r_dl <= c3.r_dl);
            }
        }
    }
}
