//! The finite set of radio policies the scheduler chooses from.
//!
//! A policy caps the DL transmit power, the DL/UL MCS and the DL/UL airtime
//! handed to the real-time MAC scheduler. The space is the Cartesian product
//! of five ordered axes and arms are numbered lexicographically with the DL
//! power axis outermost and the UL airtime axis innermost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest MCS index accepted on the MCS axes.
pub const MAX_MCS: u8 = 28;

/// One radio policy: the caps applied for a whole decision slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioPolicy {
    /// DL transmit power cap (dBm).
    pub tx_power_dl: f64,
    pub mcs_dl: u8,
    /// Fraction of the slot the DL may transmit, in (0, 1].
    pub airtime_dl: f64,
    pub mcs_ul: u8,
    /// Fraction of the slot granted to the UL, in (0, 1].
    pub airtime_ul: f64,
}

/// Axis lists as they appear in the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceAxes {
    pub p_d: Vec<f64>,
    pub m_d: Vec<u8>,
    pub a_d: Vec<f64>,
    pub m_u: Vec<u8>,
    pub a_u: Vec<f64>,
}

impl Default for SpaceAxes {
    /// The 16-arm space: one power level, two MCS caps and two airtime caps per
    /// direction. Values are plausible LTE settings, not measured ones.
    fn default() -> Self {
        SpaceAxes {
            p_d: vec![20.0],
            m_d: vec![16, 27],
            a_d: vec![0.5, 1.0],
            m_u: vec![16, 27],
            a_u: vec![0.5, 1.0],
        }
    }
}

/// Validated policy space `X = P_d x M_d x A_d x M_u x A_u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "SpaceAxes")]
pub struct ConfigurationSpace {
    axes: SpaceAxes,
}

impl From<ConfigurationSpace> for SpaceAxes {
    fn from(space: ConfigurationSpace) -> Self {
        space.axes
    }
}

impl<'de> Deserialize<'de> for ConfigurationSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let axes = SpaceAxes::deserialize(deserializer)?;
        ConfigurationSpace::new(axes).map_err(serde::de::Error::custom)
    }
}

fn check_increasing<T: PartialOrd + Copy + Into<f64>>(name: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidSpace(format!("axis `{name}` is empty")));
    }
    if let Some(v) = values.iter().find(|v| !(**v).into().is_finite()) {
        return Err(Error::InvalidSpace(format!(
            "axis `{name}` has a non-finite value {}",
            (*v).into()
        )));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpace(format!(
            "axis `{name}` must be strictly increasing without duplicates"
        )));
    }
    Ok(())
}

impl ConfigurationSpace {
    pub fn new(axes: SpaceAxes) -> Result<Self> {
        check_increasing("p_d", &axes.p_d)?;
        check_increasing("m_d", &axes.m_d)?;
        check_increasing("a_d", &axes.a_d)?;
        check_increasing("m_u", &axes.m_u)?;
        check_increasing("a_u", &axes.a_u)?;
        // the surrogate scales RF power by tx_power / max(p_d)
        if axes.p_d[0] <= 0.0 {
            return Err(Error::InvalidSpace("axis `p_d` values must be positive".into()));
        }
        for (name, axis) in [("m_d", &axes.m_d), ("m_u", &axes.m_u)] {
            if axis.iter().any(|&m| m > MAX_MCS) {
                return Err(Error::InvalidSpace(format!(
                    "axis `{name}` has an MCS above {MAX_MCS}"
                )));
            }
        }
        for (name, axis) in [("a_d", &axes.a_d), ("a_u", &axes.a_u)] {
            if axis.iter().any(|&a| a <= 0.0 || a > 1.0) {
                return Err(Error::InvalidSpace(format!(
                    "axis `{name}` airtime must lie in (0, 1]"
                )));
            }
        }
        Ok(ConfigurationSpace { axes })
    }

    pub fn axes(&self) -> &SpaceAxes {
        &self.axes
    }

    fn dims(&self) -> [usize; 5] {
        let a = &self.axes;
        [a.p_d.len(), a.m_d.len(), a.a_d.len(), a.m_u.len(), a.a_u.len()]
    }

    /// Number of arms `|X| = H*I*J*K*L`.
    pub fn cardinality(&self) -> usize {
        self.dims().iter().product()
    }

    /// Largest DL power level, the reference for relative RF power.
    pub fn max_tx_power(&self) -> f64 {
        *self.axes.p_d.last().expect("validated non-empty")
    }

    pub fn policy_at(&self, index: usize) -> Result<RadioPolicy> {
        let cardinality = self.cardinality();
        if index >= cardinality {
            return Err(Error::IndexOutOfRange { index, cardinality });
        }
        let dims = self.dims();
        let mut digits = [0usize; 5];
        let mut rest = index;
        for axis in (0..5).rev() {
            digits[axis] = rest % dims[axis];
            rest /= dims[axis];
        }
        let a = &self.axes;
        Ok(RadioPolicy {
            tx_power_dl: a.p_d[digits[0]],
            mcs_dl: a.m_d[digits[1]],
            airtime_dl: a.a_d[digits[2]],
            mcs_ul: a.m_u[digits[3]],
            airtime_ul: a.a_u[digits[4]],
        })
    }

    pub fn index_of(&self, policy: &RadioPolicy) -> Result<usize> {
        fn position<T: PartialEq + Copy + Into<f64>>(
            axis: &'static str,
            values: &[T],
            value: T,
        ) -> Result<usize> {
            values.iter().position(|v| *v == value).ok_or(Error::NotOnAxis {
                axis,
                value: value.into(),
            })
        }
        let a = &self.axes;
        let digits = [
            position("p_d", &a.p_d, policy.tx_power_dl)?,
            position("m_d", &a.m_d, policy.mcs_dl)?,
            position("a_d", &a.a_d, policy.airtime_dl)?,
            position("m_u", &a.m_u, policy.mcs_ul)?,
            position("a_u", &a.a_u, policy.airtime_ul)?,
        ];
        Ok(digits
            .iter()
            .zip(self.dims())
            .fold(0, |acc, (&digit, dim)| acc * dim + digit))
    }

    /// All policies in arm order.
    pub fn policies(&self) -> impl Iterator<Item = RadioPolicy> + '_ {
        (0..self.cardinality()).map(move |i| self.policy_at(i).expect("index in range"))
    }
}

impl Default for ConfigurationSpace {
    fn default() -> Self {
        ConfigurationSpace::new(SpaceAxes::default()).expect("default axes are valid")
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn sized(h: usize, i: usize, j: usize, k: usize, l: usize) -> ConfigurationSpace {
        let floats = |n: usize| (1..=n).map(|v| v as f64 / n as f64).collect::<Vec<_>>();
        let mcs = |n: usize| (0..n as u8).collect::<Vec<_>>();
        ConfigurationSpace::new(SpaceAxes {
            p_d: (1..=h).map(|v| v as f64 * 3.0).collect(),
            m_d: mcs(i),
            a_d: floats(j),
            m_u: mcs(k),
            a_u: floats(l),
        })
        .unwrap()
    }

    #[test]
    fn cardinality_matches_axis_product() {
        assert_eq!(ConfigurationSpace::default().cardinality(), 16);
        assert_eq!(sized(1, 2, 2, 2, 2).cardinality(), 16);
        assert_eq!(sized(1, 1, 1, 1, 1).cardinality(), 1);
        // one possible decomposition of the full 1080-policy dataset
        assert_eq!(sized(5, 6, 6, 6, 1).cardinality(), 1080);
        assert_eq!(sized(2, 2, 4, 4, 4).cardinality(), 256);
    }

    #[test]
    fn first_and_last_policies_are_extremes() {
        let space = ConfigurationSpace::default();
        let first = space.policy_at(0).unwrap();
        assert_eq!(
            first,
            RadioPolicy {
                tx_power_dl: 20.0,
                mcs_dl: 16,
                airtime_dl: 0.5,
                mcs_ul: 16,
                airtime_ul: 0.5
            }
        );
        let last = space.policy_at(15).unwrap();
        assert_eq!(
            last,
            RadioPolicy {
                tx_power_dl: 20.0,
                mcs_dl: 27,
                airtime_dl: 1.0,
                mcs_ul: 27,
                airtime_ul: 1.0
            }
        );
    }

    #[test]
    fn index_one_advances_innermost_axis() {
        let space = ConfigurationSpace::default();
        let p = space.policy_at(1).unwrap();
        assert_eq!(p.airtime_ul, 1.0);
        assert_eq!((p.mcs_dl, p.airtime_dl, p.mcs_ul), (16, 0.5, 16));
        // index 2 carries into m_u
        let p = space.policy_at(2).unwrap();
        assert_eq!((p.mcs_ul, p.airtime_ul), (27, 0.5));
    }

    #[test]
    fn index_out_of_range() {
        let space = ConfigurationSpace::default();
        assert!(matches!(
            space.policy_at(16),
            Err(Error::IndexOutOfRange {
                index: 16,
                cardinality: 16
            })
        ));
    }

    #[test]
    fn off_axis_value_is_rejected() {
        let space = ConfigurationSpace::default();
        let mut p = space.policy_at(7).unwrap();
        assert_eq!(space.index_of(&p).unwrap(), 7);
        assert_eq!(space.index_of(&space.policy_at(0).unwrap()).unwrap(), 0);
        p.mcs_dl = 17;
        assert!(matches!(
            space.index_of(&p),
            Err(Error::NotOnAxis { axis: "m_d", .. })
        ));
    }

    #[test]
    fn round_trip_is_exhaustive_and_duplicate_free() {
        for space in [sized(5, 6, 6, 6, 1), sized(2, 3, 4, 3, 2), sized(1, 1, 1, 1, 1)] {
            let mut seen = HashSet::new();
            for i in 0..space.cardinality() {
                let p = space.policy_at(i).unwrap();
                assert_eq!(space.index_of(&p).unwrap(), i);
                let key = (
                    p.tx_power_dl.to_bits(),
                    p.mcs_dl,
                    p.airtime_dl.to_bits(),
                    p.mcs_ul,
                    p.airtime_ul.to_bits(),
                );
                assert!(seen.insert(key));
            }
            assert_eq!(seen.len(), space.cardinality());
        }
    }

    #[test]
    fn invalid_axes_are_rejected() {
        let bad = |f: fn(&mut SpaceAxes)| {
            let mut axes = SpaceAxes::default();
            f(&mut axes);
            ConfigurationSpace::new(axes)
        };
        assert!(bad(|a| a.m_d.clear()).is_err());
        assert!(bad(|a| a.m_d = vec![27, 16]).is_err());
        assert!(bad(|a| a.a_u = vec![0.5, 0.5]).is_err());
        assert!(bad(|a| a.a_d = vec![0.0, 1.0]).is_err());
        assert!(bad(|a| a.a_d = vec![0.5, 1.5]).is_err());
        assert!(bad(|a| a.m_u = vec![16, 29]).is_err());
        assert!(bad(|a| a.p_d = vec![f64::NAN]).is_err());
        assert!(bad(|a| a.p_d = vec![-3.0, 20.0]).is_err());
    }

    #[test]
    fn deserializes_and_validates() {
        let ok: ConfigurationSpace = serde_json::from_str(
            r#"{"p_d":[23.0],"m_d":[10,20],"a_d":[0.25,1.0],"m_u":[5],"a_u":[1.0]}"#,
        )
        .unwrap();
        assert_eq!(ok.cardinality(), 4);
        let err = serde_json::from_str::<ConfigurationSpace>(
            r#"{"p_d":[23.0],"m_d":[20,10],"a_d":[1.0],"m_u":[5],"a_u":[1.0]}"#,
        );
        assert!(err.is_err());
    }
}
