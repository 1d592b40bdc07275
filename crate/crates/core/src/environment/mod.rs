//! Slot contexts, scenario generators and the vBS response model.
//!
//! Each slot draws demands and CQIs from a regime box: scenario A always uses
//! the high box, scenario B alternates high (odd slots) and low (even slots).
//! The response of every arm to a context comes either from the closed-form
//! [`SurrogateModel`] or from an ingested [`TraceTable`].
//!
//! Draw order inside a slot is fixed: DL demand, UL demand, DL CQI, UL CQI,
//! then the two noise factors when noise is enabled.

mod surrogate;
mod trace;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use surrogate::{efficiency, mcs_cap, SurrogateModel};
pub use trace::{TraceRow, TraceTable, TRACE_HEADER};

use crate::error::{Error, Result};
use crate::reward::{utility, PowerReading, PowerSource, RewardScaler, TrafficOutcome};
use crate::rng::SlotRng;
use crate::space::{ConfigurationSpace, RadioPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    High,
    Low,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::High => "high",
            Regime::Low => "low",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// What the network looks like during one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotContext {
    /// DL demand (Mbit per slot).
    pub d_dl: f64,
    pub d_ul: f64,
    pub cqi_dl: u8,
    pub cqi_ul: u8,
    pub regime: Regime,
    /// Multiplicative noise on delivered data; 1 when noise is off.
    pub rate_factor: f64,
    /// Multiplicative noise on power readings; 1 when noise is off.
    pub power_factor: f64,
}

impl SlotContext {
    pub fn new(d_dl: f64, d_ul: f64, cqi_dl: u8, cqi_ul: u8, regime: Regime) -> Self {
        SlotContext {
            d_dl,
            d_ul,
            cqi_dl,
            cqi_ul,
            regime,
            rate_factor: 1.0,
            power_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scenario {
    /// Stationary: every slot from the high box.
    A,
    /// Ping-pong: high box on odd slots, low box on even slots.
    #[default]
    B,
}

/// How contexts are produced inside a regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextMode {
    /// Uniform draws from the regime box.
    #[default]
    Random,
    /// The box midpoint every time (no draws).
    Midpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: Scenario,
    pub contexts: ContextMode,
    pub high_demand_dl: (f64, f64),
    pub high_demand_ul: (f64, f64),
    pub low_demand: (f64, f64),
    pub high_cqi: (u8, u8),
    pub low_cqi: (u8, u8),
}

impl ScenarioSpec {
    pub fn new(kind: Scenario, contexts: ContextMode) -> Self {
        ScenarioSpec {
            kind,
            contexts,
            high_demand_dl: (29.0, 32.0),
            high_demand_ul: (20.0, 23.0),
            low_demand: (0.01, 1.0),
            high_cqi: (13, 15),
            low_cqi: (1, 3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let demand_ranges = [self.high_demand_dl, self.high_demand_ul, self.low_demand];
        if demand_ranges
            .iter()
            .any(|(lo, hi)| !(*lo >= 0.0) || !(lo <= hi) || !hi.is_finite())
        {
            return Err(Error::Config("demand ranges must be ordered and non-negative".into()));
        }
        for (lo, hi) in [self.high_cqi, self.low_cqi] {
            if lo < 1 || hi > 15 || lo > hi {
                return Err(Error::Config("CQI ranges must be ordered within [1, 15]".into()));
            }
        }
        let overlaps = |a: (f64, f64), b: (f64, f64)| a.0 <= b.1 && b.0 <= a.1;
        if overlaps(self.low_demand, self.high_demand_dl)
            || overlaps(self.low_demand, self.high_demand_ul)
            || self.low_cqi.1 >= self.high_cqi.0
        {
            return Err(Error::Config("low ranges must lie below the high ranges".into()));
        }
        Ok(())
    }

    pub fn regime_at(&self, t: u64) -> Regime {
        match self.kind {
            Scenario::A => Regime::High,
            Scenario::B if t % 2 == 1 => Regime::High,
            Scenario::B => Regime::Low,
        }
    }

    /// Regimes the scenario can visit.
    pub fn regimes(&self) -> &'static [Regime] {
        match self.kind {
            Scenario::A => &[Regime::High],
            Scenario::B => &[Regime::High, Regime::Low],
        }
    }

    fn boxes(&self, regime: Regime) -> ((f64, f64), (f64, f64), (u8, u8)) {
        match regime {
            Regime::High => (self.high_demand_dl, self.high_demand_ul, self.high_cqi),
            Regime::Low => (self.low_demand, self.low_demand, self.low_cqi),
        }
    }

    pub fn midpoint(&self, regime: Regime) -> SlotContext {
        let (dl, ul, cqi) = self.boxes(regime);
        let mid_cqi = ((cqi.0 as u16 + cqi.1 as u16) / 2) as u8;
        SlotContext::new(
            0.5 * (dl.0 + dl.1),
            0.5 * (ul.0 + ul.1),
            mid_cqi,
            mid_cqi,
            regime,
        )
    }

    /// Context for slot `t` (1-based).
    pub fn next_context(&self, t: u64, rng: &mut SlotRng) -> SlotContext {
        let regime = self.regime_at(t);
        match self.contexts {
            ContextMode::Midpoint => self.midpoint(regime),
            ContextMode::Random => {
                let (dl, ul, cqi) = self.boxes(regime);
                let d_dl = rng.uniform(dl.0, dl.1);
                let d_ul = rng.uniform(ul.0, ul.1);
                let cqi_dl = rng.int_inclusive(cqi.0, cqi.1);
                let cqi_ul = rng.int_inclusive(cqi.0, cqi.1);
                SlotContext::new(d_dl, d_ul, cqi_dl, cqi_ul, regime)
            }
        }
    }

    /// Contexts at which utility and power reach their extremes: demand box
    /// corners crossed with every CQI pair, or just the midpoints.
    fn extreme_contexts(&self) -> Vec<SlotContext> {
        let mut out = Vec::new();
        for &regime in self.regimes() {
            if self.contexts == ContextMode::Midpoint {
                out.push(self.midpoint(regime));
                continue;
            }
            let (dl, ul, cqi) = self.boxes(regime);
            for d_dl in [dl.0, dl.1] {
                for d_ul in [ul.0, ul.1] {
                    for cqi_dl in cqi.0..=cqi.1 {
                        for cqi_ul in cqi.0..=cqi.1 {
                            out.push(SlotContext::new(d_dl, d_ul, cqi_dl, cqi_ul, regime));
                        }
                    }
                }
            }
        }
        out
    }
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec::new(Scenario::B, ContextMode::Random)
    }
}

/// How trace rows are keyed by context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketScheme {
    /// `high` / `low`.
    #[default]
    Regime,
    /// Regime plus both CQIs, e.g. `high:14:13`.
    RegimeCqi,
}

impl BucketScheme {
    pub fn label(&self, ctx: &SlotContext) -> String {
        match self {
            BucketScheme::Regime => ctx.regime.label().to_string(),
            BucketScheme::RegimeCqi => format!("{}:{}:{}", ctx.regime, ctx.cqi_dl, ctx.cqi_ul),
        }
    }

    /// Every label of the scheme under the default scenario ranges.
    pub fn labels(&self) -> Vec<String> {
        self.bucket_contexts(&ScenarioSpec::default())
            .iter()
            .map(|ctx| self.label(ctx))
            .collect()
    }

    /// One representative context per bucket, at the demand midpoints.
    pub fn bucket_contexts(&self, spec: &ScenarioSpec) -> Vec<SlotContext> {
        let mut out = Vec::new();
        for regime in [Regime::High, Regime::Low] {
            let mid = spec.midpoint(regime);
            match self {
                BucketScheme::Regime => out.push(mid),
                BucketScheme::RegimeCqi => {
                    let (_, _, cqi) = spec.boxes(regime);
                    for cqi_dl in cqi.0..=cqi.1 {
                        for cqi_ul in cqi.0..=cqi.1 {
                            out.push(SlotContext { cqi_dl, cqi_ul, ..mid });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Source of per-arm responses.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvModel {
    Surrogate(SurrogateModel),
    Trace(TraceTable),
}

/// Extremes of utility and power over everything the environment can produce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub u_max: f64,
    pub total_w: (f64, f64),
    pub cpu_w: (f64, f64),
}

impl Envelope {
    pub fn power_range(&self, source: PowerSource) -> (f64, f64) {
        match source {
            PowerSource::Total => self.total_w,
            PowerSource::Cpu => self.cpu_w,
        }
    }

    /// Scaler whose bounds enclose every reward this environment can emit.
    pub fn scaler(&self, delta: f64, source: PowerSource) -> Result<RewardScaler> {
        let (p_min, p_max) = self.power_range(source);
        RewardScaler::from_envelope(delta, self.u_max, p_min, p_max, source)
    }
}

/// Scenario plus response model over a fixed policy space.
#[derive(Debug, Clone)]
pub struct Environment {
    space: ConfigurationSpace,
    policies: Vec<RadioPolicy>,
    model: EnvModel,
    scenario: ScenarioSpec,
    noise: f64,
}

impl Environment {
    pub fn new(
        space: ConfigurationSpace,
        model: EnvModel,
        scenario: ScenarioSpec,
        noise: f64,
    ) -> Result<Self> {
        scenario.validate()?;
        if !(0.0..1.0).contains(&noise) {
            return Err(Error::Config(format!("env.noise must lie in [0, 1), got {noise}")));
        }
        match &model {
            EnvModel::Surrogate(m) => m.validate()?,
            EnvModel::Trace(t) if t.arm_count() != space.cardinality() => {
                return Err(Error::Shape(format!(
                    "trace covers {} arms but the space has {}",
                    t.arm_count(),
                    space.cardinality()
                )));
            }
            EnvModel::Trace(_) => {}
        }
        let policies = space.policies().collect();
        Ok(Environment {
            space,
            policies,
            model,
            scenario,
            noise,
        })
    }

    pub fn surrogate(space: ConfigurationSpace, scenario: ScenarioSpec) -> Result<Self> {
        Environment::new(space, EnvModel::Surrogate(SurrogateModel::default()), scenario, 0.0)
    }

    pub fn space(&self) -> &ConfigurationSpace {
        &self.space
    }

    pub fn arm_count(&self) -> usize {
        self.policies.len()
    }

    pub fn scenario(&self) -> &ScenarioSpec {
        &self.scenario
    }

    pub fn model(&self) -> &EnvModel {
        &self.model
    }

    pub fn next_context(&self, t: u64, rng: &mut SlotRng) -> SlotContext {
        let mut ctx = self.scenario.next_context(t, rng);
        if self.noise > 0.0 {
            ctx.rate_factor = 1.0 + self.noise * (2.0 * rng.next_f64() - 1.0);
            ctx.power_factor = 1.0 + self.noise * (2.0 * rng.next_f64() - 1.0);
        }
        ctx
    }

    /// Response of one arm to a context.
    pub fn evaluate(&self, ctx: &SlotContext, arm: usize) -> Result<(TrafficOutcome, PowerReading)> {
        let policy = self.policies.get(arm).ok_or(Error::IndexOutOfRange {
            index: arm,
            cardinality: self.policies.len(),
        })?;
        let (r_dl, r_ul, power) = match &self.model {
            EnvModel::Surrogate(model) => {
                let (o, p) = model.evaluate(ctx, policy, self.space.max_tx_power());
                (o.r_dl, o.r_ul, p)
            }
            EnvModel::Trace(table) => {
                let row = table.lookup(ctx, arm)?;
                (row.r_dl, row.r_ul, row.power())
            }
        };
        let outcome = TrafficOutcome {
            r_dl: ctx.d_dl.min(r_dl * ctx.rate_factor),
            r_ul: ctx.d_ul.min(r_ul * ctx.rate_factor),
            d_dl: ctx.d_dl,
            d_ul: ctx.d_ul,
        };
        let power = PowerReading {
            total_w: power.total_w * ctx.power_factor,
            cpu_w: power.cpu_w * ctx.power_factor,
        };
        Ok((outcome, power))
    }

    /// Normalized reward of every arm under `ctx`. Only the harness and the
    /// hindsight oracle may look at this; online learners never do.
    pub fn counterfactual_row(&self, ctx: &SlotContext, scaler: &RewardScaler) -> Result<Vec<f64>> {
        (0..self.arm_count())
            .map(|arm| {
                let (outcome, power) = self.evaluate(ctx, arm)?;
                Ok(scaler.score(&outcome, &power))
            })
            .collect()
    }

    /// Utility and power extremes, computed by evaluating every arm at the
    /// scenario's extreme contexts with the noise factors pushed to their limits.
    pub fn envelope(&self) -> Result<Envelope> {
        let mut u_max: f64 = 0.0;
        let mut total = (f64::INFINITY, f64::NEG_INFINITY);
        let mut cpu = (f64::INFINITY, f64::NEG_INFINITY);
        for base in self.scenario.extreme_contexts() {
            for (rate_factor, power_factor) in [(1.0 + self.noise, 1.0 - self.noise), (1.0, 1.0 + self.noise)] {
                let ctx = SlotContext {
                    rate_factor,
                    power_factor,
                    ..base
                };
                for arm in 0..self.arm_count() {
                    let (outcome, power) = self.evaluate(&ctx, arm)?;
                    u_max = u_max.max(utility(&outcome));
                    total = (total.0.min(power.total_w), total.1.max(power.total_w));
                    cpu = (cpu.0.min(power.cpu_w), cpu.1.max(power.cpu_w));
                }
            }
        }
        if u_max <= 0.0 {
            // nothing can ever be delivered; keep the scale non-degenerate
            u_max = 2.0 * std::f64::consts::LN_2;
        }
        Ok(Envelope {
            u_max,
            total_w: total,
            cpu_w: cpu,
        })
    }

    /// Tabulates the surrogate at one representative context per bucket.
    pub fn to_trace(&self, scheme: BucketScheme) -> Result<TraceTable> {
        let EnvModel::Surrogate(model) = &self.model else {
            return Err(Error::Config("trace export needs env.mode = \"surrogate\"".into()));
        };
        let mut rows = Vec::new();
        for ctx in scheme.bucket_contexts(&self.scenario) {
            let label = scheme.label(&ctx);
            for (arm, policy) in self.policies.iter().enumerate() {
                let (o, p) = model.evaluate(&ctx, policy, self.space.max_tx_power());
                rows.push((
                    (label.clone(), arm),
                    TraceRow {
                        r_dl: o.r_dl,
                        r_ul: o.r_ul,
                        total_w: p.total_w,
                        cpu_w: p.cpu_w,
                    },
                ));
            }
        }
        TraceTable::from_rows(scheme, self.arm_count(), rows)
    }

    /// Loads a trace for this space.
    pub fn load_trace(path: &Path, scheme: BucketScheme, space: &ConfigurationSpace) -> Result<TraceTable> {
        TraceTable::load(path, scheme, space.cardinality())
    }
}
