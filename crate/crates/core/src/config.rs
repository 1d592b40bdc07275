//! Run configuration, read from TOML (or the equivalent JSON).
//!
//! ```toml
//! [space]
//! p_d = [20.0]
//! m_d = [16, 27]
//! a_d = [0.5, 1.0]
//! m_u = [16, 27]
//! a_u = [0.5, 1.0]
//!
//! [env]
//! mode = "surrogate"        # or "trace" with trace_path = "..."
//! scenario = "B"
//! contexts = "random"       # or "midpoint"
//! bucket = "regime"         # or "regime_cqi"
//! noise = 0.0
//!
//! [env.model]
//! beta_tx = 3.0
//!
//! [reward]
//! delta = 1.0
//! power_source = "total"    # or "cpu"; optional f_min / f_max
//!
//! [run]
//! learner = "bsvbs"
//! horizon = 10000
//! seeds = [1, 2, 3]
//! out_dir = "out"
//! hyperslot = 200
//! anytime = false
//!
//! [baseline]
//! epsilon = 0.1
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineParams, LearnerKind};
use crate::environment::{BucketScheme, ContextMode, EnvModel, Environment, Scenario, ScenarioSpec, SurrogateModel};
use crate::error::{Error, Result};
use crate::reward::PowerSource;
use crate::space::{ConfigurationSpace, SpaceAxes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvMode {
    #[default]
    Surrogate,
    Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub mode: EnvMode,
    pub trace_path: Option<PathBuf>,
    pub scenario: Scenario,
    pub contexts: ContextMode,
    pub bucket: BucketScheme,
    pub noise: f64,
    pub model: SurrogateModel,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            mode: EnvMode::Surrogate,
            trace_path: None,
            scenario: Scenario::B,
            contexts: ContextMode::Random,
            bucket: BucketScheme::Regime,
            noise: 0.0,
            model: SurrogateModel::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub delta: f64,
    pub power_source: PowerSource,
    pub f_min: Option<f64>,
    pub f_max: Option<f64>,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            delta: 1.0,
            power_source: PowerSource::Total,
            f_min: None,
            f_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub learner: LearnerKind,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    pub out_dir: Option<PathBuf>,
    pub hyperslot: usize,
    /// Use the anytime exploration schedule instead of the horizon-tuned rate.
    pub anytime: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            learner: LearnerKind::Bsvbs,
            horizon: 10_000,
            seeds: vec![1],
            out_dir: None,
            hyperslot: 200,
            anytime: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceAxes,
    pub env: EnvConfig,
    pub reward: RewardConfig,
    pub run: RunSection,
    pub baseline: BaselineParams,
}

impl RunConfig {
    /// Reads a config file; `.json` files are parsed as JSON, anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = if path.extension().is_some_and(|e| e == "json") {
            RunConfig::from_json(&text)?
        } else {
            RunConfig::from_toml(&text)?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(p) = &config.env.trace_path {
            config.env.trace_path = Some(base.join(p));
        }
        if let Some(p) = &config.run.out_dir {
            config.run.out_dir = Some(base.join(p));
        }
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn space(&self) -> Result<ConfigurationSpace> {
        ConfigurationSpace::new(self.space.clone())
    }

    pub fn scenario(&self) -> ScenarioSpec {
        ScenarioSpec::new(self.env.scenario, self.env.contexts)
    }

    /// Checks everything that can be checked before a slot runs.
    pub fn validate(&self) -> Result<()> {
        let space = self.space()?;
        if space.cardinality() < 2 && self.run.learner == LearnerKind::Bsvbs {
            return Err(Error::DegenerateSpace(space.cardinality()));
        }
        if self.run.horizon == 0 {
            return Err(Error::Config("run.horizon must be at least 1".into()));
        }
        if self.run.seeds.is_empty() {
            return Err(Error::Config("run.seeds must list at least one seed".into()));
        }
        if self.run.hyperslot == 0 {
            return Err(Error::Config("run.hyperslot must be at least 1".into()));
        }
        if !(self.reward.delta > 0.0) || !self.reward.delta.is_finite() {
            return Err(Error::Config(format!(
                "reward.delta must be positive, got {}",
                self.reward.delta
            )));
        }
        match (self.reward.f_min, self.reward.f_max) {
            (Some(lo), Some(hi)) if !(hi > lo) => {
                return Err(Error::Config("reward.f_max must exceed reward.f_min".into()));
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(Error::Config("reward.f_min and reward.f_max must be given together".into()));
            }
            _ => {}
        }
        self.baseline.validate()?;
        self.scenario().validate()?;
        self.env.model.validate()?;
        if !(0.0..1.0).contains(&self.env.noise) {
            return Err(Error::Config(format!("env.noise must lie in [0, 1), got {}", self.env.noise)));
        }
        if self.env.mode == EnvMode::Trace {
            match &self.env.trace_path {
                None => return Err(Error::Config("env.mode = \"trace\" needs env.trace_path".into())),
                Some(p) if !p.is_file() => {
                    return Err(Error::Config(format!("trace file {} does not exist", p.display())));
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Validates and builds the environment (loading the trace if any).
    pub fn environment(&self) -> Result<Environment> {
        self.validate()?;
        let space = self.space()?;
        let model = match self.env.mode {
            EnvMode::Surrogate => EnvModel::Surrogate(self.env.model.clone()),
            EnvMode::Trace => {
                let path = self.env.trace_path.as_deref().expect("validated");
                EnvModel::Trace(Environment::load_trace(path, self.env.bucket, &space)?)
            }
        };
        Environment::new(space, model, self.scenario(), self.env.noise)
    }
}
