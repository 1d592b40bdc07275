//! Adversarial-bandit selection of radio policies for virtualized base stations.
//!
//! The scheduler is Exp3 over a finite grid of radio policies
//! ([`space::ConfigurationSpace`]), rewarded with a throughput utility minus a
//! weighted power draw ([`reward`]). The rest of the crate is a simulator to
//! exercise it: slot contexts and a surrogate or trace-driven vBS
//! ([`environment`]), comparison learners ([`baselines`]), regret and power
//! metrics ([`metrics`]) and an experiment driver ([`harness`]).

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod config;
pub mod environment;
pub mod error;
pub mod harness;
pub mod learner;
pub mod metrics;
pub mod plot;
pub mod reward;
pub mod rng;
pub mod space;

pub use baselines::{oracle_best_fixed, Learner, LearnerKind};
pub use config::RunConfig;
pub use environment::{Environment, Scenario, SlotContext};
pub use error::{Error, Result};
pub use learner::{regret_bound, ArmDistribution, Exp3};
pub use reward::RewardScaler;
pub use space::{ConfigurationSpace, RadioPolicy};
