//! Oracle-efficient learning for adversarial contextual bandits.
//!
//! The learner in [`learner`] plays against an oblivious cost sequence while
//! touching the policy class only through a value oracle: an offline
//! optimizer that returns the smallest cumulative loss any policy attains on
//! a weighted example sequence. Each round it draws a random "future"
//! (contexts, Rademacher sign vectors and scaled Bernoulli magnitudes), makes
//! `K + 1` oracle calls to score the actions, solves the resulting minimax
//! problem by water-filling, mixes in uniform exploration and plays. Regret
//! against the best policy is `O((KT)^{2/3} (log N)^{1/3})`.
//!
//! Module map:
//!
//! - [`types`], [`estimator`]: shared domain types and the discretized
//!   importance-weighted cost estimate.
//! - [`policy`]: finite policy tables and the enumeration value oracle.
//! - [`learner`], [`minimax`]: the relaxation learner and its per-round
//!   minimax solver.
//! - [`baselines`]: Exp4 and uniform play for comparison.
//! - [`environment`]: context distributions and oblivious cost schedules.
//! - [`harness`]: experiment configs, replications, bounds, verification
//!   oracles and CSV/JSON output.

pub mod baselines;
pub mod environment;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod learner;
pub mod minimax;
pub mod policy;
pub mod rng;
pub mod types;

pub use error::{Error, FieldError, Result};
pub use types::{
    Action, ActionDistribution, Context, CostVector, EstimatedCost, FutureDraw, HistoryRecord,
    SignVector, SIMPLEX_TOLERANCE,
};
