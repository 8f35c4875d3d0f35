//! Reference learners: Exp4 over the explicit policy table, and uniform play.

use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::learner::{BanditLearner, Decision};
use crate::policy::PolicyClass;
use crate::types::{Action, ActionDistribution, Context};

// ── Exp4 ────────────────────────────────────────────────────────────────

/// Exponential weights over policies with `γ`-uniform exploration.
///
/// `γ = min(1, scale · sqrt(K ln N / (T K)))` and `η = sqrt(2 ln N / (T K))`.
/// Each round the played action's cost is importance weighted by its
/// probability and charged to every policy that would have played it.
#[derive(Debug, Clone)]
pub struct Exp4 {
    class: Arc<PolicyClass>,
    log_weights: Vec<f64>,
    learning_rate: f64,
    gamma: f64,
    pending: Option<(Context, Decision)>,
}

impl Exp4 {
    pub fn new(class: Arc<PolicyClass>, horizon: usize, gamma_scale: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::domain("horizon must be at least 1"));
        }
        if !gamma_scale.is_finite() || gamma_scale < 0.0 {
            return Err(Error::domain("gamma scale must be non-negative"));
        }
        let k = class.num_actions() as f64;
        let t = horizon as f64;
        let log_n = (class.len() as f64).ln();
        let gamma = (gamma_scale * (k * log_n / (t * k)).sqrt()).min(1.0);
        let learning_rate = (2.0 * log_n / (t * k)).sqrt();
        Ok(Self {
            log_weights: vec![0.0; class.len()],
            class,
            learning_rate,
            gamma,
            pending: None,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Policy-weighted action profile mixed with `γ`-uniform.
    pub fn distribution(&self, context: Context) -> Result<ActionDistribution> {
        if !self.class.contains_context(context) {
            return Err(Error::domain(format!("context {} outside the policy universe", context.0)));
        }
        let k = self.class.num_actions();
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut profile = vec![0.0; k];
        let mut total = 0.0;
        for (p, lw) in self.log_weights.iter().enumerate() {
            let w = (lw - max).exp();
            profile[self.class.action(p, context).index()] += w;
            total += w;
        }
        let explore = self.gamma / k as f64;
        ActionDistribution::from_weights(
            &profile
                .iter()
                .map(|w| (1.0 - self.gamma) * w / total + explore)
                .collect::<Vec<_>>(),
        )
    }

    /// Shifts log-weights so the largest is zero.
    fn renormalize(&mut self) {
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.log_weights.iter_mut().for_each(|w| *w -= max);
    }
}

impl BanditLearner for Exp4 {
    fn decide(&mut self, context: Context, rng: &mut dyn RngCore) -> Result<Decision> {
        if self.pending.is_some() {
            return Err(Error::domain("decide called twice without observe"));
        }
        let distribution = self.distribution(context)?;
        let action = distribution.sample(rng);
        let decision = Decision {
            distribution,
            action,
        };
        self.pending = Some((context, decision.clone()));
        Ok(decision)
    }

    fn observe(&mut self, cost: f64, _rng: &mut dyn RngCore) -> Result<Option<f64>> {
        if !(0.0..=1.0).contains(&cost) {
            return Err(Error::domain(format!("cost {cost} outside [0, 1]")));
        }
        let (context, decision) = self
            .pending
            .take()
            .ok_or_else(|| Error::domain("observe called without a pending decision"))?;
        let weighted = cost / decision.distribution.prob(decision.action);
        for (p, lw) in self.log_weights.iter_mut().enumerate() {
            if self.class.action(p, context) == decision.action {
                *lw -= self.learning_rate * weighted;
            }
        }
        self.renormalize();
        Ok(None)
    }
}

// ── Uniform ─────────────────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct UniformLearner {
    num_actions: usize,
}

impl UniformLearner {
    pub fn new(num_actions: usize) -> Result<Self> {
        if num_actions == 0 {
            return Err(Error::domain("uniform learner over zero actions"));
        }
        Ok(Self { num_actions })
    }
}

/// Uniform distribution and an action sampled from it.
pub fn uniform_step<R: RngCore + ?Sized>(num_actions: usize, rng: &mut R) -> (ActionDistribution, Action) {
    let dist = ActionDistribution::uniform(num_actions);
    let action = dist.sample(rng);
    (dist, action)
}

impl BanditLearner for UniformLearner {
    fn decide(&mut self, _context: Context, rng: &mut dyn RngCore) -> Result<Decision> {
        let (distribution, action) = uniform_step(self.num_actions, rng);
        Ok(Decision {
            distribution,
            action,
        })
    }

    fn observe(&mut self, cost: f64, _rng: &mut dyn RngCore) -> Result<Option<f64>> {
        if !(0.0..=1.0).contains(&cost) {
            return Err(Error::domain(format!("cost {cost} outside [0, 1]")));
        }
        Ok(None)
    }
}
