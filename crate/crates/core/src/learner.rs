//! The relaxation-based contextual bandit learner.
//!
//! Each round `t` the learner
//!
//! 1. draws a future `ρ_t = (x, ε, Z)_{t+1..T}`: contexts from the context
//!    sampler (or the known sequence in transductive mode), Rademacher sign
//!    vectors, and magnitudes `Z = L` with probability `K/L`, else `0`;
//! 2. calls the value oracle `K + 1` times on the past estimates, the future
//!    terms `2 ε Z`, and an extra `L e_i` at the current context (none for
//!    `ψ_0`);
//! 3. water-fills `φ_i = (ψ_i − ψ_0)/L` and mixes with uniform;
//! 4. samples an action, observes its cost and records the estimate
//!    `L X e_played`, with `X`'s success probability taken from the
//!    distribution it actually played.
//!
//! Random draws happen in a fixed order so a seed pins the whole trace: for
//! each future round, the context (sampler mode only), then one `f64` for
//! `Z`, then one `u64` for the sign vector; then one `f64` for the action;
//! then one `f64` for the estimator coin.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::environment::ContextDistribution;
use crate::error::{Error, Result};
use crate::estimator::{build_estimate, coin_probability};
use crate::minimax::{strategy, OracleScores, RemainderRule};
use crate::policy::{LossTable, LossVector, ValueOracle};
use crate::types::{
    Action, ActionDistribution, Context, FutureDraw, HistoryRecord, SignVector, MAX_ACTIONS,
};

// ── Configuration ───────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextMode {
    /// Future contexts are sampled from the context distribution.
    IidSampler,
    /// The full context sequence is known in advance.
    Transductive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    pub num_actions: usize,
    pub horizon: usize,
    /// The discretization level `L`; kept real-valued.
    pub scale: f64,
    pub mode: ContextMode,
    pub remainder: RemainderRule,
}

impl LearnerConfig {
    pub fn new(num_actions: usize, horizon: usize, scale: f64, mode: ContextMode) -> Result<Self> {
        let config = Self {
            num_actions,
            horizon,
            scale,
            mode,
            remainder: RemainderRule::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_ACTIONS).contains(&self.num_actions) {
            return Err(Error::domain(format!(
                "K = {} outside 2..={MAX_ACTIONS}",
                self.num_actions
            )));
        }
        if self.horizon == 0 {
            return Err(Error::domain("horizon T must be at least 1"));
        }
        if !self.scale.is_finite() || self.scale < self.num_actions as f64 {
            return Err(Error::domain(format!(
                "L = {} must be at least K = {}",
                self.scale, self.num_actions
            )));
        }
        Ok(())
    }

    /// Probability that a future magnitude is nonzero.
    pub fn magnitude_prob(&self) -> f64 {
        self.num_actions as f64 / self.scale
    }
}

/// A tuned discretization level and whether `T ≥ K² ln N` held.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TunedScale {
    pub value: f64,
    pub in_regime: bool,
}

/// `L = max(K, (K T / ln N)^{1/3})`, clamped to `K` when `T < K² ln N`.
pub fn tune_scale(num_actions: usize, horizon: usize, num_policies: usize) -> Result<TunedScale> {
    if num_policies < 2 {
        return Err(Error::domain(format!(
            "tuning L needs N >= 2 policies, got {num_policies}"
        )));
    }
    let k = num_actions as f64;
    let t = horizon as f64;
    let log_n = (num_policies as f64).ln();
    if t < k * k * log_n {
        return Ok(TunedScale {
            value: k,
            in_regime: false,
        });
    }
    Ok(TunedScale {
        value: (k * t / log_n).cbrt().max(k),
        in_regime: true,
    })
}

// ── Future draws ────────────────────────────────────────────────────────

/// Where the learner gets future contexts from.
#[derive(Debug, Clone)]
pub enum ContextSource {
    Sampler(ContextDistribution),
    /// The whole sequence `x_1..x_T`.
    Known(Vec<Context>),
}

/// Draws `ρ_t` for rounds `t+1..=T` (`t` is 1-based; `t = 0` gives the
/// draw for the relaxation's starting value).
pub fn sample_future<R: RngCore + ?Sized>(
    t: usize,
    config: &LearnerConfig,
    source: &ContextSource,
    rng: &mut R,
) -> Result<FutureDraw> {
    if t > config.horizon {
        return Err(Error::domain(format!("round {t} beyond horizon {}", config.horizon)));
    }
    let remaining = config.horizon - t;
    let z_prob = config.magnitude_prob();
    let mut contexts = Vec::with_capacity(remaining);
    let mut signs = Vec::with_capacity(remaining);
    let mut magnitudes = Vec::with_capacity(remaining);
    for i in 0..remaining {
        let x = match (config.mode, source) {
            (ContextMode::IidSampler, ContextSource::Sampler(dist)) => dist.sample(rng),
            (ContextMode::Transductive, ContextSource::Known(seq)) => {
                *seq.get(t + i).ok_or_else(|| {
                    Error::domain(format!("known context sequence shorter than T = {}", config.horizon))
                })?
            }
            _ => return Err(Error::domain("context source does not match the learner's mode")),
        };
        let z = if rng.random::<f64>() < z_prob {
            config.scale
        } else {
            0.0
        };
        contexts.push(x);
        magnitudes.push(z);
        signs.push(SignVector::random(rng));
    }
    FutureDraw::new(contexts, signs, magnitudes, config.scale)
}

// ── Oracle scores and relaxation value ──────────────────────────────────

fn check_oracle<O: ValueOracle + ?Sized>(oracle: &O, config: &LearnerConfig) -> Result<()> {
    if oracle.num_actions() != config.num_actions {
        return Err(Error::domain(format!(
            "oracle has K = {}, learner K = {}",
            oracle.num_actions(),
            config.num_actions
        )));
    }
    Ok(())
}

/// Aggregates the past estimates `(x_τ, ĉ_τ)`.
pub fn history_table(history: &[HistoryRecord], universe: usize, num_actions: usize) -> Result<LossTable> {
    let mut table = LossTable::new(universe, num_actions);
    for rec in history {
        table.add(rec.context(), &LossVector::from(rec.estimate()))?;
    }
    Ok(table)
}

/// Aggregates the future terms `(x_τ, 2 ε_τ Z_τ)`.
pub fn future_table(rho: &FutureDraw, universe: usize, num_actions: usize) -> Result<LossTable> {
    let mut table = LossTable::new(universe, num_actions);
    for (x, signs, z) in rho.iter() {
        if z != 0.0 {
            table.add(
                x,
                &LossVector::Signed {
                    signs,
                    magnitude: 2.0 * z,
                },
            )?;
        } else if x.index() >= universe {
            return Err(Error::domain(format!("context {} outside universe {universe}", x.0)));
        }
    }
    Ok(table)
}

/// `ψ_0..ψ_K` from a table holding the past and future terms; `K + 1`
/// oracle calls.
fn scores_from_base<O: ValueOracle + ?Sized>(
    base: &LossTable,
    context: Context,
    config: &LearnerConfig,
    oracle: &O,
) -> Result<OracleScores> {
    if context.index() >= base.universe() {
        return Err(Error::domain(format!("context {} outside universe", context.0)));
    }
    let mut psi = Vec::with_capacity(config.num_actions + 1);
    psi.push(oracle.value(base)?);
    let mut probe = base.clone();
    for a in 0..config.num_actions {
        probe.add_at(context, Action(a), config.scale);
        psi.push(oracle.value(&probe)?);
        probe.add_at(context, Action(a), -config.scale);
    }
    OracleScores::from_psi(psi, config.scale)
}

/// Scores for round `t = history.len() + 1` at context `context`.
pub fn oracle_scores<O: ValueOracle + ?Sized>(
    history: &[HistoryRecord],
    context: Context,
    rho: &FutureDraw,
    config: &LearnerConfig,
    oracle: &O,
) -> Result<OracleScores> {
    check_oracle(oracle, config)?;
    let mut base = history_table(history, oracle.universe(), config.num_actions)?;
    base.merge(&future_table(rho, oracle.universe(), config.num_actions)?);
    scores_from_base(&base, context, config, oracle)
}

/// `−min_π (Σ_{τ≤t} ĉ_τ(π(x_τ)) + Σ_{τ>t} 2 ε_τ(π(x_τ)) Z_τ) + (T − t) K / L`
/// for `t = history.len()`. One oracle call.
pub fn relaxation_value<O: ValueOracle + ?Sized>(
    history: &[HistoryRecord],
    rho: &FutureDraw,
    config: &LearnerConfig,
    oracle: &O,
) -> Result<f64> {
    check_oracle(oracle, config)?;
    let t = history.len();
    if t > config.horizon || t + rho.len() != config.horizon {
        return Err(Error::domain(format!(
            "history of {t} rounds and a future of {} do not cover T = {}",
            rho.len(),
            config.horizon
        )));
    }
    let mut table = history_table(history, oracle.universe(), config.num_actions)?;
    table.merge(&future_table(rho, oracle.universe(), config.num_actions)?);
    let value = oracle.value(&table)?;
    Ok(-value + (config.horizon - t) as f64 * config.magnitude_prob())
}

// ── Learner interface ───────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub distribution: ActionDistribution,
    pub action: Action,
}

/// A bandit learner driven one round at a time by the harness.
pub trait BanditLearner {
    fn decide(&mut self, context: Context, rng: &mut dyn RngCore) -> Result<Decision>;

    /// Feeds back the played action's cost. Returns the estimator coin's
    /// success probability for learners that draw one.
    fn observe(&mut self, cost: f64, rng: &mut dyn RngCore) -> Result<Option<f64>>;

    /// Oracle calls made so far.
    fn oracle_calls(&self) -> u64 {
        0
    }
}

// ── Relaxation learner ──────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub decision: Decision,
    pub cost: f64,
    pub coin_probability: f64,
    pub estimate: crate::types::EstimatedCost,
}

#[derive(Debug)]
pub struct RelaxationLearner<O: ValueOracle> {
    config: LearnerConfig,
    oracle: O,
    source: ContextSource,
    history: Vec<HistoryRecord>,
    past: LossTable,
    pending: Option<(Context, Decision)>,
}

impl<O: ValueOracle> RelaxationLearner<O> {
    pub fn new(config: LearnerConfig, oracle: O, source: ContextSource) -> Result<Self> {
        config.validate()?;
        check_oracle(&oracle, &config)?;
        match (&config.mode, &source) {
            (ContextMode::IidSampler, ContextSource::Sampler(d)) => {
                if d.universe() != oracle.universe() {
                    return Err(Error::domain("context sampler and policy class disagree on U"));
                }
            }
            (ContextMode::Transductive, ContextSource::Known(seq)) => {
                if seq.len() != config.horizon {
                    return Err(Error::domain("known context sequence must have length T"));
                }
            }
            _ => return Err(Error::domain("context source does not match the learner's mode")),
        }
        let past = LossTable::new(oracle.universe(), config.num_actions);
        Ok(Self {
            config,
            oracle,
            source,
            history: Vec::new(),
            past,
            pending: None,
        })
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    pub fn history(&self) -> &[HistoryRecord] {
        &self.history
    }

    /// Next round, 1-based.
    pub fn round(&self) -> usize {
        self.history.len() + 1
    }

    /// Scores at `context` against a given future draw, reusing the
    /// incrementally maintained past table.
    pub fn scores(&self, context: Context, rho: &FutureDraw) -> Result<OracleScores> {
        let mut base = self.past.clone();
        base.merge(&future_table(rho, self.oracle.universe(), self.config.num_actions)?);
        scores_from_base(&base, context, &self.config, &self.oracle)
    }

    fn decide_inner<R: RngCore + ?Sized>(&mut self, context: Context, rng: &mut R) -> Result<Decision> {
        if self.pending.is_some() {
            return Err(Error::domain("decide called twice without observe"));
        }
        let t = self.round();
        if t > self.config.horizon {
            return Err(Error::domain(format!("round {t} beyond horizon {}", self.config.horizon)));
        }
        if let ContextSource::Known(seq) = &self.source {
            if seq[t - 1] != context {
                return Err(Error::domain(format!(
                    "round {t} context {} differs from the known sequence",
                    context.0
                )));
            }
        }
        let rho = sample_future(t, &self.config, &self.source, rng)?;
        let scores = self.scores(context, &rho)?;
        let distribution = strategy(&scores, self.config.scale, self.config.remainder)?;
        let action = distribution.sample(rng);
        let decision = Decision {
            distribution,
            action,
        };
        self.pending = Some((context, decision.clone()));
        Ok(decision)
    }

    fn observe_inner<R: RngCore + ?Sized>(&mut self, cost: f64, rng: &mut R) -> Result<(f64, crate::types::EstimatedCost)> {
        let (context, decision) = self
            .pending
            .take()
            .ok_or_else(|| Error::domain("observe called without a pending decision"))?;
        let prob = decision.distribution.prob(decision.action);
        let coin_prob = coin_probability(cost, prob, self.config.scale)?;
        let coin = rng.random::<f64>() < coin_prob;
        let estimate = build_estimate(decision.action, coin, self.config.scale);
        if coin {
            self.past.add_at(context, decision.action, self.config.scale);
        }
        self.history.push(HistoryRecord::new(
            context,
            decision.distribution,
            decision.action,
            cost,
            estimate,
        )?);
        Ok((coin_prob, estimate))
    }

    /// One full round: decide, look up the cost of the played action,
    /// record the estimate.
    pub fn step<R, F>(&mut self, context: Context, cost_of: F, rng: &mut R) -> Result<StepOutcome>
    where
        R: RngCore + ?Sized,
        F: FnOnce(Action) -> f64,
    {
        let decision = self.decide_inner(context, rng)?;
        let cost = cost_of(decision.action);
        let (coin_probability, estimate) = self.observe_inner(cost, rng)?;
        Ok(StepOutcome {
            decision,
            cost,
            coin_probability,
            estimate,
        })
    }
}

impl<O: ValueOracle> BanditLearner for RelaxationLearner<O> {
    fn decide(&mut self, context: Context, rng: &mut dyn RngCore) -> Result<Decision> {
        self.decide_inner(context, rng)
    }

    fn observe(&mut self, cost: f64, rng: &mut dyn RngCore) -> Result<Option<f64>> {
        self.observe_inner(cost, rng).map(|(p, _)| Some(p))
    }

    fn oracle_calls(&self) -> u64 {
        self.oracle.calls()
    }
}
