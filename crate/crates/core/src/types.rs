//! Domain types shared by the learners, oracle and harness.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for sum-to-one checks on probability vectors.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Upper bound on the action count; sign vectors are packed into one `u64`.
pub const MAX_ACTIONS: usize = 64;

// ── Contexts and actions ────────────────────────────────────────────────

/// Opaque context identifier, an index into a finite context universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Context(pub u32);

impl Context {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Zero-based action index in `0..K`.
///
/// The all-zeros element of the discretized cost domain is not an action; it
/// is represented by `EstimatedCost::coordinate() == None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Action(pub usize);

impl Action {
    pub fn index(self) -> usize {
        self.0
    }
}

// ── Cost vectors ────────────────────────────────────────────────────────

/// Per-action losses for one round, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostVector(Vec<f64>);

impl CostVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("cost vector must have at least one entry"));
        }
        if let Some((i, c)) = entries
            .iter()
            .enumerate()
            .find(|(_, c)| !(0.0..=1.0).contains(*c))
        {
            return Err(Error::domain(format!("cost[{i}] = {c} is outside [0, 1]")));
        }
        Ok(Self(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, action: Action) -> f64 {
        self.0[action.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Expected cost `q · c` of playing from `dist`.
    pub fn expected_under(&self, dist: &ActionDistribution) -> f64 {
        dist.probs().iter().zip(&self.0).map(|(p, c)| p * c).sum()
    }
}

// ── Action distributions ────────────────────────────────────────────────

/// A probability vector over the `K` actions.
///
/// `new` validates without touching the values; `from_weights` is the only
/// constructor that renormalizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionDistribution {
    probs: Vec<f64>,
}

impl ActionDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("distribution over zero actions"));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::domain(format!("probability[{i}] = {p} is not a non-negative real")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::domain("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::domain("weights sum to zero"));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(num_actions: usize) -> Self {
        assert!(num_actions > 0, "uniform distribution over zero actions");
        Self {
            probs: vec![1.0 / num_actions as f64; num_actions],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, action: Action) -> f64 {
        self.probs[action.index()]
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Inverse-CDF sampling from one uniform draw.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Action {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return Action(i);
            }
        }
        // u landed in the rounding gap above the last partial sum
        let last = self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0);
        Action(last)
    }
}

// ── Estimated costs ─────────────────────────────────────────────────────

/// The discretized importance-weighted estimate `L · X · e_played`.
///
/// Takes values in `{L·e_i} ∪ {0}`: either the zero vector or a single
/// coordinate equal to the scale `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatedCost {
    scale: f64,
    coordinate: Option<Action>,
}

impl EstimatedCost {
    pub fn zero(scale: f64) -> Self {
        Self {
            scale,
            coordinate: None,
        }
    }

    pub fn basis(action: Action, scale: f64) -> Self {
        Self {
            scale,
            coordinate: Some(action),
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn coordinate(&self) -> Option<Action> {
        self.coordinate
    }

    pub fn is_zero(&self) -> bool {
        self.coordinate.is_none()
    }

    pub fn value(&self, action: Action) -> f64 {
        match self.coordinate {
            Some(a) if a == action => self.scale,
            _ => 0.0,
        }
    }

    pub fn to_dense(&self, num_actions: usize) -> Vec<f64> {
        (0..num_actions).map(|i| self.value(Action(i))).collect()
    }
}

// ── Rademacher sign vectors ─────────────────────────────────────────────

/// A vector in `{-1, +1}^K` packed as bits; bit `i` set means `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignVector(pub u64);

impl SignVector {
    /// Uniform over all sign patterns (one `u64` draw).
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Self(rng.next_u64())
    }

    pub fn sign(self, action: Action) -> f64 {
        if (self.0 >> action.index()) & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }
}

// ── Sampled futures ─────────────────────────────────────────────────────

/// A draw of the future tuple `(x, ε, Z)` for rounds `t+1..T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FutureDraw {
    contexts: Vec<Context>,
    signs: Vec<SignVector>,
    magnitudes: Vec<f64>,
}

impl FutureDraw {
    pub fn empty() -> Self {
        Self {
            contexts: Vec::new(),
            signs: Vec::new(),
            magnitudes: Vec::new(),
        }
    }

    /// Every magnitude must be exactly `0` or `scale`.
    pub fn new(
        contexts: Vec<Context>,
        signs: Vec<SignVector>,
        magnitudes: Vec<f64>,
        scale: f64,
    ) -> Result<Self> {
        if contexts.len() != signs.len() || contexts.len() != magnitudes.len() {
            return Err(Error::domain(format!(
                "future draw lists differ in length: {} contexts, {} sign vectors, {} magnitudes",
                contexts.len(),
                signs.len(),
                magnitudes.len()
            )));
        }
        if let Some(z) = magnitudes.iter().find(|z| **z != 0.0 && **z != scale) {
            return Err(Error::domain(format!("magnitude {z} is neither 0 nor {scale}")));
        }
        Ok(Self {
            contexts,
            signs,
            magnitudes,
        })
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn signs(&self) -> &[SignVector] {
        &self.signs
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn iter(&self) -> impl Iterator<Item = (Context, SignVector, f64)> + '_ {
        self.contexts
            .iter()
            .zip(&self.signs)
            .zip(&self.magnitudes)
            .map(|((x, e), z)| (*x, *e, *z))
    }
}

// ── History ─────────────────────────────────────────────────────────────

/// What the learner retains about one finished round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryRecord {
    context: Context,
    played_dist: ActionDistribution,
    played_action: Action,
    observed_cost: f64,
    estimate: EstimatedCost,
}

impl HistoryRecord {
    pub fn new(
        context: Context,
        played_dist: ActionDistribution,
        played_action: Action,
        observed_cost: f64,
        estimate: EstimatedCost,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&observed_cost) {
            return Err(Error::domain(format!("observed cost {observed_cost} outside [0, 1]")));
        }
        if played_action.index() >= played_dist.len() {
            return Err(Error::domain("played action outside the distribution's support"));
        }
        if let Some(a) = estimate.coordinate() {
            if a != played_action {
                return Err(Error::domain(
                    "estimate's nonzero coordinate must be the played action",
                ));
            }
        }
        Ok(Self {
            context,
            played_dist,
            played_action,
            observed_cost,
            estimate,
        })
    }

    pub fn context(&self) -> Context {
        self.context
    }

    pub fn played_dist(&self) -> &ActionDistribution {
        &self.played_dist
    }

    pub fn played_action(&self) -> Action {
        self.played_action
    }

    pub fn observed_cost(&self) -> f64 {
        self.observed_cost
    }

    pub fn estimate(&self) -> &EstimatedCost {
        &self.estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cost_vector_rejects_out_of_range() {
        assert!(CostVector::new(vec![0.0, 1.0, 0.5]).is_ok());
        assert!(CostVector::new(vec![0.0, 1.01]).is_err());
        assert!(CostVector::new(vec![-0.1]).is_err());
        assert!(CostVector::new(vec![f64::NAN]).is_err());
        assert!(CostVector::new(vec![]).is_err());
    }

    #[test]
    fn distribution_checks_simplex_without_renormalizing() {
        let d = ActionDistribution::new(vec![0.25, 0.75 + 5e-10]).unwrap();
        assert_eq!(d.probs()[1], 0.75 + 5e-10);
        assert!(ActionDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ActionDistribution::new(vec![1.2, -0.2]).is_err());
        let w = ActionDistribution::from_weights(&[1.0, 3.0]).unwrap();
        assert_eq!(w.probs(), &[0.25, 0.75]);
        assert!(ActionDistribution::from_weights(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn sampling_never_returns_zero_probability_action() {
        let d = ActionDistribution::new(vec![0.0, 1.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            assert_eq!(d.sample(&mut rng), Action(1));
        }
    }

    #[test]
    fn estimate_lives_in_discretized_domain() {
        let e = EstimatedCost::basis(Action(1), 4.0);
        assert_eq!(e.to_dense(3), vec![0.0, 4.0, 0.0]);
        assert_eq!(EstimatedCost::zero(4.0).to_dense(3), vec![0.0; 3]);
    }

    #[test]
    fn future_draw_enforces_equal_lengths_and_magnitudes() {
        let x = vec![Context(0), Context(1)];
        let e = vec![SignVector(0), SignVector(1)];
        assert!(FutureDraw::new(x.clone(), e.clone(), vec![0.0, 4.0], 4.0).is_ok());
        assert!(FutureDraw::new(x.clone(), e.clone(), vec![0.0, 3.0], 4.0).is_err());
        assert!(FutureDraw::new(x, e, vec![0.0], 4.0).is_err());
    }

    #[test]
    fn sign_vector_reads_bits() {
        let s = SignVector(0b101);
        assert_eq!(s.sign(Action(0)), 1.0);
        assert_eq!(s.sign(Action(1)), -1.0);
        assert_eq!(s.sign(Action(2)), 1.0);
    }

    #[test]
    fn history_record_ties_estimate_to_played_action() {
        let d = ActionDistribution::uniform(3);
        assert!(HistoryRecord::new(
            Context(0),
            d.clone(),
            Action(2),
            0.5,
            EstimatedCost::basis(Action(2), 3.0)
        )
        .is_ok());
        assert!(HistoryRecord::new(
            Context(0),
            d.clone(),
            Action(2),
            0.5,
            EstimatedCost::basis(Action(1), 3.0)
        )
        .is_err());
        assert!(HistoryRecord::new(Context(0), d, Action(0), 1.5, EstimatedCost::zero(3.0)).is_err());
    }
}
