//! The per-round minimax problem solved by the relaxation learner.
//!
//! Given oracle scores `ψ_0..ψ_K`, the learner wants
//!
//! ```text
//!   argmin_{q ∈ Δ_K}  sup_{p ∈ Δ'_D}  Σ_i p(i) (L q(i) − ψ_i) − p(0) ψ_0
//! ```
//!
//! where `Δ'_D` caps every nonzero atom at `1/L`. For `L ≥ K` the inner
//! supremum has the closed form `Σ_i (z_i − z_0)^+ / L + z_0` with
//! `z_i = L q(i) − ψ_i`, `z_0 = −ψ_0`, which reduces the outer problem to
//! minimizing `Σ_i (q(i) − φ_i)^+` with `φ_i = (ψ_i − ψ_0)/L`. Water-filling
//! solves that exactly.

use crate::error::{Error, Result};
use crate::types::ActionDistribution;

/// `ψ_0..ψ_K` from the oracle and the derived `φ_i = (ψ_i − ψ_0)/L`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleScores {
    psi: Vec<f64>,
    phi: Vec<f64>,
}

impl OracleScores {
    /// `psi[0]` is the score with no extra term; `psi[i]` adds `L` to action `i-1`.
    pub fn from_psi(psi: Vec<f64>, scale: f64) -> Result<Self> {
        if psi.len() < 2 {
            return Err(Error::domain("need scores for the zero term and at least one action"));
        }
        if psi.iter().any(|v| !v.is_finite()) || !scale.is_finite() || scale <= 0.0 {
            return Err(Error::domain("scores and scale must be finite"));
        }
        let phi = psi[1..].iter().map(|p| (p - psi[0]) / scale).collect();
        Ok(Self { psi, phi })
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn num_actions(&self) -> usize {
        self.phi.len()
    }
}

/// Where water-filling puts leftover mass. Any choice is a minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RemainderRule {
    /// All of it on the largest `φ_i`, ties to the lowest index.
    #[default]
    ArgmaxPhi,
    /// Spread evenly over all coordinates.
    Uniform,
}

/// Sequential capped fill: `q(i) = min{φ_i^+, m}` for `i = 1..K` in order,
/// then the remainder `m` per `rule`.
///
/// # Panics
/// If `phi` is empty.
pub fn water_fill(phi: &[f64], rule: RemainderRule) -> ActionDistribution {
    assert!(!phi.is_empty(), "water_fill over zero actions");
    let mut q = vec![0.0; phi.len()];
    let mut remaining = 1.0f64;
    for (qi, &p) in q.iter_mut().zip(phi) {
        let take = p.max(0.0).min(remaining);
        *qi = take;
        remaining -= take;
    }
    if remaining > 0.0 {
        match rule {
            RemainderRule::ArgmaxPhi => {
                let mut best = 0;
                for (i, &p) in phi.iter().enumerate() {
                    if p > phi[best] {
                        best = i;
                    }
                }
                q[best] += remaining;
            }
            RemainderRule::Uniform => {
                let share = remaining / phi.len() as f64;
                q.iter_mut().for_each(|v| *v += share);
            }
        }
    }
    ActionDistribution::new(q).expect("water-filling yields a distribution")
}

/// Exact `sup_{p ∈ Δ'_D} Σ_i p(i) z_i + p(0) z_0` via the closed form.
pub fn inner_sup_value(q: &ActionDistribution, scores: &OracleScores, scale: f64) -> Result<f64> {
    let k = scores.num_actions();
    if q.len() != k {
        return Err(Error::domain(format!("distribution has {} actions, scores {k}", q.len())));
    }
    if scale < k as f64 {
        return Err(Error::domain(format!("closed form needs L >= K, got L = {scale}, K = {k}")));
    }
    let z0 = -scores.psi()[0];
    let excess: f64 = q
        .probs()
        .iter()
        .zip(&scores.psi()[1..])
        .map(|(qi, psi)| (scale * qi - psi - z0).max(0.0))
        .sum();
    Ok(excess / scale + z0)
}

/// Mixes the minimax solution with uniform exploration:
/// `(1 − K/L) q* + (1/L) 1`, so every action keeps probability `≥ 1/L`.
pub fn mix_with_uniform(q_star: &ActionDistribution, scale: f64) -> Result<ActionDistribution> {
    let k = q_star.len() as f64;
    if !scale.is_finite() || scale < k {
        return Err(Error::domain(format!("mixing needs L >= K, got L = {scale}, K = {k}")));
    }
    let keep = 1.0 - k / scale;
    let floor = 1.0 / scale;
    ActionDistribution::new(q_star.probs().iter().map(|p| keep * p + floor).collect())
}

/// Water-fill then mix: the distribution actually played.
pub fn strategy(scores: &OracleScores, scale: f64, rule: RemainderRule) -> Result<ActionDistribution> {
    mix_with_uniform(&water_fill(scores.phi(), rule), scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn fill_with_leftover_goes_to_argmax() {
        let q = water_fill(&[0.5, -0.2, 0.3], RemainderRule::ArgmaxPhi);
        assert_close(q.probs(), &[0.7, 0.0, 0.3]);
    }

    #[test]
    fn all_negative_phi_goes_to_lowest_index() {
        let q = water_fill(&[-1.0, -1.0], RemainderRule::ArgmaxPhi);
        assert_close(q.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn fill_stops_when_mass_runs_out() {
        let q = water_fill(&[0.8, 0.9], RemainderRule::ArgmaxPhi);
        assert_close(q.probs(), &[0.8, 0.2]);
    }

    #[test]
    fn uniform_remainder() {
        let q = water_fill(&[0.5, -0.2, 0.3], RemainderRule::Uniform);
        assert_close(q.probs(), &[0.5 + 0.2 / 3.0, 0.2 / 3.0, 0.3 + 0.2 / 3.0]);
    }

    #[test]
    fn inner_sup_closed_form_example() {
        let scores = OracleScores::from_psi(vec![0.0, 0.0, 0.0], 4.0).unwrap();
        let v = inner_sup_value(&ActionDistribution::uniform(2), &scores, 4.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_sup_cancellation() {
        let l = 5.0;
        let q = ActionDistribution::new(vec![0.2, 0.5, 0.3]).unwrap();
        let psi0 = 1.7;
        let mut psi = vec![psi0];
        psi.extend(q.probs().iter().map(|p| l * p + psi0));
        let scores = OracleScores::from_psi(psi, l).unwrap();
        assert!((inner_sup_value(&q, &scores, l).unwrap() + psi0).abs() < 1e-12);
    }

    #[test]
    fn inner_sup_requires_scale_at_least_k() {
        let scores = OracleScores::from_psi(vec![0.0; 4], 2.0).unwrap();
        assert!(inner_sup_value(&ActionDistribution::uniform(3), &scores, 2.0).is_err());
    }

    #[test]
    fn mixing_examples() {
        let q = ActionDistribution::new(vec![0.6, 0.4]).unwrap();
        assert_close(mix_with_uniform(&q, 4.0).unwrap().probs(), &[0.55, 0.45]);
        assert_close(mix_with_uniform(&q, 2.0).unwrap().probs(), &[0.5, 0.5]);
        assert!(mix_with_uniform(&q, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn strategy_respects_exploration_floor(
            psi in proptest::collection::vec(-50.0f64..50.0, 2..9),
            extra in 0.0f64..20.0,
        ) {
            let k = psi.len() - 1;
            let l = k as f64 + extra;
            let scores = OracleScores::from_psi(psi, l).unwrap();
            let q = strategy(&scores, l, RemainderRule::ArgmaxPhi).unwrap();
            prop_assert!(q.min_prob() >= 1.0 / l - 1e-12);
            prop_assert!((q.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn inner_sup_is_shifted_hinge_objective(
            psi in proptest::collection::vec(-5.0f64..5.0, 4),
            w in proptest::collection::vec(0.01f64..1.0, 3),
            extra in 0.0f64..4.0,
        ) {
            let l = 3.0 + extra;
            let scores = OracleScores::from_psi(psi, l).unwrap();
            let q = ActionDistribution::from_weights(&w).unwrap();
            let hinge: f64 = q.probs().iter().zip(scores.phi()).map(|(a, b)| (a - b).max(0.0)).sum();
            let v = inner_sup_value(&q, &scores, l).unwrap();
            prop_assert!((v - (hinge - scores.psi()[0])).abs() < 1e-9);
        }

        #[test]
        fn both_remainder_rules_are_minimizers(
            phi in proptest::collection::vec(-1.0f64..1.0, 2..7),
        ) {
            let hinge = |q: &ActionDistribution| -> f64 {
                q.probs().iter().zip(&phi).map(|(a, b)| (a - b).max(0.0)).sum()
            };
            let a = hinge(&water_fill(&phi, RemainderRule::ArgmaxPhi));
            let b = hinge(&water_fill(&phi, RemainderRule::Uniform));
            let pos: f64 = phi.iter().map(|p| p.max(0.0)).sum();
            let neg: f64 = phi.iter().map(|p| (-p).max(0.0)).sum();
            let optimum = neg + (1.0 - pos).max(0.0);
            prop_assert!((a - optimum).abs() < 1e-12);
            prop_assert!((b - optimum).abs() < 1e-12);
        }
    }
}
