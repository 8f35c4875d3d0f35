//! Context sources and oblivious cost adversaries.
//!
//! Schedules are fully materialized before a run starts, so costs cannot
//! depend on the learner's actions.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::PolicyClass;
use crate::types::{Action, Context, CostVector, SIMPLEX_TOLERANCE};

/// Largest supported context universe.
pub const MAX_UNIVERSE: usize = 32;

// ── Context distribution ────────────────────────────────────────────────

/// The i.i.d. context distribution over ids `0..U`.
#[derive(Debug, Clone)]
pub struct ContextDistribution {
    probs: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl ContextDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.len() > MAX_UNIVERSE {
            return Err(Error::domain(format!(
                "context universe size {} outside 1..={MAX_UNIVERSE}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::domain("context probabilities must be non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::domain(format!("context probabilities sum to {total}")));
        }
        let sampler = WeightedIndex::new(&probs).map_err(|e| Error::domain(e.to_string()))?;
        Ok(Self { probs, sampler })
    }

    pub fn uniform(universe: usize) -> Result<Self> {
        if universe == 0 {
            return Err(Error::domain("context universe must be non-empty"));
        }
        Self::new(vec![1.0 / universe as f64; universe])
    }

    pub fn point_mass(universe: usize, id: u32) -> Result<Self> {
        if id as usize >= universe {
            return Err(Error::domain(format!("context {id} outside universe {universe}")));
        }
        let mut probs = vec![0.0; universe];
        probs[id as usize] = 1.0;
        Self::new(probs)
    }

    pub fn universe(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Context {
        Context(self.sampler.sample(rng) as u32)
    }

    /// Draws an i.i.d. sequence of `len` contexts.
    pub fn draw_sequence<R: RngCore + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<Context> {
        (0..len).map(|_| self.sample(rng)).collect()
    }
}

// ── Cost schedules ──────────────────────────────────────────────────────

/// A cost sequence fixed before the run.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSchedule {
    costs: Vec<CostVector>,
    /// Index of the policy the schedule was built to favor, if any.
    target_policy: Option<usize>,
}

impl CostSchedule {
    pub fn new(costs: Vec<CostVector>) -> Result<Self> {
        if let Some(first) = costs.first() {
            if costs.iter().any(|c| c.len() != first.len()) {
                return Err(Error::domain("cost vectors differ in length"));
            }
        }
        Ok(Self {
            costs,
            target_policy: None,
        })
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn cost(&self, round: usize) -> &CostVector {
        &self.costs[round]
    }

    pub fn costs(&self) -> &[CostVector] {
        &self.costs
    }

    pub fn target_policy(&self) -> Option<usize> {
        self.target_policy
    }
}

/// Oblivious adversary families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum AdversarySpec {
    /// Bernoulli costs: one hidden action has mean `(1 - gap)/2`, the
    /// others `(1 + gap)/2`.
    StochasticGap { gap: f64 },
    /// Deterministic costs `((a + phase) mod K)/(K - 1)`; the phase advances
    /// every `period` rounds.
    Drifting { period: usize },
    /// A hidden policy's action costs `(1 - gap)/2` every round; every other
    /// action costs at least `gap` more. Which other actions stay close
    /// flips every `period` rounds.
    PolicyTargeted { gap: f64, period: usize },
}

/// Materializes the schedule for a pre-drawn context sequence.
pub fn make_adversary<R: RngCore + ?Sized>(
    spec: &AdversarySpec,
    class: &PolicyClass,
    contexts: &[Context],
    rng: &mut R,
) -> Result<CostSchedule> {
    let k = class.num_actions();
    if k < 2 {
        return Err(Error::domain("adversaries need at least two actions"));
    }
    match *spec {
        AdversarySpec::StochasticGap { gap } => {
            check_gap(gap)?;
            let best = rng.random_range(0..k);
            let low = (1.0 - gap) / 2.0;
            let high = (1.0 + gap) / 2.0;
            let costs = contexts
                .iter()
                .map(|_| {
                    let entries = (0..k)
                        .map(|a| {
                            let mean = if a == best { low } else { high };
                            if rng.random::<f64>() < mean {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    CostVector::new(entries)
                })
                .collect::<Result<Vec<_>>>()?;
            CostSchedule::new(costs)
        }
        AdversarySpec::Drifting { period } => {
            check_period(period)?;
            let costs = (0..contexts.len())
                .map(|t| {
                    let phase = t / period;
                    CostVector::new(
                        (0..k)
                            .map(|a| ((a + phase) % k) as f64 / (k - 1) as f64)
                            .collect(),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            CostSchedule::new(costs)
        }
        AdversarySpec::PolicyTargeted { gap, period } => {
            check_gap(gap)?;
            check_period(period)?;
            if let Some(x) = contexts.iter().find(|x| !class.contains_context(**x)) {
                return Err(Error::domain(format!("context {} outside the policy universe", x.0)));
            }
            let target = rng.random_range(0..class.len());
            let low = (1.0 - gap) / 2.0;
            let close = low + gap;
            let costs = contexts
                .iter()
                .enumerate()
                .map(|(t, x)| {
                    let phase = (t / period) % 2;
                    let hidden = class.action(target, *x);
                    let entries = (0..k)
                        .map(|a| {
                            if Action(a) == hidden {
                                low
                            } else if (a + phase) % 2 == 0 {
                                close
                            } else {
                                close + rng.random::<f64>() * (1.0 - close)
                            }
                        })
                        .collect();
                    CostVector::new(entries)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut schedule = CostSchedule::new(costs)?;
            schedule.target_policy = Some(target);
            Ok(schedule)
        }
    }
}

fn check_gap(gap: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gap) {
        return Err(Error::domain(format!("gap {gap} outside [0, 1]")));
    }
    Ok(())
}

fn check_period(period: usize) -> Result<()> {
    if period == 0 {
        return Err(Error::domain("period must be at least 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::best_policy_loss;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_context_universe() {
        let d = ContextDistribution::uniform(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(d.draw_sequence(100, &mut rng).iter().all(|x| *x == Context(0)));
    }

    #[test]
    fn point_mass_always_returns_its_id() {
        let d = ContextDistribution::point_mass(5, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(d.draw_sequence(1000, &mut rng).iter().all(|x| *x == Context(3)));
    }

    #[test]
    fn even_split_frequencies_within_three_sigma() {
        let d = ContextDistribution::new(vec![0.5, 0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let ones = d.draw_sequence(n, &mut rng).iter().filter(|x| x.0 == 1).count();
        let sigma = (0.25 / n as f64).sqrt();
        assert!((ones as f64 / n as f64 - 0.5).abs() <= 3.0 * sigma);
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(ContextDistribution::new(vec![]).is_err());
        assert!(ContextDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ContextDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(ContextDistribution::new(vec![1.0 / 33.0; 33]).is_err());
        assert!(ContextDistribution::point_mass(3, 3).is_err());
    }

    fn class(k: usize) -> PolicyClass {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        PolicyClass::random(20, 6, k, &mut rng).unwrap()
    }

    #[test]
    fn full_gap_is_deterministic() {
        let class = class(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs = vec![Context(0); 50];
        let s = make_adversary(&AdversarySpec::StochasticGap { gap: 1.0 }, &class, &xs, &mut rng)
            .unwrap();
        let first = s.cost(0).clone();
        assert_eq!(first.as_slice().iter().filter(|c| **c == 0.0).count(), 1);
        assert_eq!(first.as_slice().iter().filter(|c| **c == 1.0).count(), 3);
        assert!(s.costs().iter().all(|c| *c == first));
    }

    #[test]
    fn drifting_with_full_period_is_constant() {
        let class = class(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xs = vec![Context(1); 40];
        let s = make_adversary(&AdversarySpec::Drifting { period: 40 }, &class, &xs, &mut rng)
            .unwrap();
        assert!(s.costs().iter().all(|c| c.as_slice() == [0.0, 0.5, 1.0]));
        let s = make_adversary(&AdversarySpec::Drifting { period: 10 }, &class, &xs, &mut rng)
            .unwrap();
        assert_eq!(s.cost(10).as_slice(), [0.5, 1.0, 0.0]);
    }

    #[test]
    fn policy_targeted_comparator_is_hidden_policy() {
        let class = class(5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dist = ContextDistribution::uniform(6).unwrap();
        let xs = dist.draw_sequence(400, &mut rng);
        let spec = AdversarySpec::PolicyTargeted { gap: 0.2, period: 50 };
        let s = make_adversary(&spec, &class, &xs, &mut rng).unwrap();
        let target = s.target_policy().unwrap();
        let hidden: f64 = xs
            .iter()
            .zip(s.costs())
            .map(|(x, c)| c.get(class.action(target, *x)))
            .sum();
        let best = best_policy_loss(&class, &xs, s.costs()).unwrap();
        assert!((best - hidden).abs() < 1e-9);
        assert!((best - 0.4 * 400.0).abs() < 1e-6);
        for (x, c) in xs.iter().zip(s.costs()) {
            let h = class.action(target, *x);
            for a in 0..5 {
                if Action(a) != h {
                    assert!(c.get(Action(a)) >= c.get(h) + 0.2 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn bad_adversary_parameters() {
        let class = class(3);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let xs = vec![Context(0)];
        for spec in [
            AdversarySpec::StochasticGap { gap: 1.5 },
            AdversarySpec::Drifting { period: 0 },
            AdversarySpec::PolicyTargeted { gap: -0.1, period: 3 },
        ] {
            assert!(make_adversary(&spec, &class, &xs, &mut rng).is_err());
        }
    }
}
