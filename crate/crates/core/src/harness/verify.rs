//! Brute-force verification oracles and the property suites behind the
//! `verify` subcommand.
//!
//! Everything here recomputes a quantity by a route that does not share code
//! with the learner: grid search over the simplex instead of water-filling,
//! LP vertex enumeration instead of the closed-form inner supremum, Monte
//! Carlo instead of analytic expectations.

use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::environment::ContextDistribution;
use crate::error::{Error, Result};
use crate::estimator::{build_estimate, coin_probability, draw_estimator_coin};
use crate::harness::bounds::rademacher_bound;
use crate::learner::{
    oracle_scores, relaxation_value, sample_future, ContextMode, ContextSource, LearnerConfig,
};
use crate::minimax::{inner_sup_value, strategy, water_fill, OracleScores, RemainderRule};
use crate::policy::{EnumerationOracle, PolicyClass};
use crate::rng;
use crate::types::{Action, ActionDistribution, Context, EstimatedCost, HistoryRecord};

// ── Minimax oracles ─────────────────────────────────────────────────────

/// Every point of `Δ_K` whose coordinates are multiples of `1/steps`.
pub fn simplex_grid(num_actions: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, steps: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.iter().map(|c| *c as f64 / steps as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k - 1, left - c, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(num_actions, steps, steps, &mut Vec::new(), &mut out);
    out
}

/// Grid search for `argmin_q inner_sup_value(q)` over `Δ_K` with the given mesh.
pub fn brute_force_minimax(scores: &OracleScores, scale: f64, mesh: f64) -> Result<(ActionDistribution, f64)> {
    let k = scores.num_actions();
    if k > 3 {
        return Err(Error::domain(format!("grid search supports K <= 3, got {k}")));
    }
    if !(mesh > 0.0 && mesh <= 1.0) {
        return Err(Error::domain(format!("mesh {mesh} outside (0, 1]")));
    }
    let steps = (1.0 / mesh).round() as usize;
    let mut best: Option<(ActionDistribution, f64)> = None;
    for point in simplex_grid(k, steps) {
        let q = ActionDistribution::new(point)?;
        let v = inner_sup_value(&q, scores, scale)?;
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((q, v));
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// `sup_{p ∈ Δ'_D} Σ_i p(i) z_i + p(0) z_0` by enumerating the LP's basic
/// feasible solutions: one free coordinate fixed by `Σ p = 1`, every other
/// coordinate at a bound (`0`, or `1/L` for `i ≥ 1`).
pub fn inner_sup_by_vertices(q: &ActionDistribution, scores: &OracleScores, scale: f64) -> Result<f64> {
    let k = scores.num_actions();
    if q.len() != k {
        return Err(Error::domain("distribution and scores disagree on K"));
    }
    let cap = 1.0 / scale;
    let mut z = Vec::with_capacity(k + 1);
    z.push(-scores.psi()[0]);
    z.extend((0..k).map(|i| scale * q.probs()[i] - scores.psi()[i + 1]));
    let mut best = f64::NEG_INFINITY;
    for free in 0..=k {
        let others: Vec<usize> = (0..=k).filter(|j| *j != free).collect();
        for mask in 0u64..(1 << others.len()) {
            let mut p = vec![0.0; k + 1];
            let mut ok = true;
            for (bit, &j) in others.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    if j == 0 {
                        ok = false;
                        break;
                    }
                    p[j] = cap;
                }
            }
            if !ok {
                continue;
            }
            let rest = 1.0 - p.iter().sum::<f64>();
            let upper = if free == 0 { 1.0 } else { cap };
            if rest < -1e-12 || rest > upper + 1e-12 {
                continue;
            }
            p[free] = rest.clamp(0.0, upper);
            let v: f64 = p.iter().zip(&z).map(|(a, b)| a * b).sum();
            best = best.max(v);
        }
    }
    Ok(best)
}

/// Random scores with `φ` spread over negative values, values in `(0, 1)`
/// and values above one.
pub fn random_scores<R: RngCore + ?Sized>(num_actions: usize, scale: f64, rng: &mut R) -> OracleScores {
    let psi0 = rng.random_range(-5.0..5.0);
    let mut psi = vec![psi0];
    psi.extend((0..num_actions).map(|_| psi0 + scale * rng.random_range(-0.5..1.2)));
    OracleScores::from_psi(psi, scale).expect("finite scores")
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimaxSweep {
    pub instances: usize,
    /// Largest `water_fill value − grid minimum` seen.
    pub worst_excess: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Water-filling against grid search on random instances with `L ∈ {K, 2K}`.
pub fn minimax_sweep<R: RngCore + ?Sized>(
    num_actions: usize,
    instances: usize,
    mesh: f64,
    rng: &mut R,
) -> Result<MinimaxSweep> {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_tolerance = f64::INFINITY;
    let mut passed = true;
    for i in 0..instances {
        let scale = if i % 2 == 0 { num_actions as f64 } else { 2.0 * num_actions as f64 };
        let scores = random_scores(num_actions, scale, rng);
        let q = water_fill(scores.phi(), RemainderRule::ArgmaxPhi);
        let achieved = inner_sup_value(&q, &scores, scale)?;
        let (_, grid_min) = brute_force_minimax(&scores, scale, mesh)?;
        let tolerance = scale * mesh + 1e-6;
        let excess = achieved - grid_min;
        if excess > tolerance {
            passed = false;
        }
        if excess > worst_excess {
            worst_excess = excess;
            worst_tolerance = tolerance;
        }
    }
    Ok(MinimaxSweep {
        instances,
        worst_excess,
        tolerance: worst_tolerance,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexSweep {
    pub instances: usize,
    pub max_abs_diff: f64,
    pub passed: bool,
}

/// Closed-form inner supremum against vertex enumeration at random `q`.
pub fn inner_sup_sweep<R: RngCore + ?Sized>(instances: usize, rng: &mut R) -> Result<VertexSweep> {
    let mut max_abs_diff = 0.0f64;
    for i in 0..instances {
        let k = 2 + i % 2;
        let scale = k as f64 * rng.random_range(1.0..3.0);
        let scores = random_scores(k, scale, rng);
        let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let q = ActionDistribution::from_weights(&w)?;
        let closed = inner_sup_value(&q, &scores, scale)?;
        let vertices = inner_sup_by_vertices(&q, &scores, scale)?;
        max_abs_diff = max_abs_diff.max((closed - vertices).abs());
    }
    Ok(VertexSweep {
        instances,
        max_abs_diff,
        passed: max_abs_diff <= 1e-9,
    })
}

// ── Estimator ───────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct UnbiasednessReport {
    pub target: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub max_coin_probability: f64,
    pub passed: bool,
}

/// Monte Carlo mean of the estimate over `(ŷ ~ q, coin)`, checked against
/// `cost` at 3 standard errors per coordinate.
pub fn estimator_unbiasedness<R: RngCore + ?Sized>(
    q: &ActionDistribution,
    cost: &[f64],
    scale: f64,
    samples: usize,
    rng: &mut R,
) -> Result<UnbiasednessReport> {
    let k = q.len();
    if cost.len() != k || samples < 2 {
        return Err(Error::domain("cost length must match q and samples >= 2"));
    }
    let mut sum = vec![0.0; k];
    let mut sum_sq = vec![0.0; k];
    let mut max_coin = 0.0f64;
    for _ in 0..samples {
        let a = q.sample(rng);
        max_coin = max_coin.max(coin_probability(cost[a.index()], q.prob(a), scale)?);
        let coin = draw_estimator_coin(cost[a.index()], q.prob(a), scale, rng)?;
        let est = build_estimate(a, coin, scale);
        if let Some(i) = est.coordinate() {
            sum[i.index()] += est.scale();
            sum_sq[i.index()] += est.scale() * est.scale();
        }
    }
    let n = samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let stderr: Vec<f64> = sum_sq
        .iter()
        .zip(&mean)
        .map(|(s2, m)| ((s2 / n - m * m) * n / (n - 1.0) / n).max(0.0).sqrt())
        .collect();
    let passed = (0..k).all(|i| (mean[i] - cost[i]).abs() <= 3.0 * stderr[i] + 1e-12);
    Ok(UnbiasednessReport {
        target: cost.to_vec(),
        mean,
        stderr,
        max_coin_probability: max_coin,
        passed,
    })
}

// ── Rademacher bound ────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RademacherParams {
    pub horizon: usize,
    pub num_actions: usize,
    pub scale: f64,
    pub num_policies: usize,
    pub universe: usize,
    /// Probability that `Z_t = L`.
    pub z_prob: f64,
    /// Upper bound `M` on `E[Z_t²]`.
    pub second_moment: f64,
    pub samples: usize,
}

impl RademacherParams {
    /// `Z_t = L` with probability `K/L`, so `E[Z_t²] = K L = M`.
    pub fn standard(horizon: usize, num_actions: usize, scale: f64, num_policies: usize, samples: usize) -> Self {
        Self {
            horizon,
            num_actions,
            scale,
            num_policies,
            universe: 8,
            z_prob: num_actions as f64 / scale,
            second_moment: num_actions as f64 * scale,
            samples,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RademacherReport {
    pub empirical: f64,
    pub stderr: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Monte Carlo `E sup_π Σ_t ε_t(π(x_t)) Z_t` for a random table class and a
/// fixed random context sequence, against `sqrt(2 T M ln N)`.
pub fn rademacher_bound_check<R: RngCore + ?Sized>(params: &RademacherParams, rng: &mut R) -> Result<RademacherReport> {
    let RademacherParams {
        horizon,
        num_actions,
        scale,
        num_policies,
        universe,
        z_prob,
        second_moment,
        samples,
    } = *params;
    if !(0.0..=1.0).contains(&z_prob) || samples < 2 {
        return Err(Error::domain("z_prob must be a probability and samples >= 2"));
    }
    if scale * scale * z_prob > second_moment * (1.0 + 1e-12) {
        return Err(Error::domain("E[Z²] = L² P(Z = L) exceeds the stated M"));
    }
    let class = PolicyClass::random(num_policies, universe, num_actions, rng)?;
    let contexts = ContextDistribution::uniform(universe)?.draw_sequence(horizon, rng);
    let mut cell = vec![0.0f64; universe * num_actions];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        cell.iter_mut().for_each(|c| *c = 0.0);
        for x in &contexts {
            if rng.random::<f64>() < z_prob {
                let signs = rng.next_u64();
                let row = x.index() * num_actions;
                for a in 0..num_actions {
                    cell[row + a] += if signs >> a & 1 == 1 { scale } else { -scale };
                }
            }
        }
        let sup = (0..class.len())
            .map(|p| {
                class
                    .policy(p)
                    .iter()
                    .enumerate()
                    .map(|(x, a)| cell[x * num_actions + a.index()])
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        sum += sup;
        sum_sq += sup * sup;
    }
    let n = samples as f64;
    let empirical = sum / n;
    let stderr = ((sum_sq / n - empirical * empirical).max(0.0) / (n - 1.0)).sqrt();
    let bound = rademacher_bound(horizon, second_moment, num_policies)?;
    Ok(RademacherReport {
        empirical,
        stderr,
        bound,
        passed: empirical <= bound,
    })
}

// ── One-step admissibility ──────────────────────────────────────────────

/// A tiny problem on which both sides of the one-step admissibility
/// inequality can be estimated.
#[derive(Debug, Clone)]
pub struct TinyInstance {
    pub class: Arc<PolicyClass>,
    pub contexts: ContextDistribution,
    pub config: LearnerConfig,
}

impl TinyInstance {
    /// `K = 2`, `T = 2`, `U = 2`, `N = 4`, random context distribution and
    /// `L ∈ [K, 2K]`.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Result<Self> {
        let class = Arc::new(PolicyClass::random(4, 2, 2, rng)?);
        let p = rng.random_range(0.2..0.8);
        let contexts = ContextDistribution::new(vec![p, 1.0 - p])?;
        let scale = rng.random_range(2.0..4.0);
        let config = LearnerConfig::new(2, 2, scale, ContextMode::IidSampler)?;
        Ok(Self {
            class,
            contexts,
            config,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub round: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Combined Monte Carlo standard error of `lhs − rhs`.
    pub stderr: f64,
    pub worst_cost: Vec<Vec<f64>>,
    pub passed: bool,
}

struct MeanVar {
    mean: f64,
    var_of_mean: f64,
}

fn mean_var(values: &[f64]) -> MeanVar {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    MeanVar {
        mean,
        var_of_mean: var / n,
    }
}

/// Cost vectors on a `mesh` grid of `[0, 1]^K` (corners included).
pub fn cost_grid(num_actions: usize, mesh: f64) -> Vec<Vec<f64>> {
    let steps = (1.0 / mesh).round() as usize;
    let mut out = vec![Vec::new()];
    for _ in 0..num_actions {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=steps).map(move |s| {
                    let mut v = prefix.clone();
                    v.push(s as f64 / steps as f64);
                    v
                })
            })
            .collect();
    }
    out
}

/// Estimates both sides of
///
/// ```text
///   E_x sup_c E[ c(ŷ) + Rel(H, (x, ĉ)) ]  ≤  Rel(H)
/// ```
///
/// for the learner's strategy `q = E_ρ q(ρ)` at round `history.len() + 1`,
/// with `c` ranging over a `0.25`-mesh grid. Given `c`, the estimate equals
/// `L e_i` with probability `c(i)/L` whatever `q(ρ)` was, so the inner
/// expectation is `q̄·c + Σ_i (c_i/L) Rel_i + (1 − Σ_i c_i/L) Rel_0`, with
/// `q̄` and each `Rel_i` a Monte Carlo mean over independent future draws.
pub fn admissibility_spot_check<R: RngCore + ?Sized>(
    instance: &TinyInstance,
    history: &[HistoryRecord],
    samples: usize,
    rng: &mut R,
) -> Result<AdmissibilityReport> {
    let config = &instance.config;
    let k = config.num_actions;
    let t = history.len() + 1;
    if t > config.horizon || samples < 2 {
        return Err(Error::domain("history must leave a round to play and samples >= 2"));
    }
    let oracle = EnumerationOracle::new(instance.class.clone());
    let source = ContextSource::Sampler(instance.contexts.clone());
    let scale = config.scale;

    let rhs_samples = (0..samples)
        .map(|_| {
            let rho = sample_future(t - 1, config, &source, rng)?;
            relaxation_value(history, &rho, config, &oracle)
        })
        .collect::<Result<Vec<_>>>()?;
    let rhs = mean_var(&rhs_samples);

    let grid = cost_grid(k, 0.25);
    let mut lhs = 0.0;
    let mut lhs_var = 0.0;
    let mut worst_cost = Vec::new();
    for (xi, &dx) in instance.contexts.probs().iter().enumerate() {
        if dx == 0.0 {
            continue;
        }
        let x = Context(xi as u32);
        let played = (0..samples)
            .map(|_| {
                let rho = sample_future(t, config, &source, rng)?;
                let scores = oracle_scores(history, x, &rho, config, &oracle)?;
                strategy(&scores, scale, config.remainder)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut rel = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let (action, estimate, cost) = if i == 0 {
                (Action(0), EstimatedCost::zero(scale), 0.0)
            } else {
                (Action(i - 1), EstimatedCost::basis(Action(i - 1), scale), 1.0)
            };
            let mut extended = history.to_vec();
            extended.push(HistoryRecord::new(x, ActionDistribution::uniform(k), action, cost, estimate)?);
            let values = (0..samples)
                .map(|_| {
                    let rho = sample_future(t, config, &source, rng)?;
                    relaxation_value(&extended, &rho, config, &oracle)
                })
                .collect::<Result<Vec<_>>>()?;
            rel.push(mean_var(&values));
        }

        let mut best = f64::NEG_INFINITY;
        let mut best_var = 0.0;
        let mut best_c = Vec::new();
        for c in &grid {
            let play_cost: Vec<f64> = played
                .iter()
                .map(|q| q.probs().iter().zip(c).map(|(a, b)| a * b).sum())
                .collect();
            let play = mean_var(&play_cost);
            let w0 = 1.0 - c.iter().sum::<f64>() / scale;
            let mut value = play.mean + w0 * rel[0].mean;
            let mut var = play.var_of_mean + w0 * w0 * rel[0].var_of_mean;
            for i in 0..k {
                let w = c[i] / scale;
                value += w * rel[i + 1].mean;
                var += w * w * rel[i + 1].var_of_mean;
            }
            if value > best {
                best = value;
                best_var = var;
                best_c = c.clone();
            }
        }
        lhs += dx * best;
        lhs_var += dx * dx * best_var;
        worst_cost.push(best_c);
    }

    let stderr = (lhs_var + rhs.var_of_mean).sqrt();
    Ok(AdmissibilityReport {
        round: t,
        lhs,
        rhs: rhs.mean,
        stderr,
        worst_cost,
        passed: lhs <= rhs.mean + 3.0 * stderr,
    })
}

/// A random one-round history for checking the second step.
pub fn random_history<R: RngCore + ?Sized>(instance: &TinyInstance, rng: &mut R) -> Result<Vec<HistoryRecord>> {
    let k = instance.config.num_actions;
    let scale = instance.config.scale;
    let x = instance.contexts.sample(rng);
    let action = Action(rng.random_range(0..k));
    let (estimate, cost) = if rng.random_bool(0.5) {
        (EstimatedCost::basis(action, scale), 1.0)
    } else {
        (EstimatedCost::zero(scale), 0.0)
    };
    Ok(vec![HistoryRecord::new(x, ActionDistribution::uniform(k), action, cost, estimate)?])
}

// ── Suite ───────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Sample sizes for the suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteSize {
    pub minimax_k2: usize,
    pub minimax_k3: usize,
    pub vertex_instances: usize,
    pub estimator_samples: usize,
    pub rademacher_samples: usize,
    pub admissibility_instances: usize,
    pub admissibility_samples: usize,
}

impl SuiteSize {
    pub const FULL: Self = Self {
        minimax_k2: 100,
        minimax_k3: 50,
        vertex_instances: 100,
        estimator_samples: 100_000,
        rademacher_samples: 10_000,
        admissibility_instances: 5,
        admissibility_samples: 4_000,
    };

    pub const QUICK: Self = Self {
        minimax_k2: 20,
        minimax_k3: 10,
        vertex_instances: 20,
        estimator_samples: 20_000,
        rademacher_samples: 1_000,
        admissibility_instances: 2,
        admissibility_samples: 1_000,
    };
}

/// A `q` with every coordinate at least `1/L`.
pub fn random_floored_distribution<R: RngCore + ?Sized>(num_actions: usize, scale: f64, rng: &mut R) -> ActionDistribution {
    let w: Vec<f64> = (0..num_actions).map(|_| rng.random::<f64>()).collect();
    let base = ActionDistribution::from_weights(&w).expect("positive weights");
    crate::minimax::mix_with_uniform(&base, scale).expect("L >= K")
}

pub fn run_suite(seed: u64, size: SuiteSize) -> Result<Vec<CheckOutcome>> {
    let mut rng = rng::seeded(seed);
    let mut out = Vec::new();

    let k2 = minimax_sweep(2, size.minimax_k2, 1e-3, &mut rng)?;
    let k3 = minimax_sweep(3, size.minimax_k3, 1e-2, &mut rng)?;
    out.push(CheckOutcome {
        name: "minimax brute force",
        passed: k2.passed && k3.passed,
        detail: format!(
            "K=2 worst excess {:.3e} (tol {:.3e}); K=3 worst excess {:.3e} (tol {:.3e})",
            k2.worst_excess, k2.tolerance, k3.worst_excess, k3.tolerance
        ),
    });

    let v = inner_sup_sweep(size.vertex_instances, &mut rng)?;
    out.push(CheckOutcome {
        name: "inner sup vs vertex enumeration",
        passed: v.passed,
        detail: format!("max |closed form - vertices| = {:.3e}", v.max_abs_diff),
    });

    let q = random_floored_distribution(4, 8.0, &mut rng);
    let c: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
    let u = estimator_unbiasedness(&q, &c, 8.0, size.estimator_samples, &mut rng)?;
    out.push(CheckOutcome {
        name: "estimator unbiasedness",
        passed: u.passed,
        detail: format!("target {:?}, mean {:?}", u.target, u.mean),
    });

    let r = rademacher_bound_check(
        &RademacherParams::standard(200, 2, 4.0, 16, size.rademacher_samples),
        &mut rng,
    )?;
    out.push(CheckOutcome {
        name: "rademacher bound",
        passed: r.passed,
        detail: format!("empirical {:.3} ± {:.3}, bound {:.3}", r.empirical, r.stderr, r.bound),
    });

    let mut all = true;
    let mut details = Vec::new();
    for _ in 0..size.admissibility_instances {
        let inst = TinyInstance::random(&mut rng)?;
        let first = admissibility_spot_check(&inst, &[], size.admissibility_samples, &mut rng)?;
        let hist = random_history(&inst, &mut rng)?;
        let second = admissibility_spot_check(&inst, &hist, size.admissibility_samples, &mut rng)?;
        for rep in [first, second] {
            all &= rep.passed;
            details.push(format!("t={} lhs {:.4} rhs {:.4} se {:.4}", rep.round, rep.lhs, rep.rhs, rep.stderr));
        }
    }
    out.push(CheckOutcome {
        name: "admissibility spot-check",
        passed: all,
        detail: details.join("; "),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_sizes() {
        assert_eq!(simplex_grid(2, 10).len(), 11);
        assert_eq!(simplex_grid(3, 100).len(), 5151);
        assert_eq!(cost_grid(2, 0.25).len(), 25);
        for p in simplex_grid(3, 7) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_scores_make_every_q_optimal() {
        let scores = OracleScores::from_psi(vec![1.0, 1.0, 1.0], 2.0).unwrap();
        let (_, v) = brute_force_minimax(&scores, 2.0, 0.01).unwrap();
        for q in [vec![1.0, 0.0], vec![0.3, 0.7], vec![0.5, 0.5]] {
            let q = ActionDistribution::new(q).unwrap();
            assert!((inner_sup_value(&q, &scores, 2.0).unwrap() - v).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_rejects_large_k() {
        let scores = OracleScores::from_psi(vec![0.0; 5], 4.0).unwrap();
        assert!(brute_force_minimax(&scores, 4.0, 0.1).is_err());
    }

    #[test]
    fn vertices_match_closed_form_on_example() {
        let scores = OracleScores::from_psi(vec![0.0, 0.0, 0.0], 4.0).unwrap();
        let q = ActionDistribution::uniform(2);
        assert!((inner_sup_by_vertices(&q, &scores, 4.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_policy_rademacher_is_zero_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut params = RademacherParams::standard(50, 2, 4.0, 1, 5000);
        params.universe = 2;
        let r = rademacher_bound_check(&params, &mut rng).unwrap();
        assert!(r.empirical.abs() <= 3.0 * r.stderr, "{r:?}");
        assert_eq!(r.bound, 0.0);
    }

    #[test]
    fn zero_magnitudes_give_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut params = RademacherParams::standard(50, 2, 4.0, 8, 100);
        params.z_prob = 0.0;
        let r = rademacher_bound_check(&params, &mut rng).unwrap();
        assert_eq!(r.empirical, 0.0);
    }

    #[test]
    fn rademacher_rejects_understated_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut params = RademacherParams::standard(50, 2, 4.0, 8, 100);
        params.second_moment = 4.0;
        assert!(rademacher_bound_check(&params, &mut rng).is_err());
    }

    #[test]
    fn quick_suite_passes() {
        let outcomes = run_suite(17, SuiteSize::QUICK).unwrap();
        assert_eq!(outcomes.len(), 5);
        for o in outcomes {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }
}
