//! The discretized importance-weighted cost estimate.
//!
//! After playing `a ~ q` and observing `c(a)`, the learner flips a coin with
//! success probability `c(a) / (L q(a))` and records `L · e_a` on success,
//! the zero vector otherwise. Coordinate `i` has expectation
//! `L · q(i) · c(i) / (L q(i)) = c(i)`, and the estimate only ever takes the
//! `K + 1` values `{L·e_i} ∪ {0}`.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::types::{Action, EstimatedCost};

/// Slack allowed below the `1/L` exploration floor before rejecting.
pub const FLOOR_SLACK: f64 = 1e-12;

/// Success probability `cost / (scale · prob)` of the estimator coin.
pub fn coin_probability(cost: f64, prob: f64, scale: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&cost) {
        return Err(Error::domain(format!("cost {cost} outside [0, 1]")));
    }
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::domain(format!("scale {scale} must be positive")));
    }
    if !prob.is_finite() || prob < 1.0 / scale - FLOOR_SLACK || prob > 1.0 + FLOOR_SLACK {
        return Err(Error::domain(format!(
            "played probability {prob} is below the exploration floor 1/{scale}"
        )));
    }
    Ok((cost / (scale * prob)).min(1.0))
}

/// Draws the estimator coin `X`: `true` with probability `cost / (scale · prob)`.
pub fn draw_estimator_coin<R: RngCore + ?Sized>(
    cost: f64,
    prob: f64,
    scale: f64,
    rng: &mut R,
) -> Result<bool> {
    let p = coin_probability(cost, prob, scale)?;
    Ok(rng.random::<f64>() < p)
}

pub fn build_estimate(played: Action, coin: bool, scale: f64) -> EstimatedCost {
    if coin {
        EstimatedCost::basis(played, scale)
    } else {
        EstimatedCost::zero(scale)
    }
}
