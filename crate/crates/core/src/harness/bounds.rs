//! Closed-form regret bounds.

use crate::error::{Error, Result};

/// Expected-regret bound `2 sqrt(2 T K L ln N) + T K / L` of the relaxation
/// learner, valid for any `L ≥ K`.
pub fn theoretical_bound(num_actions: usize, horizon: usize, scale: f64, num_policies: usize) -> Result<f64> {
    let k = num_actions as f64;
    if num_actions == 0 || !scale.is_finite() || scale < k {
        return Err(Error::domain(format!("bound needs L >= K >= 1, got L = {scale}, K = {k}")));
    }
    if num_policies < 2 {
        return Err(Error::domain(format!("bound needs N >= 2, got {num_policies}")));
    }
    let t = horizon as f64;
    let log_n = (num_policies as f64).ln();
    Ok(2.0 * (2.0 * t * k * scale * log_n).sqrt() + t * k / scale)
}

/// `sqrt(2 T M ln N)`: the bound on `E sup_π Σ_t ε_t(π(x_t)) Z_t` when
/// `E[Z_t²] ≤ M`.
pub fn rademacher_bound(horizon: usize, second_moment: f64, num_policies: usize) -> Result<f64> {
    if num_policies == 0 || !second_moment.is_finite() || second_moment < 0.0 {
        return Err(Error::domain("rademacher bound needs N >= 1 and M >= 0"));
    }
    Ok((2.0 * horizon as f64 * second_moment * (num_policies as f64).ln()).sqrt())
}
