//! Closed-form continuity bounds and their state-level checks.
//!
//! Scalar functions take the trace-distance budget `eps` and the relevant dimensions
//! and return a bound in bits, rejecting arguments outside the range in which the bound
//! is stated. The `check_*` functions evaluate both sides on concrete states and return
//! a [`BoundReport`].

mod checks;
mod report;

pub use checks::{
    check_equal_marginals, check_improved_fa, check_mi_conjecture, check_thm1, check_wilde,
    general_marginal_correction,
};
pub use report::{tags, BoundReport};

use crate::divergences::{eps_log2, g_function, h2};
use crate::error::{range_err, Result};

/// Rounding allowance on range conditions such as `eps ≤ 1 − 1/d`.
pub(crate) const RANGE_SLACK: f64 = 1e-12;

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(range_err(format!("eps = {eps} outside [0,1]")));
    }
    Ok(())
}

fn check_eps_at_most(eps: f64, limit: f64, condition: &str) -> Result<()> {
    check_eps(eps)?;
    if eps > limit + RANGE_SLACK {
        return Err(range_err(format!(
            "eps = {eps} violates {condition} (limit {limit})"
        )));
    }
    Ok(())
}

fn check_dim_at_least(name: &str, d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(range_err(format!("{name} = {d} must be at least {min}")));
    }
    Ok(())
}

/// `ε log2(x − 1) + h2(ε)`, the common shape of the tight bounds.
fn tight_shape(x: f64, eps: f64) -> f64 {
    eps_log2(eps, x - 1.0) + h2(eps)
}

/// Semi-continuity bound for `D(ρ‖ω) − D(σ‖ω)` given `½‖ρ−σ‖₁ ≤ ε` and `ρ ≤ Mω`:
/// `ε log2(M−1) + h2(ε)` for `ε < 1 − 1/M`, otherwise `log2 M`.
pub fn thm1_bound(m: f64, eps: f64) -> Result<f64> {
    if !(m >= 1.0) || !m.is_finite() {
        return Err(range_err(format!("M = {m} must be finite and at least 1")));
    }
    check_eps(eps)?;
    Ok(thm1_unchecked(m, eps))
}

pub(crate) fn thm1_unchecked(m: f64, eps: f64) -> f64 {
    if eps < 1.0 - 1.0 / m {
        tight_shape(m, eps)
    } else {
        m.log2()
    }
}

/// The looser single-formula version `ε log2 M + h2(ε)`.
pub fn thm1_simplified(m: f64, eps: f64) -> Result<f64> {
    if !(m >= 1.0) || !m.is_finite() {
        return Err(range_err(format!("M = {m} must be finite and at least 1")));
    }
    check_eps(eps)?;
    Ok(eps_log2(eps, m) + h2(eps))
}

/// Fannes–Audenaert: `ε log2(d−1) + h2(ε)` for `ε ≤ 1 − 1/d`.
pub fn fannes_audenaert(d: usize, eps: f64) -> Result<f64> {
    check_dim_at_least("d", d, 2)?;
    let d = d as f64;
    check_eps_at_most(eps, 1.0 - 1.0 / d, "eps <= 1 - 1/d")?;
    Ok(tight_shape(d, eps))
}

/// Entropy bound sharpened by the largest eigenvalue of the reference state:
/// `ε log2(d λ_max − 1) + h2(ε)` for `ε ≤ 1 − 1/(d λ_max)`.
pub fn improved_fa(d: usize, lambda_max: f64, eps: f64) -> Result<f64> {
    check_dim_at_least("d", d, 2)?;
    if !(lambda_max > 0.0 && lambda_max <= 1.0) {
        return Err(range_err(format!(
            "lambda_max = {lambda_max} outside (0,1]"
        )));
    }
    let m = d as f64 * lambda_max;
    if m < 1.0 - RANGE_SLACK {
        return Err(range_err(format!("d * lambda_max = {m} is below 1")));
    }
    let m = m.max(1.0);
    check_eps_at_most(eps, 1.0 - 1.0 / m, "eps <= 1 - 1/(d lambda_max)")?;
    Ok(tight_shape(m, eps))
}

/// Conditional-entropy bound for states with equal `B` marginals:
/// `ε log2(d_A·sn − 1) + h2(ε)` for `ε ≤ 1 − 1/(d_A·sn)`, with `sn` a Schmidt-number bound.
pub fn equal_marginals_bound(da: usize, sn: usize, eps: f64) -> Result<f64> {
    check_dim_at_least("dA", da, 1)?;
    check_dim_at_least("sn", sn, 1)?;
    let m = (da * sn) as f64;
    check_eps_at_most(eps, 1.0 - 1.0 / m, "eps <= 1 - 1/(dA sn)")?;
    Ok(tight_shape(m, eps))
}

/// Alicki–Fannes–Winter: `ε log2 d_A² + (1+ε) h2(ε/(1+ε))`.
pub fn alicki_fannes_winter(da: usize, eps: f64) -> Result<f64> {
    check_dim_at_least("dA", da, 1)?;
    check_eps(eps)?;
    let d2 = (da * da) as f64;
    Ok(eps_log2(eps, d2) + (1.0 + eps) * h2(eps / (1.0 + eps)))
}

/// Conjectured conditional-entropy bound `ε log2(d_A² − 1) + h2(ε)` for `ε ≤ 1 − 1/d_A²`.
pub fn wilde_rhs(da: usize, eps: f64) -> Result<f64> {
    check_dim_at_least("dA", da, 2)?;
    let d2 = (da * da) as f64;
    check_eps_at_most(eps, 1.0 - 1.0 / d2, "eps <= 1 - 1/dA^2")?;
    Ok(tight_shape(d2, eps))
}

/// Conjectured mutual-information bound `ε log2(min(d_A,d_B)² − 1) + h2(ε)`.
///
/// No range for `ε` is attached to the conjecture, so any `ε ∈ [0,1]` is accepted.
pub fn mi_conjecture_rhs(da: usize, db: usize, eps: f64) -> Result<f64> {
    check_dim_at_least("dA", da, 2)?;
    check_dim_at_least("dB", db, 2)?;
    check_eps(eps)?;
    let d = da.min(db);
    Ok(tight_shape((d * d) as f64, eps))
}

/// Per-copy output-entropy term `ε log2(d_B² − 1) + h2(ε)` for `ε ≤ 1 − 1/d_B²`.
pub fn per_copy_capacity_rhs(db: usize, eps: f64) -> Result<f64> {
    check_dim_at_least("dB", db, 2)?;
    let d2 = (db * db) as f64;
    check_eps_at_most(eps, 1.0 - 1.0 / d2, "eps <= 1 - 1/dB^2")?;
    Ok(tight_shape(d2, eps))
}

/// Quantum-capacity continuity: twice [`per_copy_capacity_rhs`].
pub fn capacity_continuity_rhs(db: usize, eps: f64) -> Result<f64> {
    Ok(2.0 * per_copy_capacity_rhs(db, eps)?)
}

/// Entanglement-cost continuity: `δ log2(d² − 1) + h2(δ)` with `δ = √(ε(2−ε))`,
/// for `ε ≤ 1 − √(2d²−1)/d²`.
pub fn ecost_bound(d: usize, eps: f64) -> Result<f64> {
    check_dim_at_least("d", d, 2)?;
    let d2 = (d * d) as f64;
    check_eps_at_most(
        eps,
        1.0 - (2.0 * d2 - 1.0).sqrt() / d2,
        "eps <= 1 - sqrt(2d^2-1)/d^2",
    )?;
    let delta = (eps * (2.0 - eps)).sqrt();
    if delta > 1.0 - 1.0 / d2 + RANGE_SLACK {
        return Err(crate::error::Error::NumericalFailure(format!(
            "delta = {delta} exceeds 1 - 1/d^2 despite the range condition"
        )));
    }
    Ok(tight_shape(d2, delta.min(1.0 - 1.0 / d2)))
}

/// Conditional-entropy bound from the chain rule: `ε log2(d_A² − 1) + h2(ε)` for `ε ≤ 1 − 1/d_A²`.
pub fn chain_rule_bound(da: usize, eps: f64) -> Result<f64> {
    check_dim_at_least("dA", da, 2)?;
    let d2 = (da * da) as f64;
    check_eps_at_most(eps, 1.0 - 1.0 / d2, "eps <= 1 - 1/dA^2")?;
    Ok(tight_shape(d2, eps))
}

/// Filtered-divergence bound `ε·D + g(ε) + h2(ε)` with `D` a max-relative entropy in bits.
pub fn filtered_bound_rhs(dmax_term: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if !(dmax_term >= 0.0) {
        return Err(range_err(format!(
            "max-relative entropy term {dmax_term} must be non-negative"
        )));
    }
    let lead = if eps == 0.0 { 0.0 } else { eps * dmax_term };
    Ok(lead + g_function(eps)? + h2(eps))
}

/// Filtered-divergence bound around the maximally mixed state: `ε log2 D + h2(ε) + g(ε)`.
pub fn cor10_rhs(dim: usize, eps: f64) -> Result<f64> {
    check_dim_at_least("D", dim, 1)?;
    filtered_bound_rhs((dim as f64).log2(), eps)
}
