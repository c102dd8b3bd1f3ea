//! State-level checks of the filtered continuity bounds.
//!
//! Every check compares worst-case values inside the certified brackets: the
//! subtracted minimum enters at its lower bound and the other at its upper value.

use super::{
    filtered_dmax, filtered_dmax_to, filtered_norm, filtered_rel_ent, ChannelSet, FilteredValue,
    FreeSet, DEFAULT_TOL,
};
use crate::bounds::{cor10_rhs, filtered_bound_rhs, tags, BoundReport};
use crate::divergences::d_max;
use crate::error::{ensure_same_dim, range_err, Result};
use crate::operator::DensityMatrix;

/// `½‖ρ − σ‖_L`, capped at 1.
fn filtered_eps(rho: &DensityMatrix, sigma: &DensityMatrix, l: &ChannelSet) -> Result<f64> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    Ok((0.5 * filtered_norm(&rho.op().sub(sigma.op())?, l)?).min(1.0))
}

/// Largest difference `a − b` compatible with the two brackets.
fn worst_difference(a: &FilteredValue, b: &FilteredValue) -> f64 {
    if !b.is_finite() {
        return f64::NEG_INFINITY;
    }
    a.value - b.lower
}

fn with_values(report: BoundReport, a: &FilteredValue, b: &FilteredValue, eps: f64) -> BoundReport {
    report
        .with_param("eps", eps)
        .with_param("filtered_rel_ent_rho", a.value)
        .with_param("filtered_rel_ent_sigma", b.value)
        .with_param("gap_rho", a.gap())
        .with_param("gap_sigma", b.gap())
}

/// Checks `D^L(ρ‖F) − D^L(σ‖F) ≤ ε D^L_max(ρ‖τ) + g(ε) + h2(ε)` with `τ` the star center
/// and `ε = ½‖ρ − σ‖_L`. Requires `D_max(ρ‖τ) < ∞`.
pub fn prop9_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    f: &FreeSet,
    l: &ChannelSet,
) -> Result<BoundReport> {
    let tau = f.star_center();
    let dmax_tau = d_max(rho, tau)?;
    if !dmax_tau.is_finite() {
        return Ok(BoundReport::inapplicable(
            tags::PROP9,
            "rho is not dominated by the star center",
        ));
    }
    let dl_max_tau = filtered_dmax_to(rho, tau, l)?;
    let eps = filtered_eps(rho, sigma, l)?;
    let a = filtered_rel_ent(rho, f, l, DEFAULT_TOL)?;
    let b = filtered_rel_ent(sigma, f, l, DEFAULT_TOL)?;
    let rhs = filtered_bound_rhs(dl_max_tau, eps)?;
    let report = BoundReport::compare(tags::PROP9, worst_difference(&a, &b), rhs)
        .with_param("filtered_dmax_tau", dl_max_tau)
        .with_param("dmax_tau", dmax_tau.value);
    Ok(with_values(report, &a, &b, eps))
}

/// Convex-set form: the max-relative term is `D^L_max(ρ‖F)`, entered at its certified lower bound.
pub fn prop9_convex_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    f: &FreeSet,
    l: &ChannelSet,
) -> Result<BoundReport> {
    let eps = filtered_eps(rho, sigma, l)?;
    let dm = filtered_dmax(rho, f, l, DEFAULT_TOL)?;
    let a = filtered_rel_ent(rho, f, l, DEFAULT_TOL)?;
    let b = filtered_rel_ent(sigma, f, l, DEFAULT_TOL)?;
    let rhs = if dm.is_finite() {
        filtered_bound_rhs(dm.lower, eps)?
    } else {
        f64::INFINITY
    };
    let report = BoundReport::compare(tags::PROP9_CONVEX, worst_difference(&a, &b), rhs)
        .with_param("filtered_dmax_free", dm.value)
        .with_param("gap_dmax", dm.gap());
    Ok(with_values(report, &a, &b, eps))
}

/// Two-sided `|D^L(ρ‖F) − D^L(σ‖F)| ≤ ε log2 D + h2(ε) + g(ε)`; applicable only when
/// `I/D ∈ conv(generators)`.
pub fn cor10_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    f: &FreeSet,
    l: &ChannelSet,
) -> Result<BoundReport> {
    let residual = f.maximally_mixed_residual()?;
    if residual > super::MEMBERSHIP_TOL {
        return Ok(BoundReport::inapplicable(
            tags::COR10,
            "the maximally mixed state is not in the free set",
        )
        .with_param("membership_residual", residual));
    }
    let eps = filtered_eps(rho, sigma, l)?;
    let a = filtered_rel_ent(rho, f, l, DEFAULT_TOL)?;
    let b = filtered_rel_ent(sigma, f, l, DEFAULT_TOL)?;
    let lhs = worst_difference(&a, &b).max(worst_difference(&b, &a));
    let rhs = cor10_rhs(f.dim(), eps)?;
    let report =
        BoundReport::compare(tags::COR10, lhs, rhs).with_param("membership_residual", residual);
    Ok(with_values(report, &a, &b, eps))
}

/// Sandwich `R + log2(1−q) ≤ D^L(ρ‖F) ≤ R` with `R` the minimum over the family
/// `(1−q) ω + q τ`. The reported slack is the smaller of the two one-sided slacks.
pub fn lemma3_check(
    rho: &DensityMatrix,
    f: &FreeSet,
    l: &ChannelSet,
    q: f64,
) -> Result<BoundReport> {
    if !(q > 0.0 && q < 1.0) {
        return Err(range_err(format!("q = {q} outside (0,1)")));
    }
    let full = filtered_rel_ent(rho, f, l, DEFAULT_TOL)?;
    let restricted = filtered_rel_ent(rho, &f.shrunk_toward_center(q)?, l, DEFAULT_TOL)?;
    let log_term = (1.0 - q).log2();
    let mut report = BoundReport::compare(tags::LEMMA3, full.value, restricted.value)
        .with_param("q", q)
        .with_param("log2_one_minus_q", log_term)
        .with_param("gap_full", full.gap())
        .with_param("gap_restricted", restricted.gap());
    if !full.is_finite() {
        report.slack = Some(f64::INFINITY);
        return Ok(report.with_flag("infinite_everywhere"));
    }
    let upper = restricted.lower - full.value;
    let lower = full.lower - (restricted.value + log_term);
    report.slack = Some(upper.min(lower));
    Ok(report
        .with_param("upper_slack", upper)
        .with_param("lower_slack", lower))
}
