//! Divergence centers: states minimising the larger of the divergences from two given states.

use super::{rel_entropy, trace_distance};
use crate::error::{ensure_same_dim, Error, Result};
use crate::operator::DensityMatrix;

/// Center for the max-relative entropy, `(σ + [ρ−σ]_+)/(1 + T)` with `T` the trace distance.
///
/// Both `D_max(ρ‖ω)` and `D_max(σ‖ω)` equal `log2(1 + T)` there. The equivalent form
/// `(ρ + [σ−ρ]_+)/(1 + T)` is evaluated as a consistency check.
pub fn dmax_center(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DensityMatrix> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    let t = trace_distance(rho, sigma)?;
    let diff = rho.op().sub(sigma.op())?;
    let from_sigma = sigma
        .op()
        .add(&diff.positive_part()?)?
        .scale(1.0 / (1.0 + t));
    let from_rho = rho
        .op()
        .add(&diff.scale(-1.0).positive_part()?)?
        .scale(1.0 / (1.0 + t));
    let mismatch = from_sigma.sub(&from_rho)?.max_abs_entry();
    if mismatch > 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "center forms disagree by {mismatch:e}"
        )));
    }
    Ok(DensityMatrix::from_op_unchecked(from_sigma))
}

/// Center for the Umegaki relative entropy on the segment `λρ + (1−λ)σ`.
///
/// `D(ρ‖ω_λ)` is non-increasing and `D(σ‖ω_λ)` non-decreasing in `λ`, so the larger of
/// the two is minimised where they cross; the crossing is bracketed by bisection to 1e-8.
/// Returns `λ = 1/2` when `ρ = σ`.
pub fn umegaki_center(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(f64, DensityMatrix)> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    if trace_distance(rho, sigma)? == 0.0 {
        return Ok((0.5, rho.clone()));
    }
    // Positive while D(ρ‖ω) exceeds D(σ‖ω); +∞/−∞ cases order correctly.
    let diff = |lambda: f64| -> Result<f64> {
        let w = rho.mix(sigma, lambda)?;
        let a = rel_entropy(rho, &w)?.value;
        let b = rel_entropy(sigma, &w)?.value;
        Ok(if a.is_infinite() && b.is_infinite() {
            f64::NAN
        } else {
            a - b
        })
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        let d = diff(mid)?;
        if d.is_nan() {
            return Err(Error::InfeasibleCenter);
        }
        if d > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    Ok((lambda, rho.mix(sigma, lambda)?))
}
