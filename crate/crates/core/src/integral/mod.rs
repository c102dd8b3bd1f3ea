//! The relative entropy as an integral over hockey-stick divergences,
//!
//! `D(ρ‖σ) = log2(e) ∫_1^∞ [E_γ(ρ‖σ)/γ + E_γ(σ‖ρ)/γ²] dγ`,
//!
//! evaluated by adaptive quadrature, and the region-by-region comparison
//! behind the continuity bound for `D(ρ‖ω) − D(σ‖ω)`.

mod quadrature;
mod regions;

pub use regions::{region_split_diagnostic, RegionContribution, RegionSplit};

use serde::{Deserialize, Serialize};

use crate::divergences::{hockey_stick_unchecked, pencil, rel_entropy};
use crate::error::{ensure_same_dim, range_err, Error, Result};
use crate::operator::DensityMatrix;
use quadrature::Integrator;

/// Default cap on integrand evaluations.
pub const EVALUATION_BUDGET: u64 = 1_000_000;

/// Result of [`integral_rel_entropy`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    /// Integral value in bits.
    pub value: f64,
    /// Summed Gauss–Kronrod error estimate, in bits.
    pub estimated_error: f64,
    pub evaluations: u64,
    /// `2^{D_max(ρ‖σ)}`, beyond which `E_γ(ρ‖σ)` vanishes.
    pub truncation_gamma: f64,
    /// `2^{D_max(σ‖ρ)}`, beyond which `E_γ(σ‖ρ)` vanishes; `+∞` when `supp(σ) ⊄ supp(ρ)`.
    #[serde(with = "crate::json::float")]
    pub tail_truncation_gamma: f64,
}

/// Evaluates the integral representation to an estimated error of `tol` bits and checks
/// the result against the spectral formula (`max(10·tol, 1e-6)`).
pub fn integral_rel_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: f64,
) -> Result<QuadratureResult> {
    let r = integral_rel_entropy_with_budget(rho, sigma, tol, EVALUATION_BUDGET)?;
    let spectral = rel_entropy(rho, sigma)?.value;
    let gap = (r.value - spectral).abs();
    if gap > (10.0 * tol).max(1e-6) {
        return Err(Error::NumericalFailure(format!(
            "integral {} disagrees with spectral value {spectral} by {gap:e}",
            r.value
        )));
    }
    Ok(r)
}

/// As [`integral_rel_entropy`] with an explicit evaluation budget and without the spectral cross-check.
pub fn integral_rel_entropy_with_budget(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: f64,
    budget: u64,
) -> Result<QuadratureResult> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    if !(tol > 0.0) {
        return Err(range_err(format!("tolerance {tol} must be positive")));
    }
    // The generalised eigenvalues m_i of (ρ, σ) on supp(σ) are the kinks of both integrands:
    // E_γ(ρ‖σ) at γ = m_i, and E_{1/u}(σ‖ρ) at u = m_i after substituting u = 1/γ.
    let mut p = pencil(rho.matrix(), sigma.matrix())?.ok_or_else(|| {
        Error::SupportViolation("supp(rho) is not contained in supp(sigma)".into())
    })?;
    // Rounding splits a degenerate eigenvalue 1 into a cluster; snap it so that equal
    // states (or shared eigenvectors) do not create slivers of integration domain.
    for m in &mut p.values {
        if (*m - 1.0).abs() <= 1e-12 {
            *m = 1.0;
        }
    }
    let m_max = p.values.first().copied().unwrap_or(1.0).max(1.0);
    let m_min = p.values.last().copied().unwrap_or(1.0).clamp(0.0, 1.0);
    let tail_truncation_gamma = if m_min > 0.0 {
        1.0 / m_min
    } else {
        f64::INFINITY
    };

    let mut segments = Vec::new();
    let mut first: Vec<f64> = vec![1.0];
    first.extend(p.values.iter().copied().filter(|&m| m > 1.0 && m < m_max));
    first.push(m_max);
    first.sort_by(f64::total_cmp);
    first.dedup();
    segments.extend(first.windows(2).map(|w| (0, w[0], w[1])));
    let mut second: Vec<f64> = vec![m_min];
    second.extend(p.values.iter().copied().filter(|&m| m > m_min && m < 1.0));
    second.push(1.0);
    second.sort_by(f64::total_cmp);
    second.dedup();
    segments.extend(second.windows(2).map(|w| (1, w[0], w[1])));

    let integrand = |tag: usize, x: f64| -> Result<f64> {
        if tag == 0 {
            Ok(hockey_stick_unchecked(rho, sigma, x)? / x)
        } else {
            Ok(hockey_stick_unchecked(sigma, rho, 1.0 / x)?)
        }
    };
    let log2e = std::f64::consts::LOG2_E;
    let out = Integrator::new(&integrand).run(&segments, tol / log2e, budget)?;
    if !out.converged {
        return Err(Error::ToleranceNotReached {
            target: tol,
            achieved: out.error * log2e,
            work: out.evaluations,
        });
    }
    Ok(QuadratureResult {
        value: out.value * log2e,
        estimated_error: out.error * log2e,
        evaluations: out.evaluations,
        truncation_gamma: m_max,
        tail_truncation_gamma,
    })
}

#[cfg(test)]
mod tests;
