use super::report::{tags, BoundReport};
use super::{alicki_fannes_winter, mi_conjecture_rhs, thm1_unchecked, wilde_rhs, RANGE_SLACK};
use crate::divergences::{
    cond_entropy, d_max, mutual_info, rel_entropy, trace_distance, vn_entropy,
};
use crate::error::{ensure_same_dim, range_err, Error, Result};
use crate::operator::{BipartiteDensityMatrix, DensityMatrix};

/// Marginal distance below which two `B` marginals count as equal.
pub const MARGINAL_TOL: f64 = 1e-8;

fn same_dims(rho: &BipartiteDensityMatrix, sigma: &BipartiteDensityMatrix) -> Result<()> {
    ensure_same_dim(rho.da(), sigma.da())?;
    ensure_same_dim(rho.db(), sigma.db())
}

/// Compares `D(ρ‖ω) − D(σ‖ω)` with the semi-continuity bound.
///
/// `eps` and `m` default to the exact trace distance and `2^{D_max(ρ‖ω)}`; supplied values
/// are budgets and must dominate the exact ones for the bound to apply.
pub fn check_thm1(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    omega: &DensityMatrix,
    eps: Option<f64>,
    m: Option<f64>,
) -> Result<BoundReport> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    ensure_same_dim(rho.dim(), omega.dim())?;
    let tag = tags::THM1;
    let t = trace_distance(rho, sigma)?;
    let eps = eps.unwrap_or(t);
    if !(0.0..=1.0).contains(&eps) {
        return Err(range_err(format!("eps = {eps} outside [0,1]")));
    }
    let dm = d_max(rho, omega)?;
    let d_rho = rel_entropy(rho, omega)?;
    if !dm.finite || !d_rho.finite {
        return Ok(BoundReport::inapplicable(tag, "D(rho||omega) is infinite")
            .with_param("trace_distance", t));
    }
    let m_exact = dm.value.exp2();
    let m = m.unwrap_or(m_exact);
    if !(m >= 1.0) || !m.is_finite() {
        return Err(range_err(format!("M = {m} must be finite and at least 1")));
    }
    let rhs = thm1_unchecked(m, eps);
    let d_sigma = rel_entropy(sigma, omega)?;
    let lhs = d_rho.value - d_sigma.value;
    let mut r = BoundReport::compare(tag, lhs, rhs)
        .with_param("eps", eps)
        .with_param("M", m)
        .with_param("trace_distance", t)
        .with_param("dmax_rho_omega", dm.value);
    if !d_sigma.finite {
        r = r.with_flag("lhs_negative_infinite");
    }
    if eps >= 1.0 - 1.0 / m {
        r = r.with_flag("log_m_branch");
    }
    if t > eps + RANGE_SLACK {
        r = r.mark_inapplicable(format!("trace distance {t} exceeds eps = {eps}"));
    } else if m_exact > m * (1.0 + 1e-12) {
        r = r.mark_inapplicable(format!(
            "rho <= M omega fails: 2^Dmax = {m_exact} > M = {m}"
        ));
    }
    Ok(r)
}

/// Two-sided conditional-entropy bound for states with equal `B` marginals.
///
/// `sn` must bound the Schmidt numbers of both states and defaults to `min(dA, dB)`.
/// Beyond `eps ≤ 1 − 1/(dA·sn)` the bound takes the value `log2(dA·sn)` and the report
/// carries the `beyond_range` flag. Unequal marginals make the report inapplicable.
pub fn check_equal_marginals(
    rho: &BipartiteDensityMatrix,
    sigma: &BipartiteDensityMatrix,
    sn: Option<usize>,
) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let (da, db) = rho.dims();
    let sn = sn.unwrap_or(da.min(db));
    if sn == 0 {
        return Err(range_err("Schmidt number bound must be at least 1"));
    }
    let tag = tags::EQ14;
    let marginal_gap = trace_distance(&rho.marginal_b(), &sigma.marginal_b())?;
    let eps = trace_distance(rho.state(), sigma.state())?;
    let m = (da * sn) as f64;
    let rhs = thm1_unchecked(m, eps);
    let lhs = (cond_entropy(rho)? - cond_entropy(sigma)?).abs();
    let mut r = BoundReport::compare(tag, lhs, rhs)
        .with_param("eps", eps)
        .with_param("sn", sn as f64)
        .with_param("marginal_distance", marginal_gap);
    if eps > 1.0 - 1.0 / m + RANGE_SLACK {
        r = r.with_flag("beyond_range");
    }
    if marginal_gap > MARGINAL_TOL {
        r = r.mark_inapplicable(
            Error::MarginalMismatch {
                distance: marginal_gap,
            }
            .to_string(),
        );
    }
    Ok(r)
}

/// One-sided bound on `H(A|B)_σ − H(A|B)_ρ` with the marginal correction `D(σ_B‖ρ_B)`.
pub fn general_marginal_correction(
    rho: &BipartiteDensityMatrix,
    sigma: &BipartiteDensityMatrix,
) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let (da, db) = rho.dims();
    let tag = tags::EQ14_GENERAL;
    let eps = trace_distance(rho.state(), sigma.state())?;
    let correction = rel_entropy(&sigma.marginal_b(), &rho.marginal_b())?;
    if !correction.finite {
        return Ok(
            BoundReport::inapplicable(tag, "D(sigma_B||rho_B) is infinite").with_param("eps", eps),
        );
    }
    let m = (da * da.min(db)) as f64;
    let rhs = thm1_unchecked(m, eps) + correction.value;
    let lhs = cond_entropy(sigma)? - cond_entropy(rho)?;
    let mut r = BoundReport::compare(tag, lhs, rhs)
        .with_param("eps", eps)
        .with_param("marginal_correction", correction.value);
    if eps > 1.0 - 1.0 / m + RANGE_SLACK {
        r = r.with_flag("beyond_range");
    }
    Ok(r)
}

/// Compares `S(ρ) − S(σ)` with `ε log2(d λ_max(σ) − 1) + h2(ε)`.
pub fn check_improved_fa(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BoundReport> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    let eps = trace_distance(rho, sigma)?;
    let lambda = sigma.lambda_max()?;
    let m = (rho.dim() as f64 * lambda).max(1.0);
    let rhs = thm1_unchecked(m, eps);
    let lhs = vn_entropy(rho)? - vn_entropy(sigma)?;
    let mut r = BoundReport::compare(tags::IMPROVED_FA, lhs, rhs)
        .with_param("eps", eps)
        .with_param("lambda_max", lambda);
    if eps > 1.0 - 1.0 / m + RANGE_SLACK {
        r = r.with_flag("beyond_range");
    }
    Ok(r)
}

/// Evaluates the conjectured conditional-entropy bound on an arbitrary pair.
///
/// Pairs outside `eps ≤ 1 − 1/dA²` are reported as inapplicable. The Alicki–Fannes–Winter
/// value is attached as the `afw` parameter.
pub fn check_wilde(
    rho: &BipartiteDensityMatrix,
    sigma: &BipartiteDensityMatrix,
) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let da = rho.da();
    let eps = trace_distance(rho.state(), sigma.state())?;
    let lhs = (cond_entropy(rho)? - cond_entropy(sigma)?).abs();
    let afw = alicki_fannes_winter(da, eps)?;
    let limit = 1.0 - 1.0 / (da * da) as f64;
    if eps > limit {
        return Ok(BoundReport::inapplicable(
            tags::WILDE,
            format!("eps = {eps} exceeds 1 - 1/dA^2"),
        )
        .with_param("eps", eps)
        .with_param("afw", afw));
    }
    let rhs = wilde_rhs(da, eps)?;
    Ok(BoundReport::compare(tags::WILDE, lhs, rhs)
        .with_param("eps", eps)
        .with_param("afw", afw))
}

/// Evaluates the conjectured mutual-information bound on an arbitrary pair.
///
/// The conjecture fixes no range for `eps`; pairs beyond `1 − 1/min(dA,dB)²` carry the
/// `large_eps` flag.
pub fn check_mi_conjecture(
    rho: &BipartiteDensityMatrix,
    sigma: &BipartiteDensityMatrix,
) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let (da, db) = rho.dims();
    let eps = trace_distance(rho.state(), sigma.state())?;
    let lhs = (mutual_info(rho)? - mutual_info(sigma)?).abs();
    let rhs = mi_conjecture_rhs(da, db, eps)?;
    let d = da.min(db);
    let mut r = BoundReport::compare(tags::MI, lhs, rhs).with_param("eps", eps);
    if eps > 1.0 - 1.0 / (d * d) as f64 {
        r = r.with_flag("large_eps");
    }
    Ok(r)
}
