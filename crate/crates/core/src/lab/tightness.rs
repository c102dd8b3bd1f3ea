//! Saturating families: every report in the suite must have `|slack| ≤ SATURATION_TOL`.

use crate::bounds::{check_equal_marginals, check_thm1, BoundReport};
use crate::error::{Error, Result};
use crate::operator::{isotropic_mix, max_entangled, DensityMatrix};

pub const SATURATION_TOL: f64 = 1e-9;

pub const THM1_M_GRID: [f64; 4] = [1.5, 2.0, 4.0, 8.0];
pub const ISOTROPIC_D_GRID: [usize; 3] = [2, 3, 4];

/// `ρ = |0⟩⟨0|`, `σ = diag(1−ε, ε)`, `ω = diag(1/M, 1−1/M)`; needs `M ≥ 1` and `ε ≤ 1 − 1/M`.
pub fn thm1_witness(m: f64, eps: f64) -> Result<(DensityMatrix, DensityMatrix, DensityMatrix)> {
    Ok((
        DensityMatrix::diagonal(&[1.0, 0.0])?,
        DensityMatrix::diagonal(&[1.0 - eps, eps])?,
        DensityMatrix::diagonal(&[1.0 / m, 1.0 - 1.0 / m])?,
    ))
}

/// The triple family over `M ∈ {1.5, 2, 4, 8}`, `ε ∈ {0, 0.1, 0.25, 1−1/M}`.
pub fn thm1_family() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for m in THM1_M_GRID {
        for eps in [0.0, 0.1, 0.25, 1.0 - 1.0 / m] {
            let (rho, sigma, omega) = thm1_witness(m, eps)?;
            out.push(check_thm1(&rho, &sigma, &omega, None, None)?.with_param("M", m));
        }
    }
    Ok(out)
}

/// `Φ_d` against isotropic mixtures, `d ∈ {2, 3, 4}`, `ε ∈ {0, 0.1, 0.3, 1−1/d²}`.
pub fn isotropic_family() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for d in ISOTROPIC_D_GRID {
        let n = (d * d) as f64;
        for eps in [0.0, 0.1, 0.3, 1.0 - 1.0 / n] {
            let r = check_equal_marginals(&max_entangled(d)?, &isotropic_mix(d, eps)?, None)?;
            out.push(r.with_param("d", d as f64));
        }
    }
    Ok(out)
}

/// Both families; fails with [`Error::SaturationFailure`] on the first non-tight member.
pub fn tightness_suite() -> Result<Vec<BoundReport>> {
    let mut out = thm1_family()?;
    out.extend(isotropic_family()?);
    for r in &out {
        let tight = r.applicable && r.slack.is_some_and(|s| s.abs() <= SATURATION_TOL);
        if !tight {
            return Err(Error::SaturationFailure(format!(
                "{} with params {:?}, slack {:?}",
                r.equation_tag, r.params, r.slack
            )));
        }
    }
    Ok(out)
}
