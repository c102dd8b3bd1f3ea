//! Region-by-region comparison of `D(ρ‖ω) − D(σ‖ω)` with its piecewise majorants.
//!
//! Writing the difference through the integral representation gives a first integral of
//! `[E_γ(ρ‖ω) − E_γ(σ‖ω)]/γ` and a second of `[E_γ(ω‖ρ) − E_γ(ω‖σ)]/γ²`. With
//! `½‖ρ−σ‖₁ ≤ ε` and `ρ ≤ Mω` the first integrand is at most `ε` on `[1, (1−ε)M]`,
//! `1 − γ/M` on `[(1−ε)M, M]` and `0` beyond `M`; the second is at most `γε` below
//! `γ_s = (M−1)/(Mε)` and `1 − 1/M` above. Integrating the majorants gives the bound
//! `ε log2(M−1) + h2(ε)`.

use serde::{Deserialize, Serialize};

use super::quadrature::Integrator;
use crate::divergences::{d_max, hockey_stick_unchecked, pencil, rel_entropy, trace_distance};
use crate::error::{ensure_same_dim, Error, Result};
use crate::operator::DensityMatrix;

/// Pointwise slack allowed between an integrand and its majorant.
const POINTWISE_TOL: f64 = 1e-8;

/// One region of the split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionContribution {
    pub name: String,
    /// Region bounds in `γ`.
    #[serde(with = "crate::json::float")]
    pub lower: f64,
    #[serde(with = "crate::json::float")]
    pub upper: f64,
    /// Integral of the divergence difference over the region, in bits.
    #[serde(with = "crate::json::float")]
    pub integral: f64,
    /// Integral of the majorant over the region, in bits.
    pub majorant_integral: f64,
    /// Largest `integrand − majorant` over the quadrature nodes.
    pub max_pointwise_excess: f64,
    pub nodes: usize,
    pub holds: bool,
}

/// Result of [`region_split_diagnostic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSplit {
    pub eps: f64,
    pub m: f64,
    pub regions: Vec<RegionContribution>,
    /// `D(ρ‖ω) − D(σ‖ω)` from the spectral formula.
    #[serde(with = "crate::json::float")]
    pub lhs: f64,
    /// Sum of the majorant integrals.
    pub bound: f64,
}

impl RegionSplit {
    pub fn all_hold(&self) -> bool {
        self.regions.iter().all(|r| r.holds)
    }
}

/// Kinks of `γ ↦ E_γ(a‖b)`: the values of γ where `a − γ b` is singular.
fn kinks(a: &DensityMatrix, b: &DensityMatrix) -> Result<Vec<f64>> {
    if let Some(p) = pencil(a.matrix(), b.matrix())? {
        return Ok(p.values);
    }
    if let Some(p) = pencil(b.matrix(), a.matrix())? {
        return Ok(p
            .values
            .iter()
            .filter(|&&m| m > 0.0)
            .map(|m| 1.0 / m)
            .collect());
    }
    Ok(Vec::new())
}

fn split_at(lo: f64, hi: f64, points: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts = vec![lo];
    cuts.extend(points.iter().copied().filter(|&x| x > lo && x < hi));
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Integrates each region of the split and compares with the majorants.
pub fn region_split_diagnostic(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    omega: &DensityMatrix,
    eps: f64,
    m: f64,
) -> Result<RegionSplit> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    ensure_same_dim(rho.dim(), omega.dim())?;
    let t = trace_distance(rho, sigma)?;
    if t > eps + 1e-12 {
        return Err(Error::PreconditionViolated(format!(
            "trace distance {t} exceeds eps = {eps}"
        )));
    }
    if !(m >= 1.0) || !(eps < 1.0 - 1.0 / m) {
        return Err(Error::PreconditionViolated(format!(
            "eps = {eps} is not below 1 - 1/M with M = {m}"
        )));
    }
    let dm = d_max(rho, omega)?;
    if !dm.finite || dm.value.exp2() > m * (1.0 + 1e-12) {
        return Err(Error::PreconditionViolated(format!(
            "rho <= M omega fails for M = {m}"
        )));
    }

    let log2e = std::f64::consts::LOG2_E;
    let g1 = (1.0 - eps) * m;
    let gs = if eps > 0.0 {
        (m - 1.0) / (m * eps)
    } else {
        f64::INFINITY
    };
    // Kinks in γ of the four hockey-stick functions involved.
    let k_first: Vec<f64> = [kinks(rho, omega)?, kinks(sigma, omega)?].concat();
    let k_second: Vec<f64> = [kinks(omega, rho)?, kinks(omega, sigma)?].concat();
    let tail_cut = 2f64.powf(d_max(sigma, omega)?.value);

    let first = |g: f64| -> Result<f64> {
        Ok(hockey_stick_unchecked(rho, omega, g)? - hockey_stick_unchecked(sigma, omega, g)?)
    };
    let second = |g: f64| -> Result<f64> {
        Ok(hockey_stick_unchecked(omega, rho, g)? - hockey_stick_unchecked(omega, sigma, g)?)
    };

    struct Spec {
        name: &'static str,
        lower: f64,
        upper: f64,
        majorant_integral: f64,
    }
    let specs = [
        Spec {
            name: "first:[1,(1-eps)M]",
            lower: 1.0,
            upper: g1,
            majorant_integral: eps * g1.ln(),
        },
        Spec {
            name: "first:[(1-eps)M,M]",
            lower: g1,
            upper: m,
            majorant_integral: -(1.0 - eps).ln() - eps,
        },
        Spec {
            name: "first:[M,inf)",
            lower: m,
            upper: f64::INFINITY,
            majorant_integral: 0.0,
        },
        Spec {
            name: "second:[1,gamma_s]",
            lower: 1.0,
            upper: gs,
            majorant_integral: if eps > 0.0 { eps * gs.ln() } else { 0.0 },
        },
        Spec {
            name: "second:[gamma_s,inf)",
            lower: gs,
            upper: f64::INFINITY,
            majorant_integral: eps,
        },
    ];

    let mut regions = Vec::new();
    for (idx, s) in specs.iter().enumerate() {
        let is_first = idx < 3;
        let majorant = |g: f64| match idx {
            0 => eps,
            1 => 1.0 - g / m,
            2 => 0.0,
            _ => (g * eps).min(1.0 - 1.0 / m),
        };
        let mut integral_nats = 0.0;
        let mut excess = f64::NEG_INFINITY;
        let mut nodes = 0;
        if s.upper > s.lower {
            // First integrand in γ with weight 1/γ; second integrand in u = 1/γ with unit weight.
            let integrand = |_: usize, x: f64| -> Result<f64> {
                if is_first {
                    Ok(first(x)? / x)
                } else {
                    second(1.0 / x)
                }
            };
            let segments: Vec<(usize, f64, f64)> = if is_first {
                // E_γ(ρ‖ω) vanishes beyond M, E_γ(σ‖ω) beyond 2^{D_max(σ‖ω)}.
                let hi = if idx == 2 {
                    tail_cut.max(s.lower)
                } else {
                    s.upper
                };
                if s.upper.is_infinite() && tail_cut.is_infinite() {
                    // E_γ(σ‖ω) tends to the weight of σ outside supp(ω): the integral diverges.
                    integral_nats = f64::NEG_INFINITY;
                    Vec::new()
                } else {
                    split_at(s.lower, hi, &k_first)
                        .into_iter()
                        .map(|(a, b)| (0, a, b))
                        .collect()
                }
            } else {
                let inv: Vec<f64> = k_second
                    .iter()
                    .filter(|&&g| g > 0.0)
                    .map(|g| 1.0 / g)
                    .collect();
                let (a, b) = (1.0 / s.upper, 1.0 / s.lower);
                split_at(a, b, &inv)
                    .into_iter()
                    .map(|(a, b)| (0, a, b))
                    .collect()
            };
            if !segments.is_empty() {
                let out = Integrator::new(&integrand)
                    .recording()
                    .run(&segments, 1e-11, 2_000_000)?;
                integral_nats += out.value;
                for &(_, x, y) in &out.samples {
                    let (g, value) = if is_first { (x, y * x) } else { (1.0 / x, y) };
                    excess = excess.max(value - majorant(g));
                }
                nodes = out.samples.len();
            }
        }
        let excess = if nodes == 0 { 0.0 } else { excess };
        regions.push(RegionContribution {
            name: s.name.to_string(),
            lower: s.lower,
            upper: s.upper,
            integral: integral_nats * log2e,
            majorant_integral: s.majorant_integral * log2e,
            max_pointwise_excess: excess,
            nodes,
            holds: excess <= POINTWISE_TOL,
        });
    }
    let lhs = rel_entropy(rho, omega)?.value - rel_entropy(sigma, omega)?.value;
    let bound = regions.iter().map(|r| r.majorant_integral).sum();
    Ok(RegionSplit {
        eps,
        m,
        regions,
        lhs,
        bound,
    })
}
