//! Entropies and divergences between states, in bits.

mod centers;

pub use centers::{dmax_center, umegaki_center};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_dim, range_err, Result};
use crate::operator::{
    product_state, BipartiteDensityMatrix, CMatrix, DensityMatrix, HermitianOperator,
};
use crate::tolerances::TOL;

/// A divergence in bits, possibly `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceValue {
    #[serde(with = "crate::json::float")]
    pub value: f64,
    pub finite: bool,
}

impl DivergenceValue {
    pub fn finite(value: f64) -> Self {
        Self {
            value,
            finite: true,
        }
    }

    pub fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            finite: false,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.finite
    }
}

/// `x log2 x` with the `0 log 0 = 0` convention; negative rounding noise counts as zero.
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy of a (sub-)probability vector.
pub fn entropy_of_spectrum(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

/// `h2` without range checks; arguments are clamped to `[0, 1]`.
pub(crate) fn h2(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// `ε log2(x)` with the `0 · log2(0) = 0` convention.
pub(crate) fn eps_log2(eps: f64, x: f64) -> f64 {
    if eps == 0.0 {
        0.0
    } else {
        eps * x.log2()
    }
}

/// Binary entropy `−p log2 p − (1−p) log2 (1−p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(range_err(format!(
            "binary entropy argument {p} outside [0,1]"
        )));
    }
    Ok(h2(p))
}

/// `g(x) = (1+x) log2(1+x) − x log2 x` for `x ≥ 0`.
pub fn g_function(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(range_err(format!(
            "g argument {x} must be finite and non-negative"
        )));
    }
    Ok(xlog2x(1.0 + x) - xlog2x(x))
}

/// `inf_{q∈(0,1)} x log2(1/q) + log2(1/(1−q))`, by grid search and golden-section refinement.
pub fn g_infimum(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(range_err(format!(
            "g argument {x} must be finite and non-negative"
        )));
    }
    let f = |q: f64| -x * q.log2() - (1.0 - q).log2();
    const N: usize = 1000;
    let mut best = 1;
    for k in 2..N {
        if f(k as f64 / N as f64) < f(best as f64 / N as f64) {
            best = k;
        }
    }
    let lo = (best as f64 - 1.0) / N as f64;
    let hi = (best as f64 + 1.0) / N as f64;
    // For x = 0 the infimum sits at the open end q → 0, which the grid does not contain.
    let q = golden_section_min(f, lo.max(f64::MIN_POSITIVE), hi, 1e-13);
    Ok(f(q))
}

/// Minimiser of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// von Neumann entropy in bits.
pub fn vn_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eigenvalues()?))
}

/// Umegaki relative entropy `Tr ρ (log2 ρ − log2 σ)`.
///
/// Infinite when `ρ` carries more than the support tolerance of weight outside `supp(σ)`.
pub fn rel_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    let s = sigma.op().eigh()?;
    let r = rho.matrix();
    let mut cross = 0.0;
    let mut inside = 0.0;
    for k in 0..s.dim() {
        let v = s.eigenvectors.column(k);
        let w = (v.adjoint() * r * v)[(0, 0)].re;
        if s.eigenvalues[k] > TOL.support_cutoff {
            inside += w;
            cross += w * s.eigenvalues[k].log2();
        }
    }
    if 1.0 - inside > TOL.support_weight {
        return Ok(DivergenceValue::infinite());
    }
    let d = -vn_entropy(rho)? - cross;
    Ok(DivergenceValue::finite(d.max(0.0)))
}

/// Hockey-stick divergence `Tr(ρ − γσ)_+` for `γ ≥ 1`.
pub fn hockey_stick(rho: &DensityMatrix, sigma: &DensityMatrix, gamma: f64) -> Result<f64> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    if !(gamma >= 1.0) {
        return Err(range_err(format!(
            "hockey-stick parameter {gamma} must be at least 1"
        )));
    }
    hockey_stick_unchecked(rho, sigma, gamma)
}

pub(crate) fn hockey_stick_unchecked(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    gamma: f64,
) -> Result<f64> {
    let diff = rho.op().combine(1.0, sigma.op(), -gamma)?;
    let e: f64 = diff.eigenvalues()?.iter().filter(|&&x| x > 0.0).sum();
    Ok(e)
}

/// `½ ‖ρ − σ‖_1`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(rho.dim(), sigma.dim())?;
    let diff = rho.op().sub(sigma.op())?;
    Ok((0.5 * diff.trace_norm()?).min(1.0))
}

/// Generalised eigenvalue problem of the pencil `(ρ, σ)` on `supp(σ)`.
#[derive(Debug, Clone)]
pub(crate) struct Pencil {
    /// Eigenvalues of `σ^{-1/2} ρ σ^{-1/2}` restricted to `supp(σ)`, descending.
    pub values: Vec<f64>,
    /// Columns `x_i` with `ρ x_i = m_i σ x_i` and `x_i† σ x_i = 1`.
    pub vectors: CMatrix,
}

/// `None` when `supp(ρ) ⊄ supp(σ)`.
pub(crate) fn pencil(rho: &CMatrix, sigma: &CMatrix) -> Result<Option<Pencil>> {
    let s = HermitianOperator::from_matrix_unchecked(sigma.clone()).eigh()?;
    let support = s.support_indices();
    let n = rho.nrows();
    let r = support.len();
    // Weight of ρ outside supp(σ): trace of ρ against the kernel projector.
    let mut outside = 0.0;
    for k in 0..n {
        if !support.contains(&k) {
            let v = s.eigenvectors.column(k);
            outside += (v.adjoint() * rho * v)[(0, 0)].re;
        }
    }
    let trace: f64 = (0..n).map(|i| rho[(i, i)].re).sum();
    if outside > TOL.support_weight * trace.max(1.0) {
        return Ok(None);
    }
    let b = CMatrix::from_fn(n, r, |i, j| {
        let k = support[j];
        s.eigenvectors[(i, k)] / s.eigenvalues[k].sqrt()
    });
    let m = b.adjoint() * rho * &b;
    let e = HermitianOperator::from_matrix_unchecked(m).eigh()?;
    let vectors = &b * &e.eigenvectors;
    Ok(Some(Pencil {
        values: e.eigenvalues,
        vectors,
    }))
}

/// Max-relative entropy `log2 inf{m : ρ ≤ m ω}`.
pub fn d_max(rho: &DensityMatrix, omega: &DensityMatrix) -> Result<DivergenceValue> {
    ensure_same_dim(rho.dim(), omega.dim())?;
    match pencil(rho.matrix(), omega.matrix())? {
        None => Ok(DivergenceValue::infinite()),
        Some(p) => {
            let m = p.values.first().copied().unwrap_or(0.0).max(0.0);
            verify_dominance(rho.matrix(), omega.matrix(), m)?;
            Ok(DivergenceValue::finite(m.log2().max(0.0)))
        }
    }
}

/// Checks `m ω − ρ ⪰ 0` up to a tolerance scaled by `m`.
pub(crate) fn verify_dominance(rho: &CMatrix, omega: &CMatrix, m: f64) -> Result<()> {
    let gap = HermitianOperator::from_matrix_unchecked(omega * Complex64::new(m, 0.0) - rho);
    let min = gap.eigenvalues()?.last().copied().unwrap_or(0.0);
    if min < -1e-8 * (1.0 + m) {
        return Err(crate::error::Error::NumericalFailure(format!(
            "max-relative entropy certificate failed (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

/// `H(A|B) = S(AB) − S(B)`.
pub fn cond_entropy(rho: &BipartiteDensityMatrix) -> Result<f64> {
    Ok(vn_entropy(rho.state())? - vn_entropy(&rho.marginal_b())?)
}

/// `I(A:B) = S(A) + S(B) − S(AB)`.
pub fn mutual_info(rho: &BipartiteDensityMatrix) -> Result<f64> {
    Ok(vn_entropy(&rho.marginal_a())? + vn_entropy(&rho.marginal_b())? - vn_entropy(rho.state())?)
}

/// `D(ρ_AB ‖ ρ_A ⊗ ρ_B)`, equal to the mutual information.
pub fn mutual_info_relative(rho: &BipartiteDensityMatrix) -> Result<DivergenceValue> {
    let prod = product_state(&rho.marginal_a(), &rho.marginal_b())?;
    rel_entropy(rho.state(), prod.state())
}
