use num_complex::Complex64;

use super::{check_factor_dim, BipartiteDensityMatrix, CMatrix, DensityMatrix, HermitianOperator};
use crate::error::{range_err, Error, Result};

fn check_bipartite_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "local dimension {d} must be at least 2"
        )));
    }
    check_factor_dim(d)
}

/// Projector onto `(1/√d) Σ_i |ii⟩`.
pub fn max_entangled(d: usize) -> Result<BipartiteDensityMatrix> {
    check_bipartite_d(d)?;
    let n = d * d;
    let w = 1.0 / d as f64;
    let m = CMatrix::from_fn(n, n, |r, c| {
        let diag_r = r / d == r % d;
        let diag_c = c / d == c % d;
        if diag_r && diag_c {
            Complex64::new(w, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let state = DensityMatrix {
        op: HermitianOperator { m },
    };
    BipartiteDensityMatrix::new(state, d, d)
}

/// `(1−ε) Φ_d + ε/(d²−1) (I − Φ_d)`.
pub fn isotropic_mix(d: usize, eps: f64) -> Result<BipartiteDensityMatrix> {
    check_bipartite_d(d)?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(range_err(format!("isotropic weight {eps} outside [0,1]")));
    }
    let phi = max_entangled(d)?;
    let n = d * d;
    let off = eps / (n as f64 - 1.0);
    let id = HermitianOperator::identity(n)?;
    // (1−ε)Φ + off (I − Φ) = (1−ε−off) Φ + off I
    let op = phi.state().op().combine(1.0 - eps - off, &id, off)?;
    BipartiteDensityMatrix::new(DensityMatrix { op }, d, d)
}

/// `ρ_A ⊗ ρ_B` as a bipartite state.
pub fn product_state(a: &DensityMatrix, b: &DensityMatrix) -> Result<BipartiteDensityMatrix> {
    let op = a.op().tensor(b.op())?;
    BipartiteDensityMatrix::new(DensityMatrix { op }, a.dim(), b.dim())
}
