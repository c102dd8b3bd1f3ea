//! Quantum channels as Kraus families, with normalised Choi matrices.
//!
//! The Choi matrix is `J = (Λ ⊗ id)(Φ)` for the maximally entangled `Φ` on
//! `in ⊗ in`, stored with the output factor first (basis index `b * din + a`)
//! and normalised to unit trace, so it is itself a density matrix.

mod capacity;
mod divergence;
mod io;

pub use capacity::{
    coherent_info_lower, degradability_bounds, u_theta, AscentOptions, AscentResult, CapacityBound,
    DegradabilityReport, DmaxChannelTerms, MAX_ASCENT_ITERATIONS,
};
pub use divergence::{
    channel_dmax_stabilised, channel_dmax_unstabilised, diamond_bracket, DiamondBracket,
};
pub use io::ChannelRecord;

use num_complex::Complex64;

use crate::error::{ensure_same_dim, range_err, Error, Result};
use crate::operator::{
    check_factor_dim, BipartiteDensityMatrix, CMatrix, DensityMatrix, HermitianOperator, ONE, ZERO,
};
use crate::tolerances::TOL;

/// A completely positive trace-preserving map `din → dout`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    din: usize,
    dout: usize,
    kraus: Vec<CMatrix>,
    choi: DensityMatrix,
}

fn frobenius(k: &CMatrix) -> f64 {
    k.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn basis_op(dim: usize, row: usize, col: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(row, col)] = ONE;
    m
}

fn choi_of(din: usize, dout: usize, kraus: &[CMatrix]) -> DensityMatrix {
    let n = din * dout;
    let mut j = CMatrix::zeros(n, n);
    for k in kraus {
        let v = CMatrix::from_fn(n, 1, |r, _| k[(r / din, r % din)]);
        j += &v * v.adjoint();
    }
    j /= Complex64::new(din as f64, 0.0);
    DensityMatrix::from_op_unchecked(HermitianOperator::from_matrix_unchecked(j))
}

impl QuantumChannel {
    /// Validates shapes and trace preservation `Σ K†K = I` (residual ≤ 1e-9).
    pub fn new(din: usize, dout: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        check_factor_dim(din)?;
        check_factor_dim(dout)?;
        if kraus.is_empty() {
            return Err(range_err("a channel needs at least one Kraus operator"));
        }
        let mut sum = CMatrix::zeros(din, din);
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::InvalidDimension(format!(
                    "Kraus operator {i} is {}x{}, expected {dout}x{din}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NumericalFailure(format!(
                    "Kraus operator {i} has a non-finite entry"
                )));
            }
            sum += k.adjoint() * k;
        }
        let residual = (sum - CMatrix::identity(din, din))
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.norm()));
        if residual > TOL.trace_preservation {
            return Err(Error::NotTracePreserving { residual });
        }
        let choi = choi_of(din, dout, &kraus);
        Ok(Self {
            din,
            dout,
            kraus,
            choi,
        })
    }

    /// Rebuilds a Kraus family from a normalised Choi matrix (output factor first).
    pub fn from_choi(din: usize, dout: usize, choi: &DensityMatrix) -> Result<Self> {
        ensure_same_dim(din * dout, choi.dim())?;
        let e = choi.op().eigh()?;
        let mut kraus = Vec::new();
        for (idx, &lambda) in e.eigenvalues.iter().enumerate() {
            if lambda <= TOL.support_cutoff {
                continue;
            }
            let scale = (lambda * din as f64).sqrt();
            let col = e.eigenvectors.column(idx);
            kraus.push(CMatrix::from_fn(dout, din, |b, a| col[b * din + a] * scale));
        }
        Self::new(din, dout, kraus)
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(d, d, vec![CMatrix::identity(d, d)])
    }

    /// `ρ ↦ U ρ U†`; `u` must be unitary.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        let d = u.nrows();
        Self::new(u.ncols(), d, vec![u])
    }

    /// `ρ ↦ Tr(ρ) I/dout`.
    pub fn completely_depolarizing(din: usize, dout: usize) -> Result<Self> {
        let w = Complex64::new((1.0 / dout as f64).sqrt(), 0.0);
        let mut kraus = Vec::with_capacity(din * dout);
        for b in 0..dout {
            for a in 0..din {
                let mut k = CMatrix::zeros(dout, din);
                k[(b, a)] = w;
                kraus.push(k);
            }
        }
        Self::new(din, dout, kraus)
    }

    /// `ρ ↦ (1−p) ρ + p Tr(ρ) I/d`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(range_err(format!(
                "depolarizing parameter {p} outside [0,1]"
            )));
        }
        let mut kraus = vec![CMatrix::identity(d, d) * Complex64::new((1.0 - p).sqrt(), 0.0)];
        if p > 0.0 {
            let w = Complex64::new((p / d as f64).sqrt(), 0.0);
            for b in 0..d {
                for a in 0..d {
                    kraus.push(basis_op(d, b, a) * w);
                }
            }
        }
        Self::new(d, d, kraus)
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(range_err(format!(
                "damping parameter {gamma} outside [0,1]"
            )));
        }
        let mut k0 = CMatrix::identity(2, 2);
        k0[(1, 1)] = Complex64::new((1.0 - gamma).sqrt(), 0.0);
        let mut k1 = CMatrix::zeros(2, 2);
        k1[(0, 1)] = Complex64::new(gamma.sqrt(), 0.0);
        Self::new(2, 2, vec![k0, k1])
    }

    /// Classical channel `ρ ↦ Σ_{a,b} p(b|a) ⟨a|ρ|a⟩ |b⟩⟨b|`; `p[a][b]` rows must sum to 1.
    pub fn classical(p: &[Vec<f64>]) -> Result<Self> {
        let din = p.len();
        let dout = p.first().map_or(0, Vec::len);
        let mut kraus = Vec::new();
        for (a, row) in p.iter().enumerate() {
            if row.len() != dout {
                return Err(Error::InvalidDimension(format!(
                    "row {a} of the transition matrix is ragged"
                )));
            }
            for (b, &w) in row.iter().enumerate() {
                if !(w >= 0.0) {
                    return Err(range_err(format!(
                        "transition probability p({b}|{a}) = {w} is negative"
                    )));
                }
                if w > 0.0 {
                    let mut k = CMatrix::zeros(dout, din);
                    k[(b, a)] = Complex64::new(w.sqrt(), 0.0);
                    kraus.push(k);
                }
            }
        }
        Self::new(din, dout, kraus)
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Normalised Choi matrix, output factor first.
    pub fn choi(&self) -> &DensityMatrix {
        &self.choi
    }

    /// `max |Σ K†K − I|` entrywise.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.din, self.din);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        (sum - CMatrix::identity(self.din, self.din))
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub(crate) fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dout, self.dout);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    /// `Σ K_i X K_i†` on a Hermitian operator.
    pub fn apply_operator(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        ensure_same_dim(self.din, x.dim())?;
        Ok(HermitianOperator::from_matrix_unchecked(
            self.apply_matrix(x.matrix()),
        ))
    }

    /// `Λ(ρ) = Σ K_i ρ K_i†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        ensure_same_dim(self.din, rho.dim())?;
        Ok(self.apply_unchecked(rho))
    }

    pub(crate) fn apply_unchecked(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_op_unchecked(HermitianOperator::from_matrix_unchecked(
            self.apply_matrix(rho.matrix()),
        ))
    }

    /// `(Λ ⊗ id_R)(ρ_AR)`, acting on the first factor.
    pub fn apply_extended(&self, rho: &BipartiteDensityMatrix) -> Result<BipartiteDensityMatrix> {
        ensure_same_dim(self.din, rho.da())?;
        let dr = rho.db();
        let id = CMatrix::identity(dr, dr);
        let mut out = CMatrix::zeros(self.dout * dr, self.dout * dr);
        for k in &self.kraus {
            let kk = k.kronecker(&id);
            out += &kk * rho.state().matrix() * kk.adjoint();
        }
        let state = DensityMatrix::from_op_unchecked(HermitianOperator::from_matrix_unchecked(out));
        BipartiteDensityMatrix::new(state, self.dout, dr)
    }

    /// Heisenberg-picture map `Λ†(X) = Σ K_i† X K_i`.
    pub fn adjoint_apply(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.din, self.din);
        for k in &self.kraus {
            out += k.adjoint() * x * k;
        }
        out
    }

    /// `after ∘ self`, with the Kraus family reduced to Choi rank when it would be larger.
    pub fn then(&self, after: &QuantumChannel) -> Result<Self> {
        ensure_same_dim(self.dout, after.din)?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * after.kraus.len());
        for t in &after.kraus {
            for k in &self.kraus {
                let p = t * k;
                if frobenius(&p) >= TOL.kraus_drop {
                    kraus.push(p);
                }
            }
        }
        let composed = Self::new(self.din, after.dout, kraus)?;
        if composed.kraus.len() > self.din * after.dout {
            Self::from_choi(self.din, after.dout, &composed.choi)
        } else {
            Ok(composed)
        }
    }

    /// Kraus operators whose Frobenius norm reaches the drop threshold.
    pub fn retained_kraus(&self) -> Vec<&CMatrix> {
        self.kraus
            .iter()
            .filter(|k| frobenius(k) >= TOL.kraus_drop)
            .collect()
    }

    /// Environment dimension `|E|` of the Stinespring dilation built from the retained Kraus family.
    pub fn environment_dim(&self) -> usize {
        self.retained_kraus().len()
    }

    /// Complementary channel `ρ ↦ Σ_{ij} Tr(K_i ρ K_j†) |i⟩⟨j|` to the environment.
    pub fn complementary(&self) -> Result<Self> {
        let kept = self.retained_kraus();
        let e = kept.len();
        let kraus = (0..self.dout)
            .map(|b| CMatrix::from_fn(e, self.din, |i, a| kept[i][(b, a)]))
            .collect();
        Self::new(self.din, e, kraus)
    }
}

/// Density matrix of `I/d` as a matrix, used as a neutral starting point.
pub(crate) fn maximally_mixed_matrix(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(1.0 / d as f64, 0.0)
        } else {
            ZERO
        }
    })
}

#[cfg(test)]
mod tests;
