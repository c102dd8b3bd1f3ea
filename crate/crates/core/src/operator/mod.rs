//! Dense Hermitian operators, quantum states and their spectral calculus.
//!
//! Every operator is a dense `nalgebra` matrix of `Complex64`. Hermiticity is
//! checked once at construction and then enforced exactly by symmetrising,
//! so downstream eigensolvers always see a Hermitian input.

mod io;
mod states;

pub use io::OperatorRecord;
pub(crate) use io::{entries_to_matrix, matrix_to_entries};
pub use states::{isotropic_mix, max_entangled, product_state};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_dim, Error, Result};
use crate::tolerances::{MAX_FACTOR_DIM, MAX_OPERATOR_DIM, TOL};

/// Dense complex matrix used for every operator.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

/// Eigen-decomposition `X = U diag(λ) U†` with eigenvalues sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are the orthonormal eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
}

/// A positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

/// A density matrix on `A ⊗ B`, basis index `a * d_b + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteDensityMatrix {
    state: DensityMatrix,
    da: usize,
    db: usize,
}

/// Tensor factor selector for bipartite operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidDimension(
            "dimension must be at least 1".into(),
        ));
    }
    if dim > MAX_OPERATOR_DIM {
        return Err(Error::InvalidDimension(format!(
            "dimension {dim} exceeds the cap {MAX_OPERATOR_DIM}"
        )));
    }
    Ok(())
}

pub(crate) fn check_factor_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_FACTOR_DIM {
        return Err(Error::InvalidDimension(format!(
            "factor dimension {dim} outside 1..={MAX_FACTOR_DIM}"
        )));
    }
    Ok(())
}

/// Replaces `m` by `(m + m†)/2` in place.
pub(crate) fn symmetrize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let d = m[(i, j)] - m[(j, i)].conj();
            dev = dev.max(d.re.abs()).max(d.im.abs());
        }
    }
    dev
}

impl HermitianOperator {
    /// Validates squareness, the dimension cap and hermiticity (1e-10), then symmetrises.
    pub fn new(mut m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        check_dim(m.nrows())?;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericalFailure("non-finite matrix entry".into()));
        }
        let deviation = hermiticity_deviation(&m);
        if deviation > TOL.hermiticity {
            return Err(Error::NonHermitian { deviation });
        }
        symmetrize(&mut m);
        Ok(Self { m })
    }

    /// Wraps a matrix known to be Hermitian up to rounding.
    pub(crate) fn from_matrix_unchecked(mut m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        symmetrize(&mut m);
        Self { m }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        check_dim(diag.len())?;
        let n = diag.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        });
        Ok(Self { m })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            m: CMatrix::identity(dim, dim),
        })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            m: CMatrix::zeros(dim, dim),
        })
    }

    /// The rank-one operator `|v⟩⟨v|` (not normalised).
    pub fn outer(v: &[Complex64]) -> Result<Self> {
        check_dim(v.len())?;
        let n = v.len();
        Ok(Self::from_matrix_unchecked(CMatrix::from_fn(
            n,
            n,
            |i, j| v[i] * v[j].conj(),
        )))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs_entry(&self) -> f64 {
        self.m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            m: &self.m * Complex64::new(a, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m - &other.m,
        })
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m * Complex64::new(a, 0.0) + &other.m * Complex64::new(b, 0.0),
        })
    }

    /// `Tr(self · other)`, real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(trace_product(&self.m, &other.m))
    }

    pub fn eigh(&self) -> Result<SpectralDecomposition> {
        eigh(self)
    }

    /// Eigenvalues sorted descending, without eigenvectors.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigenvalues(&self.m)
    }

    pub fn positive_part(&self) -> Result<Self> {
        positive_part(self)
    }

    /// Sum of the absolute eigenvalues.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|x| x.abs()).sum())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        tensor(self, other)
    }
}

/// `Tr(a b)` for square matrices of equal size, real part only.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

fn eigen_decompose(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let eig = nalgebra::linalg::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

pub(crate) fn eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    if m.nrows() == 2 {
        return Ok(eigenvalues_2x2(m));
    }
    let eig = nalgebra::linalg::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

fn eigenvalues_2x2(m: &CMatrix) -> Vec<f64> {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    vec![mean + r, mean - r]
}

/// Spectral decomposition of a Hermitian operator.
pub fn eigh(x: &HermitianOperator) -> Result<SpectralDecomposition> {
    let (eigenvalues, eigenvectors) = eigen_decompose(&x.m)?;
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `Σ_{x_i > 0} x_i |i⟩⟨i|`.
pub fn positive_part(x: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(eigh(x)?.map(|v| v.max(0.0)))
}

/// Kronecker product.
pub fn tensor(x: &HermitianOperator, y: &HermitianOperator) -> Result<HermitianOperator> {
    check_dim(x.dim() * y.dim())?;
    Ok(HermitianOperator {
        m: x.m.kronecker(&y.m),
    })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(λ)) U†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.dim();
        let u = &self.eigenvectors;
        let fv: Vec<f64> = self.eigenvalues.iter().map(|&v| f(v)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in fv.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let col = u.column(k);
            for i in 0..n {
                let ci = col[i] * w;
                for j in 0..n {
                    out[(i, j)] += ci * col[j].conj();
                }
            }
        }
        HermitianOperator::from_matrix_unchecked(out)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map(|v| v)
    }

    /// Max absolute entry of `U diag(λ) U† − x`, divided by `1 + max|x_ij|`.
    pub fn reconstruction_error(&self, x: &HermitianOperator) -> f64 {
        let r = self.reconstruct();
        let diff = (&r.m - &x.m).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        diff / (1.0 + x.max_abs_entry())
    }

    /// Max absolute entry of `U†U − I`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        let g = self.eigenvectors.adjoint() * &self.eigenvectors;
        let mut e: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { ONE } else { ZERO };
                e = e.max((g[(i, j)] - target).norm());
            }
        }
        e
    }

    /// Columns of eigenvectors whose eigenvalue exceeds the support cutoff.
    pub(crate) fn support_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&k| self.eigenvalues[k] > TOL.support_cutoff)
            .collect()
    }
}

impl DensityMatrix {
    /// Validates positivity (eigenvalues ≥ −1e-10) and unit trace (within 1e-10).
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > TOL.trace {
            return Err(Error::TraceNotOne { trace });
        }
        let min_eigenvalue = op.eigenvalues()?.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -TOL.psd {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { op })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    /// Trusted constructors only; renormalises the trace.
    pub(crate) fn from_op_unchecked(op: HermitianOperator) -> Self {
        let t = op.trace();
        debug_assert!(t > 0.0);
        let op = if (t - 1.0).abs() > 0.0 {
            op.scale(1.0 / t)
        } else {
            op
        };
        Self { op }
    }

    /// Normalised projector onto `v`.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::Range("pure state vector must be non-zero".into()));
        }
        let s = 1.0 / norm2.sqrt();
        let w: Vec<Complex64> = v.iter().map(|z| z * s).collect();
        Ok(Self {
            op: HermitianOperator::outer(&w)?,
        })
    }

    /// `|k⟩⟨k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Range(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Self::diagonal(&diag)
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(probs)?)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Ok(Self {
            op: HermitianOperator::identity(dim)?.scale(1.0 / dim as f64),
        })
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.op.m
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.op.eigenvalues()
    }

    pub fn purity(&self) -> f64 {
        trace_product(&self.op.m, &self.op.m)
    }

    /// `λ self + (1 − λ) other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Range(format!(
                "mixing weight {lambda} outside [0,1]"
            )));
        }
        Ok(Self {
            op: self.op.combine(lambda, &other.op, 1.0 - lambda)?,
        })
    }

    /// Largest eigenvalue.
    pub fn lambda_max(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }
}

impl BipartiteDensityMatrix {
    pub fn new(state: DensityMatrix, da: usize, db: usize) -> Result<Self> {
        check_factor_dim(da)?;
        check_factor_dim(db)?;
        ensure_same_dim(da * db, state.dim())?;
        Ok(Self { state, da, db })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn into_state(self) -> DensityMatrix {
        self.state
    }

    pub fn da(&self) -> usize {
        self.da
    }

    pub fn db(&self) -> usize {
        self.db
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.da, self.db)
    }

    pub fn partial_trace(&self, keep: Subsystem) -> DensityMatrix {
        DensityMatrix {
            op: partial_trace_op(&self.state.op, self.da, self.db, keep),
        }
    }

    pub fn marginal_a(&self) -> DensityMatrix {
        self.partial_trace(Subsystem::A)
    }

    pub fn marginal_b(&self) -> DensityMatrix {
        self.partial_trace(Subsystem::B)
    }
}

/// Reduced state on the kept subsystem.
pub fn partial_trace(rho: &BipartiteDensityMatrix, keep: Subsystem) -> DensityMatrix {
    rho.partial_trace(keep)
}

/// Partial trace of an arbitrary operator on `A ⊗ B`.
pub(crate) fn partial_trace_op(
    x: &HermitianOperator,
    da: usize,
    db: usize,
    keep: Subsystem,
) -> HermitianOperator {
    let m = &x.m;
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
        }),
    };
    HermitianOperator::from_matrix_unchecked(out)
}
