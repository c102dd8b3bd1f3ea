//! Absolute tolerances shared by every module.
//!
//! All thresholds live in one record so that validation, support decisions
//! and a-posteriori checks agree with each other.

/// Tolerance configuration. All values are absolute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max absolute entry deviation of `X - X^dagger`.
    pub hermiticity: f64,
    /// Smallest eigenvalue accepted for a positive semidefinite operator (negated).
    pub psd: f64,
    /// Allowed deviation of a state's trace from 1.
    pub trace: f64,
    /// Relative reconstruction error of a spectral decomposition.
    pub reconstruction: f64,
    /// Eigenvalues with magnitude below this are zero for rank and support decisions.
    pub support_cutoff: f64,
    /// Weight of a state outside a support before the support condition fails.
    pub support_weight: f64,
    /// Trace-preservation residual of a Kraus family.
    pub trace_preservation: f64,
    /// Frobenius norm below which a Kraus operator is discarded.
    pub kraus_drop: f64,
    /// Eigenvalue floor inside logarithms of gradient computations.
    pub log_floor: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-10,
        psd: 1e-10,
        trace: 1e-10,
        reconstruction: 1e-9,
        support_cutoff: 1e-12,
        support_weight: 1e-10,
        trace_preservation: 1e-9,
        kraus_drop: 1e-12,
        log_floor: 1e-14,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// The tolerances used throughout the crate.
pub const TOL: Tolerances = Tolerances::DEFAULT;

/// Largest dimension of a single tensor factor.
pub const MAX_FACTOR_DIM: usize = 64;

/// Largest dimension of any dense operator (a bipartite operator of two capped factors).
pub const MAX_OPERATOR_DIM: usize = MAX_FACTOR_DIM * MAX_FACTOR_DIM;
