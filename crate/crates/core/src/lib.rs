//! Quantum divergences, their hockey-stick integral representation and the
//! continuity bounds for entropic quantities built on top of them.
//!
//! # Modules
//!
//! - [`operator`]: dense Hermitian operators, states and spectral calculus.
//! - [`divergences`]: entropies, relative entropies, hockey-stick and max-relative entropy.
//! - [`channels`]: Kraus/Choi channels, channel divergences and capacity bounds.
//! - [`bounds`]: closed-form continuity bounds and state-level checks.
//! - [`filtered`]: divergences filtered through channel sets, minimised over free sets.
//! - [`integral`]: the hockey-stick integral representation and its region split.
//! - [`lab`]: seeded random generators and Monte-Carlo campaigns.
//!
//! All logarithms are base 2; entropies and divergences are in bits.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod channels;
pub mod divergences;
pub mod error;
pub mod filtered;
pub mod integral;
pub mod json;
pub mod lab;
pub mod operator;
pub mod tolerances;

pub use bounds::BoundReport;
pub use channels::{ChannelRecord, QuantumChannel};
pub use divergences::{
    binary_entropy, cond_entropy, d_max, dmax_center, g_function, hockey_stick, mutual_info,
    rel_entropy, trace_distance, umegaki_center, vn_entropy, DivergenceValue,
};
pub use error::{Error, Result};
pub use filtered::{ChannelSet, FilteredValue, FreeSet};
pub use integral::{integral_rel_entropy, region_split_diagnostic, QuadratureResult, RegionSplit};
pub use operator::{
    eigh, isotropic_mix, max_entangled, partial_trace, positive_part, product_state, tensor,
    BipartiteDensityMatrix, CMatrix, DensityMatrix, HermitianOperator, OperatorRecord,
    SpectralDecomposition, Subsystem,
};
pub use tolerances::{Tolerances, TOL};
