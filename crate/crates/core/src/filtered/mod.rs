//! Divergences filtered through a finite set of channels, minimised over a finitely
//! generated free set.
//!
//! For a channel set `L` and free set `F = conv{g_1, …, g_n}`:
//!
//! - `‖X‖_L = max_{Λ∈L} ‖Λ(X)‖₁`
//! - `D^L(ρ‖F) = min_{ω∈F} max_{Λ∈L} D(Λρ‖Λω)`
//! - `D^L_max(ρ‖F) = min_{ω∈F} max_{Λ∈L} D_max(Λρ‖Λω)`
//!
//! Both minimisations are convex in the mixing weights and are solved by a barrier
//! method that also produces a certified lower bound.

mod barrier;
mod checks;

pub use checks::{cor10_check, lemma3_check, prop9_check, prop9_convex_check};

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelRecord, QuantumChannel};
use crate::divergences::{d_max, rel_entropy};
use crate::error::{ensure_same_dim, range_err, Error, Result};
use crate::operator::{DensityMatrix, HermitianOperator, OperatorRecord};

/// Default duality-gap target for the filtered minimisations, in bits.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Largest residual accepted by [`FreeSet::maximally_mixed_residual`] for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// A nonempty list of channels with a common input dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    channels: Vec<QuantumChannel>,
}

impl ChannelSet {
    pub fn new(channels: Vec<QuantumChannel>) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| range_err("channel set is empty"))?;
        for ch in &channels {
            ensure_same_dim(first.din(), ch.din())?;
        }
        Ok(Self { channels })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(vec![QuantumChannel::identity(d)?])
    }

    pub fn din(&self) -> usize {
        self.channels[0].din()
    }

    pub fn channels(&self) -> &[QuantumChannel] {
        &self.channels
    }

    /// Set with `other`'s channels appended.
    pub fn extended(&self, other: &ChannelSet) -> Result<Self> {
        Self::new(
            self.channels
                .iter()
                .chain(&other.channels)
                .cloned()
                .collect(),
        )
    }
}

/// `conv(generators)`, with a designated generator `τ` around which the set is star-shaped.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSet {
    generators: Vec<DensityMatrix>,
    star_center_index: usize,
}

impl FreeSet {
    pub fn new(generators: Vec<DensityMatrix>, star_center_index: usize) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| range_err("free set has no generators"))?;
        for g in &generators {
            ensure_same_dim(first.dim(), g.dim())?;
        }
        if star_center_index >= generators.len() {
            return Err(range_err(format!(
                "star_center_index {star_center_index} out of range for {} generators",
                generators.len()
            )));
        }
        Ok(Self {
            generators,
            star_center_index,
        })
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn generators(&self) -> &[DensityMatrix] {
        &self.generators
    }

    pub fn star_center_index(&self) -> usize {
        self.star_center_index
    }

    pub fn star_center(&self) -> &DensityMatrix {
        &self.generators[self.star_center_index]
    }

    /// `Σ_j w_j g_j` for weights on the simplex.
    pub fn mixture(&self, weights: &[f64]) -> Result<DensityMatrix> {
        ensure_same_dim(self.generators.len(), weights.len())?;
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(range_err("mixture weights must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        let mut acc = HermitianOperator::zeros(self.dim())?;
        for (g, &w) in self.generators.iter().zip(weights) {
            acc = acc.combine(1.0, g.op(), w / total)?;
        }
        Ok(DensityMatrix::from_op_unchecked(acc))
    }

    /// The family `(1−q) g_j + q τ`, star-shaped around the same `τ`.
    pub fn shrunk_toward_center(&self, q: f64) -> Result<Self> {
        let tau = self.star_center();
        let generators = self
            .generators
            .iter()
            .map(|g| g.mix(tau, 1.0 - q))
            .collect::<Result<Vec<_>>>()?;
        Self::new(generators, self.star_center_index)
    }

    /// Frobenius distance from `I/d` to the generator hull.
    pub fn maximally_mixed_residual(&self) -> Result<f64> {
        let target = DensityMatrix::maximally_mixed(self.dim())?;
        barrier::hull_distance(&self.generators, &target)
    }

    /// Whether `I/d ∈ conv(generators)` up to [`MEMBERSHIP_TOL`].
    pub fn contains_maximally_mixed(&self) -> Result<bool> {
        Ok(self.maximally_mixed_residual()? <= MEMBERSHIP_TOL)
    }
}

/// Serialised free set: QOP-JSON generators plus the star center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeSetRecord {
    pub generators: Vec<OperatorRecord>,
    pub star_center_index: usize,
}

impl FreeSetRecord {
    pub fn from_free_set(f: &FreeSet) -> Self {
        Self {
            generators: f
                .generators
                .iter()
                .map(|g| OperatorRecord::from_operator(g.op()))
                .collect(),
            star_center_index: f.star_center_index,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        crate::json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("free-set records always serialise")
    }

    pub fn to_free_set(&self) -> Result<FreeSet> {
        let generators = self
            .generators
            .iter()
            .map(OperatorRecord::to_density)
            .collect::<Result<Vec<_>>>()?;
        FreeSet::new(generators, self.star_center_index)
    }
}

/// Serialised channel set: a JSON list of QCH-JSON records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChannelSetRecord {
    pub channels: Vec<ChannelRecord>,
}

impl ChannelSetRecord {
    pub fn from_channel_set(l: &ChannelSet) -> Self {
        Self {
            channels: l.channels.iter().map(ChannelRecord::from_channel).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        crate::json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel-set records always serialise")
    }

    pub fn to_channel_set(&self) -> Result<ChannelSet> {
        ChannelSet::new(
            self.channels
                .iter()
                .map(ChannelRecord::to_channel)
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

/// Result of a filtered minimisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredValue {
    /// Objective at the returned mixture (an upper estimate of the minimum), in bits.
    #[serde(with = "crate::json::float")]
    pub value: f64,
    /// Certified lower bound on the minimum.
    #[serde(with = "crate::json::float")]
    pub lower: f64,
    /// Mixing weights of the minimiser over the generators; empty when the value is infinite.
    pub weights: Vec<f64>,
    /// Newton steps taken by the barrier method.
    pub newton_steps: usize,
}

impl FilteredValue {
    fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            lower: f64::INFINITY,
            weights: Vec::new(),
            newton_steps: 0,
        }
    }

    fn exact(value: f64, weights: Vec<f64>) -> Self {
        Self {
            value,
            lower: value,
            weights,
            newton_steps: 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn gap(&self) -> f64 {
        self.value - self.lower
    }

    /// The minimising free state, `None` when every candidate gives an infinite divergence.
    pub fn omega(&self, f: &FreeSet) -> Result<Option<DensityMatrix>> {
        if self.weights.is_empty() {
            return Ok(None);
        }
        f.mixture(&self.weights).map(Some)
    }
}

fn ensure_compatible(rho: &DensityMatrix, f: &FreeSet, l: &ChannelSet) -> Result<()> {
    ensure_same_dim(l.din(), rho.dim())?;
    ensure_same_dim(l.din(), f.dim())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(range_err(format!("tolerance {tol} must be positive")));
    }
    Ok(())
}

/// `max_{Λ∈L} ‖Λ(X)‖₁`.
pub fn filtered_norm(x: &HermitianOperator, l: &ChannelSet) -> Result<f64> {
    ensure_same_dim(l.din(), x.dim())?;
    let mut best: f64 = 0.0;
    for ch in &l.channels {
        best = best.max(ch.apply_operator(x)?.trace_norm()?);
    }
    Ok(best)
}

/// `max_{Λ∈L} D(Λρ‖Λω)`.
pub fn filtered_rel_ent_to(
    rho: &DensityMatrix,
    omega: &DensityMatrix,
    l: &ChannelSet,
) -> Result<f64> {
    ensure_same_dim(l.din(), rho.dim())?;
    ensure_same_dim(l.din(), omega.dim())?;
    let mut best: f64 = 0.0;
    for ch in &l.channels {
        best = best.max(rel_entropy(&ch.apply_unchecked(rho), &ch.apply_unchecked(omega))?.value);
    }
    Ok(best)
}

/// `max_{Λ∈L} D_max(Λρ‖Λω)`.
pub fn filtered_dmax_to(rho: &DensityMatrix, omega: &DensityMatrix, l: &ChannelSet) -> Result<f64> {
    ensure_same_dim(l.din(), rho.dim())?;
    ensure_same_dim(l.din(), omega.dim())?;
    let mut best: f64 = 0.0;
    for ch in &l.channels {
        best = best.max(d_max(&ch.apply_unchecked(rho), &ch.apply_unchecked(omega))?.value);
    }
    Ok(best)
}

/// `D^L(ρ‖F)`, minimised to a certified duality gap of at most `tol` bits.
///
/// An infinite value means every free state gives an infinite divergence for some channel.
pub fn filtered_rel_ent(
    rho: &DensityMatrix,
    f: &FreeSet,
    l: &ChannelSet,
    tol: f64,
) -> Result<FilteredValue> {
    ensure_compatible(rho, f, l)?;
    check_tol(tol)?;
    if f.generators.len() == 1 {
        let v = filtered_rel_ent_to(rho, &f.generators[0], l)?;
        return Ok(if v.is_finite() {
            FilteredValue::exact(v, vec![1.0])
        } else {
            FilteredValue::infinite()
        });
    }
    match barrier::RelEntProblem::new(rho, f, l)? {
        None => Ok(FilteredValue::infinite()),
        Some(p) => p.solve(tol),
    }
}

/// `D^L_max(ρ‖F)`, minimised to a certified duality gap of at most `tol` bits.
pub fn filtered_dmax(
    rho: &DensityMatrix,
    f: &FreeSet,
    l: &ChannelSet,
    tol: f64,
) -> Result<FilteredValue> {
    ensure_compatible(rho, f, l)?;
    check_tol(tol)?;
    if f.generators.len() == 1 {
        let v = filtered_dmax_to(rho, &f.generators[0], l)?;
        return Ok(if v.is_finite() {
            FilteredValue::exact(v, vec![1.0])
        } else {
            FilteredValue::infinite()
        });
    }
    match barrier::DmaxProblem::new(rho, f, l)? {
        None => Ok(FilteredValue::infinite()),
        Some(p) => p.solve(tol),
    }
}

pub(crate) fn tolerance_error(tol: f64, achieved: f64, work: usize) -> Error {
    Error::ToleranceNotReached {
        target: tol,
        achieved,
        work: work as u64,
    }
}
