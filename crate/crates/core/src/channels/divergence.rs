//! Channel divergences and the diamond-norm bracket.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QuantumChannel;
use crate::divergences::{d_max, golden_section_min, pencil, DivergenceValue};
use crate::error::{ensure_same_dim, Result};
use crate::lab::{haar_pure, sample_rng};
use crate::operator::{CMatrix, DensityMatrix, HermitianOperator};

fn ensure_same_shape(l1: &QuantumChannel, l2: &QuantumChannel) -> Result<()> {
    ensure_same_dim(l1.din(), l2.din())?;
    ensure_same_dim(l1.dout(), l2.dout())
}

/// Stabilised max-relative entropy `log2 min{λ : λ Λ2 − Λ1 completely positive}`,
/// evaluated on normalised Choi matrices.
pub fn channel_dmax_stabilised(
    l1: &QuantumChannel,
    l2: &QuantumChannel,
) -> Result<DivergenceValue> {
    ensure_same_shape(l1, l2)?;
    d_max(l1.choi(), l2.choi())
}

/// Top generalised eigenpair of `(Λ1(ψ), Λ2(ψ))`; `None` when the support condition fails.
fn local_value(
    l1: &QuantumChannel,
    l2: &QuantumChannel,
    psi: &CMatrix,
) -> Result<Option<(f64, CMatrix)>> {
    let rho = psi * psi.adjoint();
    Ok(
        pencil(&l1.apply_matrix(&rho), &l2.apply_matrix(&rho))?.map(|p| {
            let x = p.vectors.columns(0, 1).into_owned();
            (p.values[0], x)
        }),
    )
}

fn normalized(v: CMatrix) -> CMatrix {
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

const ASCENT_STEPS: usize = 200;

/// Riemannian ascent of `ψ ↦ λ_max` on the unit sphere from `psi`.
fn ascend(l1: &QuantumChannel, l2: &QuantumChannel, mut psi: CMatrix) -> Result<f64> {
    let Some((mut value, mut x)) = local_value(l1, l2, &psi)? else {
        return Ok(f64::INFINITY);
    };
    let eval = |v: &CMatrix| -> Result<f64> {
        Ok(local_value(l1, l2, v)?.map_or(f64::INFINITY, |(m, _)| m))
    };
    for _ in 0..ASCENT_STEPS {
        let xx = &x * x.adjoint();
        let g = l1.adjoint_apply(&xx) - l2.adjoint_apply(&xx) * Complex64::new(value, 0.0);
        let gpsi = &g * &psi;
        let along = (psi.adjoint() * &gpsi)[(0, 0)];
        let tangent = gpsi - &psi * along;
        if tangent.norm() < 1e-13 {
            break;
        }
        let dir = normalized(tangent);
        let curve = |t: f64| {
            normalized(&psi * Complex64::new(t.cos(), 0.0) + &dir * Complex64::new(t.sin(), 0.0))
        };
        let t = golden_section_min(
            |t| -eval(&curve(t)).unwrap_or(f64::NAN),
            0.0,
            std::f64::consts::FRAC_PI_2,
            1e-10,
        );
        let mut best = (value, None);
        let stepped = curve(t);
        let v = eval(&stepped)?;
        if v > best.0 {
            best = (v, Some(stepped));
        }
        let jump = normalized(
            HermitianOperator::from_matrix_unchecked(g)
                .eigh()?
                .eigenvectors
                .columns(0, 1)
                .into_owned(),
        );
        let v = eval(&jump)?;
        if v > best.0 {
            best = (v, Some(jump));
        }
        match best {
            (v, _) if v.is_infinite() => return Ok(v),
            (v, Some(next)) if v > value + 1e-13 * value.max(1.0) => {
                psi = next;
                let (m, xn) = local_value(l1, l2, &psi)?.expect("finite value has a pencil");
                value = m;
                x = xn;
            }
            _ => break,
        }
    }
    Ok(value)
}

/// Lower estimate of the un-stabilised `sup_ρ D_max(Λ1(ρ)‖Λ2(ρ))` by local ascent over
/// pure inputs from the computational basis and `restarts` seeded Haar-random states.
/// Not certified as the global supremum.
pub fn channel_dmax_unstabilised(
    l1: &QuantumChannel,
    l2: &QuantumChannel,
    restarts: usize,
    seed: u64,
) -> Result<f64> {
    ensure_same_shape(l1, l2)?;
    let d = l1.din();
    let mixed = DensityMatrix::maximally_mixed(d)?;
    let floor = match d_max(&l1.apply_unchecked(&mixed), &l2.apply_unchecked(&mixed))? {
        v if !v.is_finite() => return Ok(f64::INFINITY),
        v => v.value,
    };
    let results: Vec<Result<f64>> = (0..d + restarts)
        .into_par_iter()
        .map(|i| {
            let psi = if i < d {
                CMatrix::from_fn(d, 1, |r, _| {
                    if r == i {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            } else {
                let mut rng = sample_rng(seed, (i - d) as u64);
                let rho = haar_pure(d, &mut rng)?;
                let e = rho.op().eigh()?;
                e.eigenvectors.columns(0, 1).into_owned()
            };
            ascend(l1, l2, psi)
        })
        .collect();
    let mut best = floor;
    for r in results {
        let m = r?;
        if m.is_infinite() {
            return Ok(f64::INFINITY);
        }
        best = best.max(m.max(1.0).log2());
    }
    Ok(best)
}

/// Bracket on the diamond distance `‖Λ1 − Λ2‖_⋄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondBracket {
    /// `‖J1 − J2‖₁` on normalised Choi matrices (maximally entangled input).
    pub lower: f64,
    /// `din · ‖J1 − J2‖₁`.
    pub upper: f64,
}

pub fn diamond_bracket(l1: &QuantumChannel, l2: &QuantumChannel) -> Result<DiamondBracket> {
    ensure_same_shape(l1, l2)?;
    let lower = l1.choi().op().sub(l2.choi().op())?.trace_norm()?;
    Ok(DiamondBracket {
        lower,
        upper: l1.din() as f64 * lower,
    })
}
