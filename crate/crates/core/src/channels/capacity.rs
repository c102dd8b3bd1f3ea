//! Coherent information, the degradability functional `U_Θ`, and the capacity
//! bounds for approximately degradable channels.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{channel_dmax_stabilised, diamond_bracket, maximally_mixed_matrix, QuantumChannel};
use crate::divergences::{eps_log2, golden_section_min, h2, xlog2x};
use crate::error::{ensure_same_dim, range_err, Error, Result};
use crate::lab::{ginibre_state, sample_rng};
use crate::operator::{eigenvalues, CMatrix, HermitianOperator};
use crate::tolerances::TOL;

/// Iteration cap of the conditional-gradient ascent.
pub const MAX_ASCENT_ITERATIONS: usize = 10_000;

/// Settings for the non-convex coherent-information search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    /// Target Frank–Wolfe gap.
    pub tol: f64,
    /// Random full-rank starting points in addition to `I/d`.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            restarts: 4,
            seed: 0,
        }
    }
}

/// Outcome of a conditional-gradient ascent over density matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentResult {
    /// Objective at the final iterate, in bits.
    pub value: f64,
    /// Frank–Wolfe gap at the final iterate; `value + gap` bounds the supremum of a concave objective.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after each accepted iteration.
    #[serde(skip)]
    pub history: Vec<f64>,
}

fn entropy_of(m: &CMatrix) -> Result<f64> {
    Ok(-eigenvalues(m)?.into_iter().map(xlog2x).sum::<f64>())
}

/// `log2 X` with the eigenvalue floor applied.
fn log2_floored(m: &CMatrix) -> Result<CMatrix> {
    let e = HermitianOperator::from_matrix_unchecked(m.clone()).eigh()?;
    Ok(e.map(|v| v.max(TOL.log_floor).log2()).into_matrix())
}

/// Conditional-gradient ascent with golden-section line search from `start`.
fn frank_wolfe(
    start: CMatrix,
    objective: &(dyn Fn(&CMatrix) -> Result<f64> + Sync),
    gradient: &(dyn Fn(&CMatrix) -> Result<CMatrix> + Sync),
    tol: f64,
) -> Result<AscentResult> {
    let mut rho = start;
    let mut value = objective(&rho)?;
    let mut history = vec![value];
    let mut gap = f64::INFINITY;
    for k in 0..MAX_ASCENT_ITERATIONS {
        let g = gradient(&rho)?;
        let e = HermitianOperator::from_matrix_unchecked(g.clone()).eigh()?;
        let v = e.eigenvectors.columns(0, 1).into_owned();
        let along: f64 = (0..rho.nrows())
            .flat_map(|i| (0..rho.nrows()).map(move |j| (i, j)))
            .map(|(i, j)| (g[(i, j)] * rho[(j, i)]).re)
            .sum();
        gap = (e.eigenvalues[0] - along).max(0.0);
        if gap <= tol {
            return Ok(AscentResult {
                value,
                gap,
                iterations: k,
                converged: true,
                history,
            });
        }
        let dir = &v * v.adjoint() - &rho;
        let at = |t: f64| &rho + &dir * Complex64::new(t, 0.0);
        let t_line =
            golden_section_min(|t| -objective(&at(t)).unwrap_or(f64::NAN), 0.0, 1.0, 1e-12);
        let t_open = 2.0 / (k as f64 + 2.0);
        let mut best: Option<(f64, f64)> = None;
        for t in [t_line, t_open] {
            let f = objective(&at(t))?;
            if f > value && best.is_none_or(|(bf, _)| f > bf) {
                best = Some((f, t));
            }
        }
        match best {
            Some((f, t)) => {
                rho = at(t);
                value = f;
                history.push(value);
            }
            None => break,
        }
    }
    Ok(AscentResult {
        value,
        gap,
        iterations: history.len() - 1,
        converged: gap <= tol,
        history,
    })
}

/// `U_Θ(N) = sup_ρ S(N(ρ)) − S(Θ(N(ρ)))`, maximised by conditional gradient until the
/// duality gap is at most `tol`.
pub fn u_theta(n: &QuantumChannel, theta: &QuantumChannel, tol: f64) -> Result<AscentResult> {
    ensure_same_dim(n.dout(), theta.din())?;
    if !(tol > 0.0) {
        return Err(range_err(format!("tolerance {tol} must be positive")));
    }
    let objective = |rho: &CMatrix| -> Result<f64> {
        let out = n.apply_matrix(rho);
        Ok(entropy_of(&out)? - entropy_of(&theta.apply_matrix(&out))?)
    };
    let gradient = |rho: &CMatrix| -> Result<CMatrix> {
        let out = n.apply_matrix(rho);
        let deg = theta.apply_matrix(&out);
        let inner = theta.adjoint_apply(&log2_floored(&deg)?) - log2_floored(&out)?;
        Ok(n.adjoint_apply(&inner))
    };
    let result = frank_wolfe(maximally_mixed_matrix(n.din()), &objective, &gradient, tol)?;
    if !result.converged {
        return Err(Error::ToleranceNotReached {
            target: tol,
            achieved: result.gap,
            work: result.iterations as u64,
        });
    }
    Ok(result)
}

/// Best local maximum of `S(N(ρ)) − S(N^c(ρ))` over `I/d` and `opts.restarts` seeded
/// random starts. A lower bound on the coherent information, not certified as global.
pub fn coherent_info_lower(n: &QuantumChannel, opts: &AscentOptions) -> Result<AscentResult> {
    let nc = n.complementary()?;
    let objective = |rho: &CMatrix| -> Result<f64> {
        Ok(entropy_of(&n.apply_matrix(rho))? - entropy_of(&nc.apply_matrix(rho))?)
    };
    let gradient = |rho: &CMatrix| -> Result<CMatrix> {
        Ok(nc.adjoint_apply(&log2_floored(&nc.apply_matrix(rho))?)
            - n.adjoint_apply(&log2_floored(&n.apply_matrix(rho))?))
    };
    let d = n.din();
    let runs: Vec<Result<AscentResult>> = (0..=opts.restarts)
        .into_par_iter()
        .map(|i| {
            let start = if i == 0 {
                maximally_mixed_matrix(d)
            } else {
                ginibre_state(d, d, &mut sample_rng(opts.seed, i as u64 - 1))?
                    .matrix()
                    .clone()
            };
            frank_wolfe(start, &objective, &gradient, opts.tol)
        })
        .collect();
    let mut best: Option<AscentResult> = None;
    for r in runs {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one start"))
}

/// One capacity upper bound with its range condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityBound {
    /// Bound in bits; NaN when inapplicable.
    #[serde(with = "crate::json::float")]
    pub value: f64,
    pub applicable: bool,
    /// Largest admissible `ε`.
    pub eps_limit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CapacityBound {
    fn evaluate(eps: f64, eps_limit: f64, value: impl FnOnce() -> f64) -> Self {
        if eps > eps_limit + crate::bounds::RANGE_SLACK {
            Self {
                value: f64::NAN,
                applicable: false,
                eps_limit,
                reason: Some(format!("eps = {eps} exceeds {eps_limit}")),
            }
        } else {
            Self {
                value: value(),
                applicable: true,
                eps_limit,
                reason: None,
            }
        }
    }

    fn rejected(eps_limit: f64, reason: String) -> Self {
        Self {
            value: f64::NAN,
            applicable: false,
            eps_limit,
            reason: Some(reason),
        }
    }
}

/// Max-relative-entropy ingredients of the refined bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmaxChannelTerms {
    /// Stabilised `D_max(Θ∘N ‖ π_E ∘ Tr)` in bits.
    pub theta_n_vs_depolarizing: f64,
    /// `M = min(|E|, 2^{D_max})` used in the refined coherent-information bound.
    pub m_used: f64,
}

/// Capacity bracket for an approximately degradable channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradabilityReport {
    /// `|E|`, the number of retained Kraus operators of `N`.
    pub env_dim: usize,
    /// Bracket on `½‖N^c − Θ∘N‖_⋄`.
    pub eps_lower: f64,
    pub eps_upper: f64,
    /// Value of `ε` used in the bounds.
    pub eps: f64,
    pub u_theta: f64,
    pub u_theta_gap: f64,
    /// Best coherent information found; not certified as the global maximum.
    pub ic_lower: f64,
    /// `U_Θ + ε log2(|E|² − 1) + h2(ε)`.
    pub q_upper_utheta: CapacityBound,
    /// `I_c + ε log2((|E|−1)²(|E|+1)) + 2 h2(ε)`, evaluated at `ic_lower`.
    pub q_upper_ic: CapacityBound,
    /// `U_Θ + ε log2(2^{D_max} − 1) + h2(ε)`.
    pub q_upper_utheta_refined: CapacityBound,
    /// `I_c + ε log2((M−1)(2^{D_max} − 1)) + 2 h2(ε)`.
    pub q_upper_ic_refined: CapacityBound,
    pub dmax_channel_terms: DmaxChannelTerms,
}

/// Evaluates the capacity bounds for `N` with candidate degrading map `Θ`. Without an
/// explicit `eps` the upper end of the diamond bracket is used.
pub fn degradability_bounds(
    n: &QuantumChannel,
    theta: &QuantumChannel,
    eps: Option<f64>,
    opts: &AscentOptions,
) -> Result<DegradabilityReport> {
    let nc = n.complementary()?;
    let env = nc.dout();
    ensure_same_dim(n.dout(), theta.din())?;
    ensure_same_dim(env, theta.dout())?;
    let tn = n.then(theta)?;
    let bracket = diamond_bracket(&nc, &tn)?;
    let eps_lower = (0.5 * bracket.lower).min(1.0);
    let eps_upper = (0.5 * bracket.upper).min(1.0).max(eps_lower);
    let eps = match eps {
        Some(e) if !(0.0..=1.0).contains(&e) => {
            return Err(range_err(format!("eps = {e} outside [0,1]")))
        }
        Some(e) => e,
        None => eps_upper,
    };

    let ut = u_theta(n, theta, opts.tol)?;
    let ic = coherent_info_lower(n, opts)?.value;
    let depol = QuantumChannel::completely_depolarizing(n.din(), env)?;
    let dm = channel_dmax_stabilised(&tn, &depol)?.value;
    let two_dm = dm.exp2();
    let m_used = (env as f64).min(two_dm);
    let e = env as f64;
    let u_upper = ut.value + ut.gap;
    let h = h2(eps);

    let bounds = if eps + crate::bounds::RANGE_SLACK < eps_lower {
        let reason = format!("eps = {eps} is below the certified lower bracket {eps_lower}");
        [
            CapacityBound::rejected(1.0 - 1.0 / (e * e), reason.clone()),
            CapacityBound::rejected(1.0 - 1.0 / e, reason.clone()),
            CapacityBound::rejected(1.0 - 1.0 / two_dm, reason.clone()),
            CapacityBound::rejected(1.0 - 1.0 / m_used, reason),
        ]
    } else {
        [
            CapacityBound::evaluate(eps, 1.0 - 1.0 / (e * e), || {
                u_upper + eps_log2(eps, e * e - 1.0) + h
            }),
            CapacityBound::evaluate(eps, 1.0 - 1.0 / e, || {
                ic + eps_log2(eps, (e - 1.0) * (e - 1.0) * (e + 1.0)) + 2.0 * h
            }),
            CapacityBound::evaluate(eps, 1.0 - 1.0 / two_dm, || {
                u_upper + eps_log2(eps, two_dm - 1.0) + h
            }),
            CapacityBound::evaluate(eps, 1.0 - 1.0 / m_used, || {
                ic + eps_log2(eps, (m_used - 1.0) * (two_dm - 1.0)) + 2.0 * h
            }),
        ]
    };
    let [q_upper_utheta, q_upper_ic, q_upper_utheta_refined, q_upper_ic_refined] = bounds;
    Ok(DegradabilityReport {
        env_dim: env,
        eps_lower,
        eps_upper,
        eps,
        u_theta: ut.value,
        u_theta_gap: ut.gap,
        ic_lower: ic,
        q_upper_utheta,
        q_upper_ic,
        q_upper_utheta_refined,
        q_upper_ic_refined,
        dmax_channel_terms: DmaxChannelTerms {
            theta_n_vs_depolarizing: dm,
            m_used,
        },
    })
}
