//! Barrier solvers for the filtered minimisations over generator weights.
//!
//! Relative entropy: minimise `t` subject to `f_k(w) ≤ t` for every channel `k`, with
//! `w` on the simplex, using the barrier `τ t − Σ ln(t − f_k) − Σ ln w_j`. Any simplex
//! distribution `μ` over the channels gives the lower bound
//! `Σ μ_k f_k(w) + min_j s_j − ⟨s, w⟩` with `s = Σ μ_k ∇f_k(w)`; the barrier's
//! multipliers `μ_k ∝ 1/(t − f_k)` are used.
//!
//! Max-relative entropy: with `v = m w` the problem becomes the linear SDP
//! `min Σ v_j` subject to `Σ_j v_j Λ_k(g_j) ⪰ Λ_k(ρ)`, `v ≥ 0`, solved with a log-det
//! barrier; the scaled inverse slacks are a feasible dual and certify the lower bound.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{tolerance_error, ChannelSet, FilteredValue, FreeSet};
use crate::divergences::{pencil, vn_entropy};
use crate::error::{Error, Result};
use crate::operator::{CMatrix, DensityMatrix, HermitianOperator};
use crate::tolerances::TOL;

/// Cap on Newton steps per minimisation.
const MAX_NEWTON_STEPS: usize = 10_000;
/// Centering stops once half the squared Newton decrement falls below this.
const CENTERING_TOL: f64 = 1e-11;
const BARRIER_GROWTH: f64 = 10.0;
/// Past this the slacks are at rounding level and further centering cannot help.
const MAX_BARRIER_PARAMETER: f64 = 1e14;
/// Below this Newton decrement the full step is taken whenever it stays feasible; the
/// sufficient-decrease test is unreliable there because barrier differences reach rounding level.
const NEWTON_REGION: f64 = 1e-4;

/// Restriction of `(Λρ, {Λ g_j})` to the support of `Σ_j Λ g_j`; `None` if `Λρ` has weight outside it.
fn compress(a: &CMatrix, bs: &[CMatrix]) -> Result<Option<(CMatrix, Vec<CMatrix>)>> {
    let n = a.nrows();
    let mut sum = CMatrix::zeros(n, n);
    for b in bs {
        sum += b;
    }
    let e = HermitianOperator::from_matrix_unchecked(sum).eigh()?;
    let top = e.eigenvalues[0].max(1.0);
    let keep: Vec<usize> = (0..n)
        .filter(|&i| e.eigenvalues[i] > TOL.support_cutoff * top)
        .collect();
    let p = CMatrix::from_fn(n, keep.len(), |i, j| e.eigenvectors[(i, keep[j])]);
    let a_c = p.adjoint() * a * &p;
    let inside: f64 = (0..keep.len()).map(|i| a_c[(i, i)].re).sum();
    let total: f64 = (0..n).map(|i| a[(i, i)].re).sum();
    if total - inside > TOL.support_weight {
        return Ok(None);
    }
    let bs_c = bs.iter().map(|b| p.adjoint() * b * &p).collect();
    Ok(Some((a_c, bs_c)))
}

/// Channel images of `ρ` and of every generator, compressed per channel.
fn channel_pieces(
    rho: &DensityMatrix,
    f: &FreeSet,
    l: &ChannelSet,
) -> Result<Option<Vec<(f64, CMatrix, Vec<CMatrix>)>>> {
    let mut pieces = Vec::with_capacity(l.channels().len());
    for ch in l.channels() {
        let a = ch.apply_unchecked(rho);
        let bs: Vec<CMatrix> = f
            .generators()
            .iter()
            .map(|g| ch.apply_matrix(g.matrix()))
            .collect();
        match compress(a.matrix(), &bs)? {
            None => return Ok(None),
            Some((a_c, bs_c)) => pieces.push((-vn_entropy(&a)?, a_c, bs_c)),
        }
    }
    Ok(Some(pieces))
}

fn weighted_sum(bs: &[CMatrix], w: &[f64]) -> CMatrix {
    let mut acc = CMatrix::zeros(bs[0].nrows(), bs[0].ncols());
    for (b, &x) in bs.iter().zip(w) {
        acc += b * Complex64::new(x, 0.0);
    }
    acc
}

/// First divided difference of `ln`.
fn dd1(x: f64, y: f64) -> f64 {
    if x == y {
        1.0 / x
    } else {
        ((x - y) / y).ln_1p() / (x - y)
    }
}

/// Second divided difference of `ln`.
fn dd2(x: f64, y: f64, z: f64) -> f64 {
    let mut v = [x, y, z];
    v.sort_by(|a, b| b.total_cmp(a));
    let [a, b, c] = v;
    if a - c <= 1e-4 * a {
        let m = (a + b + c) / 3.0;
        -0.5 / (m * m)
    } else {
        (dd1(a, b) - dd1(b, c)) / (a - c)
    }
}

struct PieceEval {
    value: f64,
    grad: DVector<f64>,
    hess: Option<DMatrix<f64>>,
}

/// `f(w) = −S(A) − Tr A log2(Σ w_j B_j)` with derivatives in the weights.
struct RelEntPiece {
    neg_entropy: f64,
    a: CMatrix,
    bs: Vec<CMatrix>,
}

impl RelEntPiece {
    fn eval(&self, w: &[f64], order: u8) -> Result<Option<PieceEval>> {
        let omega = weighted_sum(&self.bs, w);
        let e = HermitianOperator::from_matrix_unchecked(omega).eigh()?;
        if e.eigenvalues.last().is_some_and(|&l| !(l > 0.0)) {
            return Ok(None);
        }
        let lam = &e.eigenvalues;
        let u = &e.eigenvectors;
        let r = lam.len();
        let a = u.adjoint() * &self.a * u;
        let mut value = self.neg_entropy;
        for i in 0..r {
            value -= a[(i, i)].re * lam[i].ln() / LN_2;
        }
        let n = self.bs.len();
        let mut grad = DVector::zeros(n);
        if order == 0 {
            return Ok(Some(PieceEval {
                value,
                grad,
                hess: None,
            }));
        }
        let bs: Vec<CMatrix> = self.bs.iter().map(|b| u.adjoint() * b * u).collect();
        let d1 = DMatrix::from_fn(r, r, |i, j| dd1(lam[i], lam[j]));
        for (j, b) in bs.iter().enumerate() {
            let mut acc = 0.0;
            for p in 0..r {
                for q in 0..r {
                    acc += (a[(q, p)] * b[(p, q)]).re * d1[(p, q)];
                }
            }
            grad[j] = -acc / LN_2;
        }
        if order == 1 {
            return Ok(Some(PieceEval {
                value,
                grad,
                hess: None,
            }));
        }
        let d2: Vec<f64> = (0..r * r * r)
            .map(|idx| dd2(lam[idx / (r * r)], lam[(idx / r) % r], lam[idx % r]))
            .collect();
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let (bi, bj) = (&bs[i], &bs[j]);
                let mut acc = 0.0;
                for p in 0..r {
                    for q in 0..r {
                        let apq = a[(q, p)];
                        for c in 0..r {
                            let term = bi[(p, c)] * bj[(c, q)] + bj[(p, c)] * bi[(c, q)];
                            acc += (apq * term).re * d2[(p * r + c) * r + q];
                        }
                    }
                }
                hess[(i, j)] = -acc / LN_2;
                hess[(j, i)] = hess[(i, j)];
            }
        }
        Ok(Some(PieceEval {
            value,
            grad,
            hess: Some(hess),
        }))
    }
}

pub(super) struct RelEntProblem {
    pieces: Vec<RelEntPiece>,
    n: usize,
}

impl RelEntProblem {
    pub(super) fn new(rho: &DensityMatrix, f: &FreeSet, l: &ChannelSet) -> Result<Option<Self>> {
        Ok(channel_pieces(rho, f, l)?.map(|pieces| Self {
            pieces: pieces
                .into_iter()
                .map(|(neg_entropy, a, bs)| RelEntPiece { neg_entropy, a, bs })
                .collect(),
            n: f.generators().len(),
        }))
    }

    fn eval(&self, w: &[f64], order: u8) -> Result<Option<Vec<PieceEval>>> {
        let mut out = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            match p.eval(w, order)? {
                None => return Ok(None),
                Some(e) => out.push(e),
            }
        }
        Ok(Some(out))
    }

    /// Barrier value at `(w, t)`, `None` outside the domain.
    fn barrier(&self, w: &[f64], t: f64, tau: f64) -> Result<Option<f64>> {
        if w.iter().any(|&x| !(x > 0.0)) {
            return Ok(None);
        }
        let Some(ev) = self.eval(w, 0)? else {
            return Ok(None);
        };
        let mut phi = tau * t;
        for e in &ev {
            let s = t - e.value;
            if !(s > 0.0) {
                return Ok(None);
            }
            phi -= s.ln();
        }
        Ok(Some(phi - w.iter().map(|x| x.ln()).sum::<f64>()))
    }

    /// `Σ μ_k f_k(w) + min_j s_j − ⟨s, w⟩` with `s = Σ μ_k ∇f_k(w)`; valid for any `μ` on the simplex.
    fn bound_for(&self, ev: &[PieceEval], w: &[f64], mu: &[f64]) -> f64 {
        let mut s = DVector::zeros(self.n);
        let mut base = 0.0;
        for (e, &m) in ev.iter().zip(mu) {
            s += &e.grad * m;
            base += m * e.value;
        }
        let sw: f64 = (0..self.n).map(|j| s[j] * w[j]).sum();
        base + s.min() - sw
    }

    /// Lower bound and primal value at `w`.
    ///
    /// The barrier multipliers `μ_k ∝ 1/(t − f_k)` lose relative accuracy once `t − f_k`
    /// approaches rounding level, so a second `μ` is fitted on the active channels to make
    /// `s` constant on the generators in use; the better of the two bounds is kept.
    fn certificate(&self, ev: &[PieceEval], w: &[f64], t: f64) -> (f64, f64) {
        let inv: Vec<f64> = ev.iter().map(|e| 1.0 / (t - e.value)).collect();
        let total: f64 = inv.iter().sum();
        let mu: Vec<f64> = inv.iter().map(|m| m / total).collect();
        let mut lower = self.bound_for(ev, w, &mu);
        if let Some(fitted) = self.fitted_multipliers(ev, w, &mu) {
            lower = lower.max(self.bound_for(ev, w, &fitted));
        }
        let primal = ev.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
        (primal, lower)
    }

    fn fitted_multipliers(&self, ev: &[PieceEval], w: &[f64], mu: &[f64]) -> Option<Vec<f64>> {
        let mu_max = mu.iter().copied().fold(0.0, f64::max);
        let w_max = w.iter().copied().fold(0.0, f64::max);
        let channels: Vec<usize> = (0..ev.len()).filter(|&k| mu[k] > 1e-6 * mu_max).collect();
        let gens: Vec<usize> = (0..self.n).filter(|&j| w[j] > 1e-6 * w_max).collect();
        // Unknowns (μ_k for active k, c); rows: Σ_k μ_k ∂_j f_k − c = 0 and Σ μ_k = 1.
        let cols = channels.len() + 1;
        let rows = gens.len() + 1;
        let mut m = DMatrix::zeros(rows, cols);
        let mut rhs = DVector::zeros(rows);
        for (r, &j) in gens.iter().enumerate() {
            for (c, &k) in channels.iter().enumerate() {
                m[(r, c)] = ev[k].grad[j];
            }
            m[(r, cols - 1)] = -1.0;
        }
        for c in 0..channels.len() {
            m[(rows - 1, c)] = 1.0;
        }
        rhs[rows - 1] = 1.0;
        let sol = m.svd(true, true).solve(&rhs, 1e-14).ok()?;
        let mut fitted = vec![0.0; ev.len()];
        for (c, &k) in channels.iter().enumerate() {
            fitted[k] = sol[c].max(0.0);
        }
        let total: f64 = fitted.iter().sum();
        (total > 0.0).then(|| fitted.into_iter().map(|x| x / total).collect())
    }

    pub(super) fn solve(&self, tol: f64) -> Result<FilteredValue> {
        let n = self.n;
        let mut w = vec![1.0 / n as f64; n];
        let start = self
            .eval(&w, 0)?
            .ok_or_else(|| Error::NumericalFailure("uniform mixture left the support".into()))?;
        let mut t = start
            .iter()
            .map(|e| e.value)
            .fold(f64::NEG_INFINITY, f64::max)
            + 1.0;
        let mut tau = 1.0;
        let mut steps = 0;
        let mut best = (f64::INFINITY, w.clone());
        let mut lower = f64::NEG_INFINITY;
        loop {
            loop {
                if steps >= MAX_NEWTON_STEPS {
                    return Err(tolerance_error(tol, best.0 - lower, steps));
                }
                let ev = self.eval(&w, 2)?.expect("iterates stay in the domain");
                let dim = n + 1;
                let mut g = DVector::zeros(dim);
                let mut h = DMatrix::zeros(dim, dim);
                g[n] = tau;
                for e in &ev {
                    let s = t - e.value;
                    let hess = e.hess.as_ref().expect("second order requested");
                    for i in 0..n {
                        g[i] += e.grad[i] / s;
                        h[(i, n)] -= e.grad[i] / (s * s);
                        for j in 0..n {
                            h[(i, j)] += hess[(i, j)] / s + e.grad[i] * e.grad[j] / (s * s);
                        }
                    }
                    g[n] -= 1.0 / s;
                    h[(n, n)] += 1.0 / (s * s);
                }
                for i in 0..n {
                    g[i] -= 1.0 / w[i];
                    h[(i, i)] += 1.0 / (w[i] * w[i]);
                    h[(n, i)] = h[(i, n)];
                }
                // Equality-constrained Newton step with Σ Δw = 0.
                let mut kkt = DMatrix::zeros(dim + 1, dim + 1);
                kkt.view_mut((0, 0), (dim, dim)).copy_from(&h);
                let mut rhs = DVector::zeros(dim + 1);
                for i in 0..n {
                    kkt[(i, dim)] = 1.0;
                    kkt[(dim, i)] = 1.0;
                }
                for i in 0..dim {
                    rhs[i] = -g[i];
                }
                let Some(sol) = kkt.lu().solve(&rhs) else {
                    break;
                };
                let dx = sol.rows(0, dim).into_owned();
                let decrement = dx.dot(&(&h * &dx));
                if !(decrement.is_finite()) || decrement / 2.0 <= CENTERING_TOL {
                    break;
                }
                let slope = g.dot(&dx);
                let phi0 = self
                    .barrier(&w, t, tau)?
                    .expect("current iterate is feasible");
                let mut step = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let wn: Vec<f64> = (0..n).map(|i| w[i] + step * dx[i]).collect();
                    let tn = t + step * dx[n];
                    if let Some(phi) = self.barrier(&wn, tn, tau)? {
                        if decrement <= NEWTON_REGION || phi <= phi0 + 0.25 * step * slope {
                            moved = wn != w || tn != t;
                            w = wn;
                            t = tn;
                            break;
                        }
                    }
                    step *= 0.5;
                }
                steps += 1;
                if !moved {
                    break;
                }
            }
            let ev = self.eval(&w, 1)?.expect("iterates stay in the domain");
            let (primal, lb) = self.certificate(&ev, &w, t);
            if primal < best.0 {
                best = (primal, w.clone());
            }
            lower = lower.max(lb);
            if best.0 - lower <= tol {
                break;
            }
            if steps >= MAX_NEWTON_STEPS {
                return Err(tolerance_error(tol, best.0 - lower, steps));
            }
            if tau >= MAX_BARRIER_PARAMETER {
                return Err(tolerance_error(tol, best.0 - lower, steps));
            }
            tau *= BARRIER_GROWTH;
        }
        let (value, weights) = best;
        Ok(FilteredValue {
            value: value.max(0.0),
            lower: lower.max(0.0).min(value.max(0.0)),
            weights,
            newton_steps: steps,
        })
    }
}

/// Inverse and `ln det` of a positive definite matrix, `None` otherwise.
///
/// nalgebra's complex Cholesky takes complex square roots of the pivots and so
/// never rejects an indefinite input; the spectrum is checked directly instead.
fn inverse_logdet(m: CMatrix) -> Option<(CMatrix, f64)> {
    let e = HermitianOperator::from_matrix_unchecked(m).eigh().ok()?;
    let lam = &e.eigenvalues;
    if lam.iter().any(|&x| !(x > 0.0)) {
        return None;
    }
    let u = &e.eigenvectors;
    let scaled = CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] / lam[j]);
    Some((scaled * u.adjoint(), lam.iter().map(|x| x.ln()).sum()))
}

struct DmaxPiece {
    a: CMatrix,
    bs: Vec<CMatrix>,
}

pub(super) struct DmaxProblem {
    pieces: Vec<DmaxPiece>,
    n: usize,
}

impl DmaxProblem {
    pub(super) fn new(rho: &DensityMatrix, f: &FreeSet, l: &ChannelSet) -> Result<Option<Self>> {
        Ok(channel_pieces(rho, f, l)?.map(|pieces| Self {
            pieces: pieces
                .into_iter()
                .map(|(_, a, bs)| DmaxPiece { a, bs })
                .collect(),
            n: f.generators().len(),
        }))
    }

    /// Inverse slacks `(Σ v_j B_j − A)^{-1}` and `Σ ln det` of the slacks; `None` if any slack is not PD.
    fn slacks(&self, v: &[f64]) -> Option<(Vec<CMatrix>, f64)> {
        let mut invs = Vec::with_capacity(self.pieces.len());
        let mut logdet = 0.0;
        for p in &self.pieces {
            let s = weighted_sum(&p.bs, v) - &p.a;
            let (inv, ld) = inverse_logdet(s)?;
            logdet += ld;
            invs.push(inv);
        }
        Some((invs, logdet))
    }

    /// Dual bound from the slack eigenvectors that carry dual weight, with weights re-fitted to
    /// complementary slackness `Σ_k Tr(Z_k B_kj) = 1` on the generators in use.
    ///
    /// `S^{-1}/τ` alone loses accuracy once the small slack eigenvalues reach rounding level;
    /// the eigenvectors stay accurate, so only the weights are recomputed. Any PSD `Z` gives a
    /// valid bound, so the result is certified regardless of the fit quality.
    fn polished_lower(&self, v: &[f64], tau: f64) -> Result<Option<f64>> {
        const ACTIVE_WEIGHT: f64 = 1e-3;
        let n = self.n;
        let vmax = v.iter().copied().fold(0.0, f64::max);
        let used: Vec<usize> = (0..n).filter(|&j| v[j] > 1e-6 * vmax).collect();
        // (a = u†Au, b_j = u†B_j u) for each retained eigenvector.
        let mut columns: Vec<(f64, Vec<f64>)> = Vec::new();
        for p in &self.pieces {
            let s = weighted_sum(&p.bs, v) - &p.a;
            let e = HermitianOperator::from_matrix_unchecked(s).eigh()?;
            let lam_min = e.eigenvalues.last().copied().unwrap_or(0.0);
            if !(lam_min > 0.0) {
                return Ok(None);
            }
            for (i, &lam) in e.eigenvalues.iter().enumerate() {
                if tau * lam * ACTIVE_WEIGHT > 1.0 && lam > lam_min * 1e3 {
                    continue;
                }
                let u = e.eigenvectors.columns(i, 1).into_owned();
                let quad = |m: &CMatrix| (u.adjoint() * m * &u)[(0, 0)].re;
                columns.push((quad(&p.a), p.bs.iter().map(quad).collect()));
            }
        }
        if columns.is_empty() || used.is_empty() {
            return Ok(None);
        }
        let m = DMatrix::from_fn(used.len(), columns.len(), |r, c| columns[c].1[used[r]]);
        let rhs = DVector::from_element(used.len(), 1.0);
        let Ok(c) = m.svd(true, true).solve(&rhs, 1e-14) else {
            return Ok(None);
        };
        let mut num = 0.0;
        let mut per_generator = vec![0.0; n];
        for (idx, (a, bs)) in columns.iter().enumerate() {
            let w = c[idx].max(0.0);
            num += w * a;
            for j in 0..n {
                per_generator[j] += w * bs[j];
            }
        }
        let scale = per_generator.into_iter().fold(0.0, f64::max);
        Ok((scale > 0.0 && num > 0.0).then(|| num / scale))
    }

    fn barrier(&self, v: &[f64], tau: f64) -> Option<f64> {
        if v.iter().any(|&x| !(x > 0.0)) {
            return None;
        }
        let (_, logdet) = self.slacks(v)?;
        Some(tau * v.iter().sum::<f64>() - logdet - v.iter().map(|x| x.ln()).sum::<f64>())
    }

    pub(super) fn solve(&self, tol: f64) -> Result<FilteredValue> {
        let n = self.n;
        let mut m0: f64 = 1.0;
        for p in &self.pieces {
            let sum = weighted_sum(&p.bs, &vec![1.0; n]);
            let pen = pencil(&p.a, &sum)?.ok_or_else(|| {
                Error::NumericalFailure("compressed pencil lost its support".into())
            })?;
            m0 = m0.max(pen.values[0]);
        }
        let mut v = vec![2.0 * m0; n];
        let mut tau = 1.0;
        let mut steps = 0;
        let mut best = (f64::INFINITY, v.clone());
        let mut lower: f64 = 0.0;
        let gap = |best: f64, lower: f64| best.log2() - lower.log2();
        loop {
            loop {
                if steps >= MAX_NEWTON_STEPS {
                    return Err(tolerance_error(tol, gap(best.0, lower), steps));
                }
                let (invs, _) = self.slacks(&v).expect("iterates stay strictly feasible");
                let mut g = DVector::from_element(n, tau);
                let mut h = DMatrix::zeros(n, n);
                for (p, sinv) in self.pieces.iter().zip(&invs) {
                    let ms: Vec<CMatrix> = p.bs.iter().map(|b| sinv * b).collect();
                    for i in 0..n {
                        g[i] -= trace_re(&ms[i]);
                        for j in i..n {
                            let x = trace_product_re(&ms[i], &ms[j]);
                            h[(i, j)] += x;
                            if i != j {
                                h[(j, i)] += x;
                            }
                        }
                    }
                }
                for i in 0..n {
                    g[i] -= 1.0 / v[i];
                    h[(i, i)] += 1.0 / (v[i] * v[i]);
                }
                let Some(dx) = h.clone().cholesky().map(|c| c.solve(&(-&g))) else {
                    break;
                };
                let decrement = -g.dot(&dx);
                if !(decrement.is_finite()) || decrement / 2.0 <= CENTERING_TOL {
                    break;
                }
                let psi0 = self.barrier(&v, tau).expect("current iterate is feasible");
                let mut step = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let vn: Vec<f64> = (0..n).map(|i| v[i] + step * dx[i]).collect();
                    if let Some(psi) = self.barrier(&vn, tau) {
                        if decrement <= NEWTON_REGION || psi <= psi0 - 0.25 * step * decrement {
                            moved = vn != v;
                            v = vn;
                            break;
                        }
                    }
                    step *= 0.5;
                }
                steps += 1;
                if !moved {
                    break;
                }
            }
            let (invs, _) = self.slacks(&v).expect("iterates stay strictly feasible");
            let mut dual_obj = 0.0;
            let mut scale: f64 = 0.0;
            let mut per_generator = vec![0.0; n];
            for (p, sinv) in self.pieces.iter().zip(&invs) {
                dual_obj += trace_product_re(sinv, &p.a);
                for (j, b) in p.bs.iter().enumerate() {
                    per_generator[j] += trace_product_re(sinv, b);
                }
            }
            for x in per_generator {
                scale = scale.max(x);
            }
            let primal: f64 = v.iter().sum();
            if primal < best.0 {
                best = (primal, v.clone());
            }
            if scale > 0.0 {
                lower = lower.max(dual_obj / scale);
            }
            if let Some(polished) = self.polished_lower(&v, tau)? {
                lower = lower.max(polished);
            }
            if gap(best.0, lower) <= tol {
                break;
            }
            if steps >= MAX_NEWTON_STEPS || tau >= MAX_BARRIER_PARAMETER {
                return Err(tolerance_error(tol, gap(best.0, lower), steps));
            }
            tau *= BARRIER_GROWTH;
        }
        let (m, v) = best;
        let value = m.log2().max(0.0);
        let weights = v.iter().map(|x| x / m).collect();
        Ok(FilteredValue {
            value,
            lower: lower.log2().max(0.0).min(value),
            weights,
            newton_steps: steps,
        })
    }
}

fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    crate::operator::trace_product(a, b)
}

/// Frobenius distance from `target` to `conv(points)`, exact by enumerating supports.
pub(super) fn hull_distance(points: &[DensityMatrix], target: &DensityMatrix) -> Result<f64> {
    const MAX_POINTS: usize = 16;
    let n = points.len();
    if n > MAX_POINTS {
        return Err(Error::InvalidDimension(format!(
            "hull membership supports at most {MAX_POINTS} generators, found {n}"
        )));
    }
    let diffs: Vec<CMatrix> = points
        .iter()
        .map(|p| p.matrix() - target.matrix())
        .collect();
    let gram = DMatrix::from_fn(n, n, |i, j| trace_product_re(&diffs[i], &diffs[j]));
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let k = support.len();
        let mut kkt = DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                kkt[(a, b)] = gram[(i, j)];
            }
            kkt[(a, k)] = 1.0;
            kkt[(k, a)] = 1.0;
        }
        rhs[k] = 1.0;
        let Ok(sol) = kkt.svd(true, true).solve(&rhs, 1e-14) else {
            continue;
        };
        if (0..k).any(|a| !(sol[a] >= -1e-12)) {
            continue;
        }
        let total: f64 = (0..k).map(|a| sol[a].max(0.0)).sum();
        let mut residual = CMatrix::zeros(target.dim(), target.dim());
        for (a, &i) in support.iter().enumerate() {
            residual += &diffs[i] * Complex64::new(sol[a].max(0.0) / total, 0.0);
        }
        best = best.min(residual.norm());
    }
    Ok(best)
}
