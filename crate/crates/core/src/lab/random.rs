//! Seeded generators for random states and channels.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::QuantumChannel;
use crate::divergences::trace_distance;
use crate::error::{range_err, Error, Result};
use crate::operator::{
    max_entangled, BipartiteDensityMatrix, CMatrix, DensityMatrix, HermitianOperator,
};
use crate::tolerances::MAX_OPERATOR_DIM;

/// Largest `B`-marginal trace distance accepted from the local-channel construction.
pub const MARGINAL_RESIDUAL: f64 = 1e-10;

/// Generator used for every sample.
pub type SampleRng = ChaCha8Rng;

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sample `index` under `master_seed`, independent of evaluation order.
pub fn sample_seed(master_seed: u64, index: u64) -> u64 {
    mix64(mix64(master_seed) ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn sample_rng(master_seed: u64, index: u64) -> SampleRng {
    SampleRng::seed_from_u64(sample_seed(master_seed, index))
}

pub(crate) fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random pure state.
pub fn haar_pure(d: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    check_dim(d)?;
    let v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    DensityMatrix::pure(&v)
}

/// `G G† / Tr(G G†)` with `G` a `d × rank` complex Gaussian matrix.
pub fn ginibre_state(d: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    check_dim(d)?;
    if rank == 0 || rank > d {
        return Err(range_err(format!("rank {rank} outside 1..={d}")));
    }
    let g = gaussian_matrix(d, rank, rng);
    let m = &g * g.adjoint();
    Ok(DensityMatrix::from_op_unchecked(
        HermitianOperator::from_matrix_unchecked(m),
    ))
}

/// Haar-random `rows × cols` isometry (`rows ≥ cols`) via phase-fixed QR.
pub(crate) fn haar_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian_matrix(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let n = d.norm();
        if n > 0.0 {
            let phase = d / n;
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Channel whose Stinespring isometry `din → dout·kraus_count` is Haar random.
pub fn random_channel(
    din: usize,
    dout: usize,
    kraus_count: usize,
    rng: &mut impl Rng,
) -> Result<QuantumChannel> {
    check_dim(din)?;
    check_dim(dout)?;
    if kraus_count == 0 {
        return Err(range_err("kraus_count must be at least 1"));
    }
    let rows = dout * kraus_count;
    if rows < din {
        return Err(range_err(format!(
            "dout * kraus_count = {rows} is smaller than din = {din}, no isometry exists"
        )));
    }
    let v = haar_isometry(rows, din, rng);
    let kraus = (0..kraus_count)
        .map(|k| v.rows(k * dout, dout).into_owned())
        .collect();
    QuantumChannel::new(din, dout, kraus)
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_OPERATOR_DIM {
        return Err(range_err(format!(
            "dimension {d} outside 1..={MAX_OPERATOR_DIM}"
        )));
    }
    Ok(())
}

/// `(ρ, (Φ_A ⊗ id_B)(ρ))` for a given channel `Φ` on `A`; the `B` marginals agree exactly.
pub fn equal_marginal_pair_with(
    rho: &BipartiteDensityMatrix,
    phi: &QuantumChannel,
) -> Result<(BipartiteDensityMatrix, BipartiteDensityMatrix)> {
    let sigma = phi.apply_extended(rho)?;
    let residual = trace_distance(&rho.marginal_b(), &sigma.marginal_b())?;
    if residual > MARGINAL_RESIDUAL {
        return Err(Error::NumericalFailure(format!(
            "local channel moved the B marginal by {residual:e}"
        )));
    }
    Ok((rho.clone(), sigma))
}

/// Full-rank Ginibre `ρ_AB` and its image under a random channel acting on `A` alone.
pub fn random_equal_marginal_pair(
    da: usize,
    db: usize,
    rng: &mut impl Rng,
) -> Result<(BipartiteDensityMatrix, BipartiteDensityMatrix)> {
    if da < 2 || db < 2 {
        return Err(range_err(format!(
            "equal-marginal pairs need dA, dB >= 2, got {da}x{db}"
        )));
    }
    let n = da * db;
    let rho = BipartiteDensityMatrix::new(ginibre_state(n, n, rng)?, da, db)?;
    let kraus = rng.random_range(1..=da);
    let phi = random_channel(da, da, kraus, rng)?;
    equal_marginal_pair_with(&rho, &phi)
}

/// `(1−δ) Φ + δ G` with `Φ` maximally entangled on `d ⊗ d`, `G` a Ginibre state and `δ ∈ [0, spread]`.
pub fn entangled_state(
    d: usize,
    spread: f64,
    rng: &mut impl Rng,
) -> Result<BipartiteDensityMatrix> {
    if !(0.0..=1.0).contains(&spread) {
        return Err(range_err(format!("spread {spread} outside [0,1]")));
    }
    let delta = spread * rng.random::<f64>();
    let g = ginibre_state(d * d, d * d, rng)?;
    let state = max_entangled(d)?.state().mix(&g, 1.0 - delta)?;
    BipartiteDensityMatrix::new(state, d, d)
}
