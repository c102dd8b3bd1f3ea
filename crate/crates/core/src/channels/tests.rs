use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::divergences::{binary_entropy, vn_entropy};
use crate::lab::{ginibre_state, haar_pure, random_channel, sample_rng};
use crate::operator::{
    max_entangled, BipartiteDensityMatrix, CMatrix, DensityMatrix, HermitianOperator,
};

fn h(p: f64) -> f64 {
    binary_entropy(p).unwrap()
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// `din · Tr_in[(I ⊗ ρ^T) J]` with the output factor first.
fn choi_contraction(ch: &QuantumChannel, rho: &DensityMatrix) -> CMatrix {
    let (din, dout) = (ch.din(), ch.dout());
    let j = ch.choi().matrix();
    let rho = rho.matrix();
    CMatrix::from_fn(dout, dout, |b, c| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..din {
            for e in 0..din {
                // (I ⊗ ρ^T)_{(b,a),(b,e)} = ρ_{e,a}
                acc += rho[(e, a)] * j[(b * din + e, c * din + a)];
            }
        }
        acc * din as f64
    })
}

/// PSD-feasibility bisection for `min{λ : λ J2 − J1 ⪰ 0}`.
fn bisection_dmax(j1: &CMatrix, j2: &CMatrix) -> f64 {
    let feasible = |lam: f64| {
        let m = j2 * Complex64::new(lam, 0.0) - j1;
        let v = HermitianOperator::from_matrix_unchecked(m)
            .eigenvalues()
            .unwrap();
        *v.last().unwrap() >= -1e-13
    };
    let (mut lo, mut hi) = (1.0, 2.0);
    while !feasible(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.log2()
}

/// Coherent information of amplitude damping on diagonal inputs, maximised by a fine scan.
fn ad_coherent_info_scan(gamma: f64) -> f64 {
    let f = |p: f64| h((1.0 - gamma) * p) - h(gamma * p);
    let n = 200_000;
    (0..=n)
        .map(|i| f(i as f64 / n as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn identity_and_depolarizing_application() {
    let rho = ginibre_state(3, 2, &mut sample_rng(5, 0)).unwrap();
    let id = QuantumChannel::identity(3).unwrap();
    assert!(max_entry(&(id.apply(&rho).unwrap().matrix() - rho.matrix())) < 1e-15);
    let dep = QuantumChannel::completely_depolarizing(3, 2).unwrap();
    let out = dep.apply(&rho).unwrap();
    assert!(
        max_entry(&(out.matrix() - DensityMatrix::maximally_mixed(2).unwrap().matrix())) < 1e-14
    );
    assert!(id
        .apply(&DensityMatrix::maximally_mixed(2).unwrap())
        .is_err());
}

#[test]
fn rejects_non_trace_preserving() {
    let k = CMatrix::identity(2, 2) * Complex64::new(0.9, 0.0);
    assert!(matches!(
        QuantumChannel::new(2, 2, vec![k]),
        Err(crate::Error::NotTracePreserving { .. })
    ));
    assert!(QuantumChannel::new(2, 2, vec![]).is_err());
    assert!(QuantumChannel::new(2, 3, vec![CMatrix::identity(2, 2)]).is_err());
}

#[test]
fn apply_matches_choi_contraction() {
    for i in 0..20 {
        let mut rng = sample_rng(11, i);
        let ch = random_channel(3, 2, 2 + (i as usize % 3), &mut rng).unwrap();
        let rho = ginibre_state(3, 3, &mut rng).unwrap();
        let direct = ch.apply(&rho).unwrap();
        assert!(max_entry(&(direct.matrix() - choi_contraction(&ch, &rho))) < 1e-12);
        assert!((direct.op().trace() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn extended_application_on_max_entangled_gives_choi() {
    for i in 0..10 {
        let ch = random_channel(2, 3, 2, &mut sample_rng(12, i)).unwrap();
        let phi =
            BipartiteDensityMatrix::new(max_entangled(2).unwrap().into_state(), 2, 2).unwrap();
        let out = ch.apply_extended(&phi).unwrap();
        assert_eq!(out.dims(), (3, 2));
        assert!(max_entry(&(out.state().matrix() - ch.choi().matrix())) < 1e-10);
    }
}

#[test]
fn kraus_choi_round_trip() {
    for i in 0..10 {
        let ch = random_channel(2, 2, 3, &mut sample_rng(13, i)).unwrap();
        let back = QuantumChannel::from_choi(2, 2, ch.choi()).unwrap();
        assert!(back.kraus().len() <= 4);
        assert!(max_entry(&(back.choi().matrix() - ch.choi().matrix())) < 1e-9);
    }
}

#[test]
fn composition_matches_sequential_application() {
    let mut rng = sample_rng(14, 0);
    let a = random_channel(2, 3, 3, &mut rng).unwrap();
    let b = random_channel(3, 2, 4, &mut rng).unwrap();
    let ab = a.then(&b).unwrap();
    assert!(ab.kraus().len() <= 4);
    let rho = ginibre_state(2, 2, &mut rng).unwrap();
    let seq = b.apply(&a.apply(&rho).unwrap()).unwrap();
    assert!(max_entry(&(ab.apply(&rho).unwrap().matrix() - seq.matrix())) < 1e-12);
    assert!(a.then(&a).is_err());
}

#[test]
fn complementary_of_identity_is_trivial() {
    let c = QuantumChannel::identity(3)
        .unwrap()
        .complementary()
        .unwrap();
    assert_eq!((c.din(), c.dout()), (3, 1));
    let rho = ginibre_state(3, 3, &mut sample_rng(15, 0)).unwrap();
    assert!(vn_entropy(&c.apply(&rho).unwrap()).unwrap().abs() < 1e-15);
}

#[test]
fn complementary_of_amplitude_damping() {
    for gamma in [0.1, 0.25, 0.7] {
        let n = QuantumChannel::amplitude_damping(gamma).unwrap();
        let nc = n.complementary().unwrap();
        let other = QuantumChannel::amplitude_damping(1.0 - gamma).unwrap();
        for i in 0..5 {
            let rho = ginibre_state(2, 2, &mut sample_rng(16, i)).unwrap();
            let s = vn_entropy(&nc.apply(&rho).unwrap()).unwrap();
            // The excited population of the environment is γ ρ11.
            let p = gamma * rho.matrix()[(1, 1)].re;
            let out = nc.apply(&rho).unwrap();
            assert!((out.matrix()[(1, 1)].re - p).abs() < 1e-14);
            assert!((s - vn_entropy(&other.apply(&rho).unwrap()).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn complementary_drops_negligible_kraus() {
    let mut k = vec![CMatrix::identity(2, 2)];
    k.push(CMatrix::zeros(2, 2));
    let ch = QuantumChannel::new(2, 2, k).unwrap();
    assert_eq!(ch.environment_dim(), 1);
    assert_eq!(ch.complementary().unwrap().dout(), 1);
}

#[test]
fn pure_input_entropy_duality() {
    for i in 0..1000 {
        let mut rng = sample_rng(17, i);
        let din = 2 + (i as usize % 2);
        let ch = random_channel(din, 2 + (i as usize % 3), 1 + (i as usize % 4), &mut rng).unwrap();
        let psi = haar_pure(din, &mut rng).unwrap();
        let a = vn_entropy(&ch.apply(&psi).unwrap()).unwrap();
        let b = vn_entropy(&ch.complementary().unwrap().apply(&psi).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-8, "sample {i}: {a} vs {b}");
    }
}

#[test]
fn stabilised_dmax_examples() {
    let mut rng = sample_rng(18, 0);
    let l1 = random_channel(2, 3, 2, &mut rng).unwrap();
    assert!(channel_dmax_stabilised(&l1, &l1).unwrap().value.abs() < 1e-9);
    let dep = QuantumChannel::completely_depolarizing(2, 3).unwrap();
    let v = channel_dmax_stabilised(&l1, &dep).unwrap().value;
    let expect = (6.0 * l1.choi().lambda_max().unwrap()).log2();
    assert!((v - expect).abs() < 1e-10);
    let id = QuantumChannel::identity(2).unwrap();
    let ad = QuantumChannel::amplitude_damping(0.3).unwrap();
    assert!(!channel_dmax_stabilised(&id, &ad).unwrap().is_finite());
    assert!(channel_dmax_stabilised(&id, &dep).is_err());
}

#[test]
fn stabilised_dmax_matches_bisection() {
    for i in 0..30 {
        let mut rng = sample_rng(19, i);
        let l1 = random_channel(2, 2, 2, &mut rng).unwrap();
        let l2 = random_channel(2, 2, 4, &mut rng).unwrap();
        let v = channel_dmax_stabilised(&l1, &l2).unwrap().value;
        let oracle = bisection_dmax(l1.choi().matrix(), l2.choi().matrix());
        assert!((v - oracle).abs() < 1e-8, "pair {i}: {v} vs {oracle}");
    }
}

#[test]
fn unstabilised_dmax_examples() {
    let mut rng = sample_rng(20, 0);
    let l1 = random_channel(2, 2, 3, &mut rng).unwrap();
    assert!(channel_dmax_unstabilised(&l1, &l1, 5, 1).unwrap().abs() < 1e-9);
    let l2 = random_channel(2, 2, 4, &mut rng).unwrap();
    let un = channel_dmax_unstabilised(&l1, &l2, 20, 2).unwrap();
    let st = channel_dmax_stabilised(&l1, &l2).unwrap().value;
    assert!(un <= st + 1e-8 && un >= 0.0);
}

#[test]
fn unstabilised_dmax_of_classical_channels() {
    let p1 = vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.1, 0.8]];
    let p2 = vec![vec![0.3, 0.3, 0.4], vec![0.5, 0.25, 0.25]];
    let l1 = QuantumChannel::classical(&p1).unwrap();
    let l2 = QuantumChannel::classical(&p2).unwrap();
    // Basis inputs give diagonal outputs; the ratio maximum is the exhaustive answer.
    let mut oracle = f64::NEG_INFINITY;
    for a in 0..2 {
        for b in 0..3 {
            oracle = oracle.max((p1[a][b] / p2[a][b]).log2());
        }
    }
    let un = channel_dmax_unstabilised(&l1, &l2, 10, 3).unwrap();
    assert!((un - oracle).abs() < 1e-8, "{un} vs {oracle}");
}

#[test]
fn diamond_bracket_examples() {
    let id = QuantumChannel::identity(2).unwrap();
    let b = diamond_bracket(&id, &id).unwrap();
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
    let dep = QuantumChannel::completely_depolarizing(2, 2).unwrap();
    let b = diamond_bracket(&id, &dep).unwrap();
    assert!((b.lower - 1.5).abs() < 1e-12 && (b.upper - 3.0).abs() < 1e-12);
}

#[test]
fn u_theta_with_identity_is_zero() {
    let n = random_channel(2, 2, 2, &mut sample_rng(21, 0)).unwrap();
    let r = u_theta(&n, &QuantumChannel::identity(2).unwrap(), 1e-8).unwrap();
    assert!(r.value.abs() < 1e-12 && r.converged);
}

#[test]
fn u_theta_of_constant_channel() {
    let n = QuantumChannel::completely_depolarizing(2, 3).unwrap();
    let theta = random_channel(3, 2, 3, &mut sample_rng(22, 0)).unwrap();
    let r = u_theta(&n, &theta, 1e-8).unwrap();
    let mixed = DensityMatrix::maximally_mixed(3).unwrap();
    let expect = 3f64.log2() - vn_entropy(&theta.apply(&mixed).unwrap()).unwrap();
    assert!((r.value - expect).abs() < 1e-10);
}

#[test]
fn u_theta_iterates_are_monotone() {
    let mut rng = sample_rng(23, 0);
    let n = random_channel(2, 3, 2, &mut rng).unwrap();
    let theta = random_channel(3, 2, 2, &mut rng).unwrap();
    let r = u_theta(&n, &theta, 1e-6).unwrap();
    for w in r.history.windows(2) {
        assert!(w[1] >= w[0] - 1e-10);
    }
}

#[test]
fn coherent_info_examples() {
    let opts = AscentOptions {
        tol: 1e-8,
        restarts: 2,
        seed: 0,
    };
    let id = QuantumChannel::identity(2).unwrap();
    assert!((coherent_info_lower(&id, &opts).unwrap().value - 1.0).abs() < 1e-6);
    let dep = QuantumChannel::completely_depolarizing(2, 2).unwrap();
    assert!(coherent_info_lower(&dep, &opts).unwrap().value <= 1e-12);
    let ad = QuantumChannel::amplitude_damping(0.25).unwrap();
    let v = coherent_info_lower(&ad, &opts).unwrap().value;
    assert!((v - ad_coherent_info_scan(0.25)).abs() < 1e-4);
}

fn degrading_map(gamma: f64) -> QuantumChannel {
    QuantumChannel::amplitude_damping((1.0 - 2.0 * gamma) / (1.0 - gamma)).unwrap()
}

#[test]
fn exact_degrading_map_collapses_the_bracket() {
    for gamma in [0.25, 0.3] {
        let n = QuantumChannel::amplitude_damping(gamma).unwrap();
        let opts = AscentOptions {
            tol: 1e-7,
            restarts: 2,
            seed: 0,
        };
        let r = degradability_bounds(&n, &degrading_map(gamma), None, &opts).unwrap();
        assert!(r.eps_upper <= 1e-8 && r.eps_lower <= r.eps_upper);
        assert!((r.u_theta - r.ic_lower).abs() < 2e-5);
        assert!((r.ic_lower - ad_coherent_info_scan(gamma)).abs() < 1e-4);
        for b in [
            &r.q_upper_utheta,
            &r.q_upper_ic,
            &r.q_upper_utheta_refined,
            &r.q_upper_ic_refined,
        ] {
            assert!(b.applicable);
            assert!(b.value >= r.ic_lower - 1e-6);
            assert!((b.value - r.ic_lower).abs() < 1e-4);
        }
    }
}

#[test]
fn mismatched_degrading_map_gives_finite_bracket() {
    let n = QuantumChannel::amplitude_damping(0.45).unwrap();
    let opts = AscentOptions::default();
    let r = degradability_bounds(&n, &degrading_map(0.3), None, &opts).unwrap();
    assert!(r.eps_lower > 0.0 && r.eps_lower <= r.eps_upper && r.eps_upper <= 1.0);
    for b in [
        &r.q_upper_utheta,
        &r.q_upper_ic,
        &r.q_upper_utheta_refined,
        &r.q_upper_ic_refined,
    ] {
        if b.applicable {
            assert!(b.value >= r.ic_lower - 1e-6);
        } else {
            assert!(b.value.is_nan() && b.reason.is_some());
        }
    }
    let low = degradability_bounds(&n, &degrading_map(0.3), Some(0.0), &opts).unwrap();
    assert!(!low.q_upper_utheta.applicable);
}

#[test]
fn degrading_map_must_target_environment() {
    let n = QuantumChannel::amplitude_damping(0.2).unwrap();
    let theta = QuantumChannel::completely_depolarizing(2, 3).unwrap();
    assert!(matches!(
        degradability_bounds(&n, &theta, None, &AscentOptions::default()),
        Err(crate::Error::DimensionMismatch { .. })
    ));
}

#[test]
fn channel_record_round_trip() {
    let ch = random_channel(2, 3, 2, &mut sample_rng(24, 0)).unwrap();
    let text = ChannelRecord::from_channel(&ch).to_json();
    let back = ChannelRecord::parse(&text).unwrap().to_channel().unwrap();
    assert_eq!(back, ch);
    let err = ChannelRecord::parse("{\"din\": 2, \"dout\": 2, \"kraus\": [[[1,0]]]}").unwrap_err();
    assert!(matches!(err, crate::Error::Parse(_)));
    let err = ChannelRecord::parse("{\"din\": 1, \"dout\": 1, \"kraus\": [[[[1,0]]]]}")
        .unwrap()
        .to_channel();
    assert!(err.is_ok());
    let err = ChannelRecord::parse("{\"din\": 1, \"dout\": 1, \"kraus\": [[[[1,0],[0,0]]]]}")
        .unwrap()
        .to_channel();
    assert!(matches!(err, Err(crate::Error::Parse(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_channels_are_trace_preserving(seed in any::<u64>(), din in 1usize..4, dout in 1usize..4, k in 1usize..4) {
        prop_assume!(dout * k >= din);
        let ch = random_channel(din, dout, k, &mut sample_rng(seed, 0)).unwrap();
        prop_assert!(ch.trace_preservation_residual() <= 1e-9);
        prop_assert!((ch.choi().op().trace() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unstabilised_never_exceeds_stabilised(seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 0);
        let l1 = random_channel(2, 2, 2, &mut rng).unwrap();
        let l2 = random_channel(2, 2, 3, &mut rng).unwrap();
        let un = channel_dmax_unstabilised(&l1, &l2, 4, seed).unwrap();
        let st = channel_dmax_stabilised(&l1, &l2).unwrap().value;
        prop_assert!(un <= st + 1e-8);
    }

    #[test]
    fn data_processing_at_trace_distance(seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 0);
        let ch = random_channel(3, 2, 3, &mut rng).unwrap();
        let rho = ginibre_state(3, 2, &mut rng).unwrap();
        let sigma = ginibre_state(3, 3, &mut rng).unwrap();
        let before = crate::divergences::trace_distance(&rho, &sigma).unwrap();
        let after = crate::divergences::trace_distance(&ch.apply(&rho).unwrap(), &ch.apply(&sigma).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn diamond_bracket_is_ordered(seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 0);
        let l1 = random_channel(3, 2, 2, &mut rng).unwrap();
        let l2 = random_channel(3, 2, 3, &mut rng).unwrap();
        let b = diamond_bracket(&l1, &l2).unwrap();
        prop_assert!(b.lower <= b.upper);
    }
}
