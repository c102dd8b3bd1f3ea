use super::*;
use crate::divergences::{d_max, hockey_stick, trace_distance};
use crate::lab::{ginibre_state, sample_rng};

fn diag(p: &[f64]) -> DensityMatrix {
    DensityMatrix::diagonal(p).unwrap()
}

fn random_state(d: usize, seed: u64, index: u64) -> DensityMatrix {
    ginibre_state(d, d, &mut sample_rng(seed, index)).unwrap()
}

#[test]
fn identical_states_have_empty_domain() {
    let rho = random_state(3, 1, 0);
    let r = integral_rel_entropy(&rho, &rho, 1e-8).unwrap();
    assert!(r.value.abs() < 1e-9);
    assert!(r.evaluations <= 2 * quadrature::PANEL_EVALS);
}

#[test]
fn qubit_pair_gives_one_bit() {
    let r = integral_rel_entropy(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5]), 1e-10).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9);
    assert!((r.truncation_gamma - 2.0).abs() < 1e-12);
    assert!(r.tail_truncation_gamma.is_infinite());
}

#[test]
fn random_pairs_match_spectral_formula() {
    for i in 0..30 {
        let d = 2 + (i % 3) as usize;
        let rho = random_state(d, 77, 2 * i);
        let sigma = random_state(d, 77, 2 * i + 1);
        let r = integral_rel_entropy(&rho, &sigma, 1e-8).unwrap();
        let spectral = rel_entropy(&rho, &sigma).unwrap().value;
        assert!(
            (r.value - spectral).abs() <= 1e-6,
            "{} vs {spectral}",
            r.value
        );
        assert!(r.estimated_error <= 1e-8);
    }
}

#[test]
fn rank_deficient_rho_is_supported() {
    let rho = ginibre_state(3, 1, &mut sample_rng(5, 0)).unwrap();
    let sigma = random_state(3, 5, 1);
    let r = integral_rel_entropy(&rho, &sigma, 1e-9).unwrap();
    assert!((r.value - rel_entropy(&rho, &sigma).unwrap().value).abs() < 1e-7);
}

#[test]
fn support_violation_is_reported() {
    let err = integral_rel_entropy(&diag(&[0.5, 0.5]), &diag(&[1.0, 0.0]), 1e-8).unwrap_err();
    assert!(matches!(err, Error::SupportViolation(_)));
    assert!(integral_rel_entropy(&diag(&[0.5, 0.5]), &diag(&[0.5, 0.5]), 0.0).is_err());
}

#[test]
fn integrand_vanishes_beyond_truncation() {
    for i in 0..10 {
        let rho = random_state(3, 13, 2 * i);
        let sigma = random_state(3, 13, 2 * i + 1);
        let r = integral_rel_entropy(&rho, &sigma, 1e-8).unwrap();
        assert!((r.truncation_gamma.log2() - d_max(&rho, &sigma).unwrap().value).abs() < 1e-9);
        for k in 1..=10 {
            let g = r.truncation_gamma * (1.0 + 0.1 * k as f64);
            assert!(hockey_stick(&rho, &sigma, g).unwrap() / g <= 1e-12);
            let g = r.tail_truncation_gamma * (1.0 + 0.1 * k as f64);
            assert!(hockey_stick(&sigma, &rho, g).unwrap() / (g * g) <= 1e-12);
        }
    }
}

#[test]
fn error_estimate_does_not_grow_with_budget() {
    let rho = random_state(4, 17, 0);
    let sigma = random_state(4, 17, 1);
    let mut last = f64::INFINITY;
    for budget in [100, 200, 400, 800, 1600, 3200, 6400] {
        let achieved = match integral_rel_entropy_with_budget(&rho, &sigma, 1e-14, budget) {
            Ok(r) => r.estimated_error,
            Err(Error::ToleranceNotReached { achieved, work, .. }) => {
                assert!(work <= budget);
                achieved
            }
            Err(e) => panic!("{e}"),
        };
        assert!(achieved <= last, "{achieved} > {last} at budget {budget}");
        last = achieved;
    }
}

fn saturating_triple(m: f64, eps: f64) -> (DensityMatrix, DensityMatrix, DensityMatrix) {
    (
        diag(&[1.0, 0.0]),
        diag(&[1.0 - eps, eps]),
        diag(&[1.0 / m, 1.0 - 1.0 / m]),
    )
}

#[test]
fn region_split_is_tight_on_saturating_triple() {
    for m in [1.5, 2.0, 4.0, 8.0] {
        for eps in [0.0, 0.1, 0.25, 0.5 * (1.0 - 1.0 / m)] {
            let (rho, sigma, omega) = saturating_triple(m, eps);
            let s = region_split_diagnostic(&rho, &sigma, &omega, eps, m).unwrap();
            assert!(s.all_hold());
            for r in &s.regions {
                assert!(
                    (r.integral - r.majorant_integral).abs() <= 1e-7,
                    "M={m} eps={eps} {r:?}"
                );
            }
            let expect = crate::divergences::eps_log2(eps, m - 1.0) + crate::divergences::h2(eps);
            assert!((s.bound - expect).abs() < 1e-12);
            assert!((s.lhs - expect).abs() < 1e-9);
        }
    }
}

#[test]
fn region_split_vanishes_for_equal_states() {
    let rho = random_state(3, 3, 0);
    let omega = random_state(3, 3, 1);
    let m = d_max(&rho, &omega).unwrap().value.exp2();
    let s = region_split_diagnostic(&rho, &rho, &omega, 0.0, m).unwrap();
    for r in &s.regions {
        assert!(r.integral.abs() < 1e-12);
    }
}

#[test]
fn region_split_majorants_hold_on_random_triples() {
    let mut nodes = 0;
    for i in 0..10 {
        let rho = random_state(3, 23, 3 * i);
        let sigma = random_state(3, 23, 3 * i + 1);
        let omega = random_state(3, 23, 3 * i + 2);
        let eps = trace_distance(&rho, &sigma).unwrap();
        let m = d_max(&rho, &omega).unwrap().value.exp2();
        if eps >= 1.0 - 1.0 / m {
            continue;
        }
        let s = region_split_diagnostic(&rho, &sigma, &omega, eps, m).unwrap();
        assert!(s.all_hold(), "{s:?}");
        let total: f64 = s.regions.iter().map(|r| r.integral).sum();
        assert!((total - s.lhs).abs() < 1e-7);
        assert!(s.lhs <= s.bound + 1e-9);
        nodes += s.regions.iter().map(|r| r.nodes).sum::<usize>();
    }
    assert!(nodes >= 1000);
}

#[test]
fn region_split_checks_preconditions() {
    let (rho, sigma, omega) = saturating_triple(2.0, 0.3);
    assert!(matches!(
        region_split_diagnostic(&rho, &sigma, &omega, 0.1, 2.0),
        Err(Error::PreconditionViolated(_))
    ));
    assert!(matches!(
        region_split_diagnostic(&rho, &sigma, &omega, 0.3, 1.5),
        Err(Error::PreconditionViolated(_))
    ));
}
