//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Oracles here are written independently of the library routines they check.

use std::time::Instant;

use num_complex::Complex64;
use qcont::bounds::{
    check_equal_marginals, check_improved_fa, check_thm1, fannes_audenaert, improved_fa,
};
use qcont::channels::{
    channel_dmax_stabilised, channel_dmax_unstabilised, degradability_bounds, AscentOptions,
};
use qcont::lab::{
    evaluate_witness, fuzz, ginibre_state, random_channel, sample_rng, sample_witness, Campaign,
    CampaignParams, FuzzReport, RngConfig,
};
use qcont::{
    g_function, integral_rel_entropy, isotropic_mix, max_entangled, rel_entropy, trace_distance,
    vn_entropy, CMatrix, DensityMatrix, HermitianOperator, QuantumChannel,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn h2(p: f64) -> f64 {
    let t = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    t(p) + t(1.0 - p)
}

/// `ε log2(M − 1) + h2(ε)` below `1 − 1/M`, `log2 M` above.
fn thm1_closed_form(m: f64, eps: f64) -> f64 {
    if eps >= 1.0 - 1.0 / m {
        m.log2()
    } else if eps == 0.0 {
        0.0
    } else {
        eps * (m - 1.0).log2() + h2(eps)
    }
}

fn diag(p: &[f64]) -> DensityMatrix {
    DensityMatrix::diagonal(p).unwrap()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..1000u64 {
        let mut rng = sample_rng(0xA1, i);
        let d = 2 + (i % 3) as usize;
        let rho = ginibre_state(d, d, &mut rng).map_err(|e| e.to_string())?;
        let sigma = ginibre_state(d, d, &mut rng).map_err(|e| e.to_string())?;
        let q = integral_rel_entropy(&rho, &sigma, 1e-8).map_err(|e| format!("pair {i}: {e}"))?;
        let s = rel_entropy(&rho, &sigma).map_err(|e| e.to_string())?.value;
        worst = worst.max((q.value - s).abs());
    }
    ensure(worst <= 1e-6, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "1000 pairs, max |integral - spectral| = {worst:.3e}"
    ))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for m in [1.5, 2.0, 4.0, 8.0] {
        let mut grid = vec![0.0, 0.1, 0.25, 1.0 - 1.0 / m];
        grid.retain(|&e| e <= 1.0 - 1.0 / m);
        for eps in grid {
            let (rho, sigma, omega) = (
                diag(&[1.0, 0.0]),
                diag(&[1.0 - eps, eps]),
                diag(&[1.0 / m, 1.0 - 1.0 / m]),
            );
            let lhs = rel_entropy(&rho, &omega).unwrap().value
                - rel_entropy(&sigma, &omega).unwrap().value;
            let dev = (lhs - thm1_closed_form(m, eps)).abs();
            let r = check_thm1(&rho, &sigma, &omega, None, None).map_err(|e| e.to_string())?;
            let slack = r.slack.ok_or("no slack")?.abs();
            worst = worst.max(dev).max(slack);
            rows += 1;
        }
        // Branch value at and past the threshold.
        let eps = 1.0 - 1.0 / m;
        let r = check_thm1(
            &diag(&[1.0, 0.0]),
            &diag(&[1.0 - eps, eps]),
            &diag(&[1.0 / m, 1.0 - 1.0 / m]),
            None,
            None,
        )
        .map_err(|e| e.to_string())?;
        worst = worst.max((r.rhs - m.log2()).abs());
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("{rows} grid points, max deviation {worst:.3e}"))
}

fn deterministic(
    campaign: Campaign,
    params: &CampaignParams,
    samples: u64,
    seed: u64,
) -> Result<FuzzReport, String> {
    let a = fuzz(campaign, params, samples, &RngConfig::new(seed, 1)).map_err(|e| e.to_string())?;
    let b = fuzz(campaign, params, samples, &RngConfig::new(seed, 3)).map_err(|e| e.to_string())?;
    ensure(a.to_json() == b.to_json(), || {
        format!("{campaign} report depends on the worker count")
    })?;
    Ok(a)
}

fn no_failures(r: &FuzzReport) -> Result<(), String> {
    ensure(r.violations == 0 && r.errors == 0, || {
        format!(
            "{}: {} violations (max {:e}), {} errors {:?}",
            r.campaign_tag, r.violations, r.max_violation, r.errors, r.error_samples
        )
    })
}

fn criterion_3() -> Outcome {
    let params = CampaignParams {
        dims: Some((2, 6)),
        ..CampaignParams::for_campaign(Campaign::Thm1)
    };
    let r = deterministic(Campaign::Thm1, &params, 100_000, 0x3)?;
    no_failures(&r)?;
    ensure(r.inapplicable == 0, || {
        format!("{} inapplicable samples", r.inapplicable)
    })?;
    Ok(format!(
        "100000 triples, min slack {:.3e}, deterministic across workers",
        r.min_slack
    ))
}

fn criterion_4() -> Outcome {
    let params = CampaignParams {
        dims: Some((2, 4)),
        ..CampaignParams::for_campaign(Campaign::Eq14)
    };
    let r = deterministic(Campaign::Eq14, &params, 100_000, 0x4)?;
    no_failures(&r)?;
    ensure(r.inapplicable == 0, || {
        format!("{} pairs failed the marginal check", r.inapplicable)
    })?;
    let mut worst: f64 = 0.0;
    for d in 2..=4usize {
        let n = (d * d) as f64;
        for eps in [0.0, 0.1, 0.3, 1.0 - 1.0 / n] {
            let rho = max_entangled(d).unwrap();
            let sigma = isotropic_mix(d, eps).unwrap();
            let r = check_equal_marginals(&rho, &sigma, None).map_err(|e| e.to_string())?;
            // H(A|B)_Φ = −log2 d, and the isotropic state has spectrum (1−ε, ε/(n−1) × (n−1))
            // with a maximally mixed B marginal, so the difference is its entropy.
            let lhs = h2(eps)
                + if eps > 0.0 {
                    eps * (n - 1.0).log2()
                } else {
                    0.0
                };
            worst = worst
                .max((r.lhs.unwrap() - lhs).abs())
                .max((r.rhs - thm1_closed_form(n, eps)).abs());
            worst = worst.max(r.slack.unwrap().abs());
        }
    }
    ensure(worst <= 1e-9, || format!("isotropic deviation {worst:e}"))?;
    Ok(format!(
        "100000 pairs, min slack {:.3e}; isotropic family tight to {worst:.1e}",
        r.min_slack
    ))
}

fn criterion_5() -> Outcome {
    let (mut admissible, mut strict) = (0, 0);
    for i in 0..10_000u64 {
        let mut rng = sample_rng(0x5, i);
        let d = rng.random_range(2..=4usize);
        let sigma = ginibre_state(d, d, &mut rng).unwrap();
        let other = ginibre_state(d, rng.random_range(1..=d), &mut rng).unwrap();
        let t: f64 = rng.random::<f64>() * 0.5;
        let rho = other.mix(&sigma, t).unwrap();
        let eps = trace_distance(&rho, &sigma).unwrap();
        let lambda = sigma.lambda_max().unwrap();
        if !(lambda < 1.0) || eps > 1.0 - 1.0 / (d as f64 * lambda) || eps > 1.0 - 1.0 / d as f64 {
            continue;
        }
        admissible += 1;
        let ifa = improved_fa(d, lambda, eps).map_err(|e| format!("sample {i}: {e}"))?;
        let fa = fannes_audenaert(d, eps).map_err(|e| format!("sample {i}: {e}"))?;
        ensure(ifa <= fa, || {
            format!("sample {i}: improved {ifa} > fannes {fa}")
        })?;
        if eps > 0.0 {
            ensure(ifa < fa, || {
                format!("sample {i}: no strict gap at eps {eps}, lambda {lambda}")
            })?;
            strict += 1;
        }
        let diff = vn_entropy(&rho).unwrap() - vn_entropy(&sigma).unwrap();
        ensure(diff <= ifa + 1e-8, || {
            format!("sample {i}: entropy gap {diff} above {ifa}")
        })?;
        let r = check_improved_fa(&rho, &sigma).map_err(|e| e.to_string())?;
        ensure(r.slack.unwrap() >= -1e-8, || {
            format!("sample {i}: report slack {:?}", r.slack)
        })?;
    }
    ensure(admissible >= 1000, || {
        format!("only {admissible} admissible pairs")
    })?;
    Ok(format!(
        "{admissible} admissible pairs of 10000, strict gap on {strict}"
    ))
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let eps = k as f64 / 99.0;
        let f = |q: f64| eps * (1.0 / q).log2() + (1.0 / (1.0 - q)).log2();
        // Ternary search on the convex objective, independent of the library's minimiser.
        let (mut a, mut b) = (1e-300_f64, 1.0 - 1e-15);
        for _ in 0..300 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if f(m1) <= f(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        let inf = f(0.5 * (a + b));
        let g = g_function(eps).map_err(|e| e.to_string())?;
        worst = worst.max((g - inf).abs());
    }
    ensure(worst <= 1e-6, || format!("max deviation {worst:e}"))?;
    Ok(format!("100 grid points, max deviation {worst:.3e}"))
}

/// `min{λ : λ J2 − J1 ⪰ 0}` by bisection on PSD feasibility, in bits.
fn bisection_dmax(j1: &CMatrix, j2: &CMatrix) -> f64 {
    let feasible = |lam: f64| {
        let m = j2 * Complex64::new(lam, 0.0) - j1;
        let v = HermitianOperator::new(m).unwrap().eigenvalues().unwrap();
        v.iter().all(|&x| x >= -1e-13)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
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

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = sample_rng(0x7, i);
        let din = rng.random_range(2..=3usize);
        let dout = rng.random_range(2..=3usize);
        let k1 = rng.random_range(din.div_ceil(dout)..=din * dout);
        let l1 = random_channel(din, dout, k1, &mut rng).unwrap();
        // Full Kraus rank keeps the reference Choi matrix invertible.
        let l2 = random_channel(din, dout, din * dout, &mut rng).unwrap();
        let st = channel_dmax_stabilised(&l1, &l2).map_err(|e| e.to_string())?;
        ensure(st.finite, || format!("pair {i}: infinite stabilised value"))?;
        let oracle = bisection_dmax(l1.choi().matrix(), l2.choi().matrix());
        worst = worst.max((st.value - oracle).abs());
        let un = channel_dmax_unstabilised(&l1, &l2, 4, i).map_err(|e| e.to_string())?;
        ensure(un <= st.value + 1e-8, || {
            format!("pair {i}: unstabilised {un} > stabilised {}", st.value)
        })?;
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "100 pairs, max |eig - bisection| = {worst:.3e}, unstabilised <= stabilised"
    ))
}

fn criterion_8() -> Outcome {
    let gamma = 0.25;
    let n = QuantumChannel::amplitude_damping(gamma).map_err(|e| e.to_string())?;
    let theta = QuantumChannel::amplitude_damping((1.0 - 2.0 * gamma) / (1.0 - gamma))
        .map_err(|e| e.to_string())?;
    let r = degradability_bounds(&n, &theta, None, &AscentOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(r.eps_lower <= 0.0 + 1e-8 && r.eps_upper <= 1e-8, || {
        format!(
            "bracket [{:e}, {:e}] does not collapse to 0",
            r.eps_lower, r.eps_upper
        )
    })?;
    ensure((r.u_theta - r.ic_lower).abs() <= 2e-5, || {
        format!("u_theta {} vs ic {}", r.u_theta, r.ic_lower)
    })?;
    for (name, b) in [("utheta", &r.q_upper_utheta), ("ic", &r.q_upper_ic)] {
        ensure(b.applicable && b.value >= r.ic_lower, || {
            format!("{name} bound {} below ic {}", b.value, r.ic_lower)
        })?;
    }
    let scan_points = 200_000;
    let scan = (0..=scan_points)
        .map(|k| {
            let p = k as f64 / scan_points as f64;
            h2((1.0 - gamma) * p) - h2(gamma * p)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    ensure((r.ic_lower - scan).abs() <= 1e-4, || {
        format!("ic {} vs scan {scan}", r.ic_lower)
    })?;
    Ok(format!(
        "eps_upper {:.1e}, ic {:.9}, scan {:.9}",
        r.eps_upper, r.ic_lower, scan
    ))
}

fn criterion_9() -> Outcome {
    // Each sample reports the smaller of the star-center and two-sided slacks.
    let params = CampaignParams::for_campaign(Campaign::Prop9);
    let r = fuzz(Campaign::Prop9, &params, 10_000, &RngConfig::new(0x9, 1))
        .map_err(|e| e.to_string())?;
    no_failures(&r)?;
    for n in &r.near_saturations {
        let w = sample_witness(Campaign::Prop9, &params, 0x9, n.witness.index)
            .map_err(|e| e.to_string())?;
        ensure(w.digest() == n.witness.digest, || {
            format!("witness {} does not reconstruct", n.witness.index)
        })?;
    }
    ensure(r.min_slack >= -1e-5, || {
        format!("min slack {:e}", r.min_slack)
    })?;
    let mut line = format!("10000 instances, min slack {:.3e}", r.min_slack);
    for q in [0.1, 0.3, 0.6] {
        let params = CampaignParams {
            q: Some(q),
            ..CampaignParams::for_campaign(Campaign::Lemma3)
        };
        let l = fuzz(Campaign::Lemma3, &params, 10_000, &RngConfig::new(0x93, 1))
            .map_err(|e| e.to_string())?;
        no_failures(&l)?;
        ensure(l.min_slack >= -1e-6, || {
            format!("lemma3 q={q}: min slack {:e}", l.min_slack)
        })?;
        line.push_str(&format!("; lemma3 q={q} min slack {:.3e}", l.min_slack));
    }
    Ok(line)
}

fn criterion_10() -> Outcome {
    let mut line = String::new();
    for campaign in [Campaign::Wilde, Campaign::MiConjecture] {
        let params = CampaignParams::for_campaign(campaign);
        let r = deterministic(campaign, &params, 100_000, 0x10)?;
        ensure(!r.failed, || format!("{campaign} report marked as failed"))?;
        ensure(r.errors == 0, || {
            format!("{campaign}: {} errors {:?}", r.errors, r.error_samples)
        })?;
        line.push_str(&format!(
            "{campaign}: {} findings, min slack {:.3e}; ",
            r.violations, r.min_slack
        ));
    }
    let params = CampaignParams::for_campaign(Campaign::Wilde);
    let mut compared = 0;
    for i in 0..10_000u64 {
        let w = sample_witness(Campaign::Wilde, &params, 0x10, i).map_err(|e| e.to_string())?;
        let r = evaluate_witness(Campaign::Wilde, &w).map_err(|e| e.to_string())?;
        if let (true, Some(afw)) = (r.applicable, r.param("afw")) {
            ensure(afw >= r.rhs - 1e-12, || {
                format!("sample {i}: afw {afw} < wilde rhs {}", r.rhs)
            })?;
            compared += 1;
        }
    }
    line.push_str(&format!("afw >= wilde rhs on {compared} sampled points"));
    Ok(line)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("integral vs spectral relative entropy", criterion_1),
        ("commuting qubit triple saturation", criterion_2),
        ("random triple campaign", criterion_3),
        (
            "equal-marginal campaign and isotropic saturation",
            criterion_4,
        ),
        ("improved Fannes dominance", criterion_5),
        ("g as an infimum", criterion_6),
        ("channel max-relative entropy consistency", criterion_7),
        ("amplitude damping degradability", criterion_8),
        ("filtered divergence campaigns", criterion_9),
        ("conjecture campaigns", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", k + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
