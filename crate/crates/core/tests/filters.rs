use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use longwave::filters::{
    analyticity_bound, build_cfw_c, build_cfw_pr, d_hat_l, linspace, pr_residual, Branch, ComplexFilterBank, Variant,
};
use longwave::Complex64;
use proptest::prelude::*;

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn common_factor_examples() {
    assert!(close(d_hat_l(0.0, 4), Complex64::new(1.0, 0.0), 1e-15));
    assert!((d_hat_l(PI, 1).norm() - 0.5).abs() < 1e-15);
    assert!(close(d_hat_l(2.0 * PI, 4), Complex64::new(1.0, 0.0), 1e-14));
    for l in 1..6 {
        let expected = (2.0 * 0.5f64.powi(2 * l as i32 + 1)).sqrt();
        assert!((d_hat_l(PI, l).norm() - expected).abs() < 1e-15, "L = {l}");
    }
}

#[test]
fn cfw_c_examples() {
    assert_eq!(build_cfw_c(4, 4).unwrap().support_length, 9);
    let b = build_cfw_c(2, 1).unwrap();
    assert!(close(b.h_low.response(0.0), Complex64::new(SQRT_2, 0.0), 1e-13));
    let b = build_cfw_c(4, 4).unwrap();
    assert!(close(b.g_low.response(0.0), Complex64::new(SQRT_2, 0.0), 1e-13));
}

#[test]
fn cfw_pr_examples() {
    let b = build_cfw_pr(4, 4).unwrap();
    assert!(pr_residual(&b.h_low, 1024) < 1e-8);
    assert!(pr_residual(&b.g_low, 1024) < 1e-8);
    assert_eq!(b.support_length, 16);
    // ĥ(0) = √2·q̂(0) once the binomial and common factors are 1 at zero.
    let b = build_cfw_pr(2, 2).unwrap();
    assert!((b.h_low.response(0.0).norm() / SQRT_2 - 1.0).abs() < 1e-12);
}

#[test]
fn wavelet_examples() {
    let b = build_cfw_c(4, 4).unwrap();
    let (h, g, psi) = b.psi_hat_parts(0.0);
    assert!(h.norm() < 1e-15 && g.norm() < 1e-15 && psi.norm() < 1e-15);
    assert!(b.psi_hat(PI).norm() <= 2.0 * 5f64.powi(4) / (1.0 + PI).powi(4));
    // On the negative axis only the defect survives.
    let (h, _, psi) = b.psi_hat_parts(-5.0);
    assert!(psi.norm() <= analyticity_bound(-5.0, 4) * h.norm());
}

#[test]
fn scaling_function_examples() {
    let b = build_cfw_c(4, 4).unwrap();
    assert!(close(b.phi_h(0.0), Complex64::new(FRAC_1_SQRT_2, 0.0), 1e-13));
    assert!(close(b.phi_hat(0.0), Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2), 1e-13));
    for k in [-3i32, -1, 1, 2, 5] {
        assert!(b.phi_h(2.0 * PI * k as f64).norm() < 1e-12, "k = {k}");
    }
    assert!(b.phi_hat(1.3).norm() <= 1.0);
}

#[test]
fn scaling_function_bounds() {
    for (m, l) in [(2usize, 2usize), (4, 4), (4, 6)] {
        let b = build_cfw_c(m, l).unwrap();
        for x in linspace(-8.0 * PI, 8.0 * PI, 801) {
            assert!(b.phi_h(x).norm() <= 1.0 + 1e-12);
            assert!(b.phi_g(x).norm() <= 1.0 + 1e-12);
        }
        for w in linspace(-PI + 1e-3, PI - 1e-3, 101) {
            for k in [-3i32, -2, -1, 1, 2, 3] {
                let x = w + 2.0 * PI * k as f64;
                let bound = 2.0 * w.abs().powi(m as i32);
                assert!(b.phi_h(x).norm() <= bound + 1e-14, "({m},{l}) w={w} k={k}");
                assert!(b.phi_g(x).norm() <= bound + 1e-14, "({m},{l}) w={w} k={k}");
            }
        }
    }
}

#[test]
fn scaling_function_near_origin() {
    for (m, l) in [(2usize, 2usize), (4, 4), (4, 6)] {
        let b = build_cfw_c(m, l).unwrap();
        let c = (m + l + 1) as f64;
        for w in linspace(-PI + 1e-3, PI - 1e-3, 201) {
            let dev = (2.0 * b.phi_h(w).norm_sqr() - 1.0).abs();
            assert!(dev <= c * w * w + 1e-13, "({m},{l}) w={w}: {dev}");
        }
    }
}

#[test]
fn analyticity_improves_with_l() {
    let defect = |l: usize, x: f64| build_cfw_c(4, l).unwrap().analyticity_defect(x).unwrap();
    assert!(defect(6, 3.0) < defect(2, 3.0));
    for x in [1.0, 3.0, 6.0] {
        let d: Vec<f64> = (2..=6).map(|l| defect(l, x)).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "λ = {x}: {d:?}");
    }
    for l in [2usize, 4, 6] {
        let b = build_cfw_c(4, l).unwrap();
        let (h, _, psi) = b.psi_hat_parts(-3.0);
        let defect = b.analyticity_defect(-3.0).unwrap();
        assert!((defect - psi.norm() / h.norm()).abs() < 1e-15);
        assert!(defect <= analyticity_bound(-3.0, l));
    }
}

#[test]
fn analyticity_defect_at_three_matches_parts() {
    let b = build_cfw_c(4, 4).unwrap();
    let (h, g, _) = b.psi_hat_parts(3.0);
    let direct = (Complex64::i() * g - h).norm() / h.norm();
    let defect = b.analyticity_defect(3.0).unwrap();
    assert!((defect - direct).abs() < 1e-14);
    assert!(defect > 0.0 && defect <= analyticity_bound(3.0, 4));
}

#[test]
fn tau_hat_vanishes_at_zero() {
    let b = build_cfw_c(4, 4).unwrap();
    assert!(b.tau_hat(0, 0.0, 8).norm() < 1e-14);
}

#[test]
fn tau_hat_approximates_the_wavelet() {
    let b = build_cfw_c(4, 4).unwrap();
    let (m, l) = (4i32, 4usize);
    let j = 3;
    let x = 0.4;
    let s = 2f64.powi(j);
    let lhs = (b.tau_hat(j as usize, x / s, 8) / s.sqrt()).norm_sqr();
    let bound = 2.0 * (m as f64 + l as f64 + 1.0) * s.powi(-2) * x.powi(2 * m);
    assert!((lhs - b.psi_hat(x).norm_sqr()).abs() <= bound);
}

#[test]
fn cascade_matches_time_domain_impulse_response() {
    let b = build_cfw_c(4, 4).unwrap();
    for branch in [Branch::H, Branch::G] {
        for j in 1..=4 {
            let taps = b.cascade_taps(branch, j);
            assert_eq!(taps.len(), longwave::transform::equivalent_length(j, b.support_length));
            for &x in &[0.1, 1.0, 2.5] {
                let direct: Complex64 = taps
                    .taps
                    .iter()
                    .enumerate()
                    .map(|(k, &t)| t * Complex64::from_polar(1.0, -x * (taps.offset + k as i64) as f64))
                    .sum();
                assert!(close(direct, b.cascade_response(branch, j, x), 1e-12));
            }
        }
    }
}

#[test]
fn tau_hat_branch_factorizes_through_the_cascade() {
    let b = build_cfw_c(4, 4).unwrap();
    for branch in [Branch::H, Branch::G] {
        let x = 1.0 / 4.0;
        let lhs = b.tau_hat_branch(branch, 2, x, 10);
        let rhs = FRAC_1_SQRT_2 * b.cascade_response(branch, 2, x).conj() * b.phi_periodized_energy(branch, x, 10);
        assert!(close(lhs, rhs, 1e-6 * rhs.norm().max(1e-12)), "{branch:?}: {lhs} vs {rhs}");
    }
}

#[test]
fn daubechies_bank_is_real() {
    let b = ComplexFilterBank::new(Variant::Daubechies, 4, 0).unwrap();
    assert!(!b.is_analytic());
    assert_eq!(b.support_length, 8);
    assert!(pr_residual(&b.h_low, 512) < 1e-10);
    let (_, g, psi) = b.psi_hat_parts(2.0);
    assert_eq!(g, Complex64::new(0.0, 0.0));
    assert_eq!(psi, b.psi_h(2.0));
}

proptest! {
    #[test]
    fn common_factor_is_bounded(x in -8.0 * PI..8.0 * PI, l in 1usize..8) {
        prop_assert!(d_hat_l(x, l).norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn qmf_identities(x in -8.0 * PI..8.0 * PI, ml in prop::sample::select(vec![(2usize, 2usize), (4, 4), (4, 6)])) {
        let b = build_cfw_c(ml.0, ml.1).unwrap();
        let shift = Complex64::from_polar(1.0, -x);
        let qh = b.h_high.response(x) - b.h_low.response(x + PI).conj() * shift;
        let qg = b.g_high.response(x) - b.g_low.response(x + PI).conj() * shift;
        prop_assert!(qh.norm() < 1e-10 && qg.norm() < 1e-10);
    }

    #[test]
    fn wavelet_decay_bounds(x in -8.0 * PI..8.0 * PI) {
        let b = build_cfw_c(4, 4).unwrap();
        let psi = b.psi_hat(x).norm();
        prop_assert!(psi <= x.abs().powi(4) * (1.0 + 1e-12));
        prop_assert!(psi <= 2.0 * 5f64.powi(4) * (1.0 + x.abs()).powi(-4));
    }
}
