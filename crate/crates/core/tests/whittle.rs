use std::f64::consts::LN_2;

use longwave::filters::build_cfw_c;
use longwave::linalg::CMatrix;
use longwave::scalogram::{scalogram, Scalogram};
use longwave::simulate::sim_arfima0d0;
use longwave::transform::{pyramid, WaveletPyramid};
use longwave::whittle::{criterion, estimate, estimate_with_bank, g_hat, k_delta, WhittleConfig};
use longwave::{Complex64, Error};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_pyr(p: usize, counts: &[usize], seed: u64) -> WaveletPyramid {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut z = || {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    };
    let scales = counts.iter().map(|&n| DMatrix::from_fn(n, p, |_, _| z())).collect();
    WaveletPyramid { n: 2048, p, scales, support_length: 9 }
}

fn sigma2(rho: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0])
}

/// `Ĝ` by an explicit loop over every coefficient.
fn brute_g(pyr: &WaveletPyramid, d: &[f64], j0: usize, j1: usize) -> CMatrix {
    let p = pyr.p;
    let mut g = CMatrix::zeros(p, p);
    let mut n = 0usize;
    for j in j0..=j1 {
        let w = pyr.coeffs(j);
        for k in 0..w.nrows() {
            n += 1;
            for a in 0..p {
                for b in 0..p {
                    let s = 2f64.powf(-(j as f64) * (d[a] + d[b]));
                    g[(a, b)] += w[(k, a)] * w[(k, b)].conj() * s;
                }
            }
        }
    }
    g / Complex64::new(n as f64, 0.0)
}

#[test]
fn g_hat_at_zero_memory_is_mean_energy() {
    let pyr = random_pyr(1, &[64, 32, 16, 8], 1);
    let sc = scalogram(&pyr, false).unwrap();
    let direct: f64 = pyr.scales.iter().flat_map(|w| w.iter().map(|z| z.norm_sqr())).sum::<f64>() / 120.0;
    assert!((g_hat(&sc, &[0.0], 1, 4).unwrap()[(0, 0)].re - direct).abs() < 1e-12 * direct);
}

#[test]
fn g_hat_matches_brute_force() {
    let pyr = random_pyr(2, &[64, 32, 16, 8, 4], 2);
    let sc = scalogram(&pyr, false).unwrap();
    let d = [0.2, 0.4];
    let g = g_hat(&sc, &d, 2, 5).unwrap();
    assert!((g - brute_g(&pyr, &d, 2, 5)).norm() < 1e-12);
}

#[test]
fn criterion_matches_closed_form() {
    let pyr = random_pyr(2, &[64, 32, 16, 8, 4], 3);
    let sc = scalogram(&pyr, false).unwrap();
    let d = [0.1, -0.2];
    let g = brute_g(&pyr, &d, 1, 5);
    let logdet = g.determinant().re.ln();
    let jbar = (64 + 2 * 32 + 3 * 16 + 4 * 8 + 5 * 4) as f64 / 124.0;
    let expected = logdet + 2.0 * LN_2 * jbar * (d[0] + d[1]);
    assert!((criterion(&d, &sc, 1, 5).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn criterion_is_minimized_at_the_generating_memory() {
    let d0 = 0.35;
    let counts = [1024usize, 512, 256, 128, 64, 32, 16];
    let sc = Scalogram {
        p: 1,
        matrices: counts
            .iter()
            .enumerate()
            .map(|(s, &n)| {
                let j = (s + 1) as f64;
                CMatrix::from_element(1, 1, Complex64::new(n as f64 * 2f64.powf(2.0 * j * d0), 0.0))
            })
            .collect(),
        counts: counts.to_vec(),
        centered: false,
    };
    let grid: Vec<f64> = (0..=200).map(|i| -0.45 + 1.9 * i as f64 / 200.0).collect();
    let best = grid
        .iter()
        .map(|&d| (criterion(&[d], &sc, 1, 7).unwrap(), d))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    assert!((best.1 - d0).abs() < 0.01, "{}", best.1);
}

#[test]
fn k_is_positive_and_symmetric_ratio_is_one() {
    let b = build_cfw_c(4, 4).unwrap();
    let k0 = k_delta(0.0, &b).unwrap();
    assert!(k0 > 0.0 && k0.is_finite());
    let k = k_delta(0.4, &b).unwrap();
    assert_eq!(k / (k * k).sqrt(), 1.0);
    assert!(matches!(k_delta(f64::NAN, &b), Err(Error::DomainError { .. })));
}

#[test]
fn fit_is_invariant_to_channel_scaling() {
    let x = sim_arfima0d0(4096, &[0.2, 0.4], &sigma2(0.6), 8).unwrap();
    let cfg = WhittleConfig::default();
    let a = estimate(&x, &cfg).unwrap();
    let b = estimate(&(&x * 5.0), &cfg).unwrap();
    for l in 0..2 {
        assert!((a.d_hat[l] - b.d_hat[l]).abs() < 1e-6);
    }
    assert!((&a.g_hat * Complex64::new(25.0, 0.0) - &b.g_hat).norm() < 1e-5 * b.g_hat.norm());
    assert!((&a.rho_hat - &b.rho_hat).amax() < 1e-5);
    assert!((&a.phi_hat - &b.phi_hat).amax() < 1e-5);

    let mut y = x.clone();
    y.column_mut(0).scale_mut(0.1);
    y.column_mut(1).scale_mut(30.0);
    let c = estimate(&y, &cfg).unwrap();
    for l in 0..2 {
        assert!((a.d_hat[l] - c.d_hat[l]).abs() < 1e-6);
    }
}

#[test]
fn fit_is_equivariant_under_channel_permutation() {
    let x = sim_arfima0d0(4096, &[0.1, 0.3, 0.45], &DMatrix::identity(3, 3), 9).unwrap();
    let perm = [2usize, 0, 1];
    let y = DMatrix::from_fn(x.nrows(), 3, |r, c| x[(r, perm[c])]);
    let cfg = WhittleConfig::default();
    let a = estimate(&x, &cfg).unwrap();
    let b = estimate(&y, &cfg).unwrap();
    for c in 0..3 {
        assert!((b.d_hat[c] - a.d_hat[perm[c]]).abs() < 1e-5);
    }
}

#[test]
fn fitted_matrices_are_well_formed() {
    let x = sim_arfima0d0(4096, &[0.2, 0.4], &sigma2(0.8), 10).unwrap();
    let b = build_cfw_c(4, 4).unwrap();
    let cfg = WhittleConfig::default();
    let fit = estimate_with_bank(&x, &cfg, &b).unwrap();
    assert_eq!(fit.theta_hat, fit.theta_hat.adjoint());
    for a in 0..2 {
        assert_eq!(fit.theta_hat[(a, a)].im, 0.0);
        assert!(fit.theta_hat[(a, a)].re > 0.0);
        assert_eq!(fit.rho_hat[(a, a)], 1.0);
    }
    assert!((fit.phi_hat[(0, 1)] + fit.phi_hat[(1, 0)]).abs() < 1e-15);

    // R at the truth cannot beat R at the minimizer.
    let pyr = pyramid(&x, &b, 12).unwrap();
    let sc = scalogram(&pyr, false).unwrap();
    let r_hat = criterion(&fit.d_hat, &sc, fit.j0, fit.j1).unwrap();
    let r_true = criterion(&[0.2, 0.4], &sc, fit.j0, fit.j1).unwrap();
    assert!(r_true >= r_hat - 1e-9);
    assert!((r_hat - fit.criterion).abs() < 1e-12);
}

#[test]
fn white_noise_memory_is_near_zero() {
    let cfg = WhittleConfig::default();
    let reps = 100;
    let mean: f64 = (0..reps)
        .map(|r| {
            let x = sim_arfima0d0(4096, &[0.0], &DMatrix::identity(1, 1), 1000 + r).unwrap();
            estimate(&x, &cfg).unwrap().d_hat[0]
        })
        .sum::<f64>()
        / reps as f64;
    assert!(mean.abs() < 0.05, "mean d̂ = {mean}");
}

#[test]
fn invalid_configurations_are_rejected() {
    let x = sim_arfima0d0(512, &[0.2], &DMatrix::identity(1, 1), 0).unwrap();
    let cfg = WhittleConfig { j0: 6, j1: Some(3), ..Default::default() };
    assert!(matches!(estimate(&x, &cfg), Err(Error::InvalidParameter(_))));
    let sc = scalogram(&random_pyr(1, &[8, 0, 0], 0), false).unwrap();
    assert!(matches!(g_hat(&sc, &[0.0], 2, 3), Err(Error::EmptyScales { .. })));
    let cfg = WhittleConfig { d_min: 0.5, d_max: 0.2, ..Default::default() };
    assert!(estimate(&x, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn g_hat_is_hermitian(seed in 0u64..1000, d1 in -0.4..1.5f64, d2 in -0.4..1.5f64) {
        let sc = scalogram(&random_pyr(2, &[32, 16, 8, 4], seed), false).unwrap();
        let g = g_hat(&sc, &[d1, d2], 1, 4).unwrap();
        prop_assert!((&g - g.adjoint()).norm() < 1e-14 * g.norm());
    }

    #[test]
    fn g_hat_scales_with_memory_shift(seed in 0u64..1000, d in -0.4..1.0f64, s in -0.3..0.3f64) {
        // Shifting d by s rescales scale j by 2^{-2js}; with one scale this is exact.
        let sc = scalogram(&random_pyr(1, &[0, 0, 32], seed), false).unwrap();
        let a = g_hat(&sc, &[d], 3, 3).unwrap()[(0, 0)].re;
        let b = g_hat(&sc, &[d + s], 3, 3).unwrap()[(0, 0)].re;
        prop_assert!((b - a * 2f64.powf(-6.0 * s)).abs() < 1e-12 * a);
    }
}
