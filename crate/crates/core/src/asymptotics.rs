//! Asymptotic covariance of `d̂` and `Ĝ(d̂)` when the number of scales grows
//! without bound (`j1 − j0 → ∞`).
//!
//! The building block is
//!
//! ```text
//! D̃_u(λ; δ) = Σ_{τ=0}^{2^u−1} Σ_t |λ+2tπ|^{-δ} conj(ψ̂(λ+2tπ)) 2^{u/2} ψ̂(2^u(λ+2tπ)) e^{-i 2^u τ (λ+2tπ)}
//! Ĩ_u(δ₁, δ₂) = 2π / (K(δ₁) K(δ₂)) ∫_{-π}^{π} conj(D̃_u(λ; δ₁)) D̃_u(λ; δ₂) dλ
//! ```
//!
//! Since `2^u τ · 2tπ` is a multiple of `2π`, the phase does not depend on
//! `t` and `D̃_u` factors as `g_u(λ) S_u(λ; δ)` with the Dirichlet kernel
//! `g_u(λ) = Σ_τ e^{-i 2^u τ λ}`.

use std::f64::consts::{LN_2, PI};
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::filters::ComplexFilterBank;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::whittle::{k_delta, WhittleFit};

/// Default number of aliases `|t| ≤ t_max` kept in `D̃_u`.
pub const DEFAULT_T_MAX: i64 = 12;
/// Default cap on the scale-lag series.
pub const DEFAULT_U_MAX: u32 = 12;
/// Largest admissible `u`-tail of the `𝓘` series.
pub const SERIES_TOL: f64 = 1e-6;

const GL_DEGREE: usize = 24;

/// `D̃_u(λ; δ)` with aliases `|t| ≤ t_max`.
pub fn d_u(lambda: f64, delta: f64, u: u32, t_max: i64, bank: &ComplexFilterBank) -> Complex64 {
    dirichlet(lambda, u) * s_u(lambda, &[delta], u, t_max, bank)[0]
}

/// `Σ_{τ=0}^{2^u−1} e^{-i 2^u τ λ}`.
fn dirichlet(lambda: f64, u: u32) -> Complex64 {
    let step = Complex64::from_polar(1.0, -((1u64 << u) as f64) * lambda);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut z = Complex64::new(1.0, 0.0);
    for _ in 0..(1u64 << u) {
        acc += z;
        z *= step;
    }
    acc
}

/// `S_u(λ; δ)` for several `δ` sharing the wavelet evaluations.
fn s_u(lambda: f64, deltas: &[f64], u: u32, t_max: i64, bank: &ComplexFilterBank) -> Vec<Complex64> {
    let scale = (1u64 << u) as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); deltas.len()];
    for t in -t_max..=t_max {
        let nu = lambda + 2.0 * PI * t as f64;
        if nu == 0.0 {
            continue;
        }
        let core = bank.psi_hat(nu).conj() * scale.sqrt() * bank.psi_hat(scale * nu);
        let log_nu = nu.abs().ln();
        for (o, &d) in out.iter_mut().zip(deltas) {
            *o += core * (-d * log_nu).exp();
        }
    }
    out
}

/// `∫_{-π}^{π} conj(D̃_u(δ_a)) D̃_u(δ_b) dλ` for every pair of `deltas`,
/// by a composite Gauss–Legendre rule on `panels` panels per period of
/// `g_u`.
pub fn overlap_matrix(deltas: &[f64], u: u32, t_max: i64, panels: usize, bank: &ComplexFilterBank) -> CMatrix {
    let rule = GaussLegendre::new(NonZeroUsize::new(GL_DEGREE).unwrap());
    let nodes = rule.as_node_weight_pairs();
    let periods = 1usize << u;
    let total = 2 * periods * panels;
    let h = 2.0 * PI / total as f64;
    let k = deltas.len();
    (0..total)
        .into_par_iter()
        .map(|i| {
            let lo = -PI + h * i as f64;
            let mut acc = CMatrix::zeros(k, k);
            for &(x, w) in nodes.iter() {
                let lambda = lo + 0.5 * h * (x + 1.0);
                let g = dirichlet(lambda, u).norm_sqr();
                let s = s_u(lambda, deltas, u, t_max, bank);
                for a in 0..k {
                    for b in 0..k {
                        acc[(a, b)] += s[a].conj() * s[b] * (0.5 * h * w * g);
                    }
                }
            }
            acc
        })
        .reduce(|| CMatrix::zeros(k, k), |a, b| a + b)
}

/// `Ĩ_u(δ₁, δ₂)`.
pub fn i_tilde(u: u32, delta1: f64, delta2: f64, bank: &ComplexFilterBank) -> Result<Complex64> {
    let k1 = k_delta(delta1, bank)?;
    let k2 = k_delta(delta2, bank)?;
    let m = overlap_matrix(&[delta1, delta2], u, DEFAULT_T_MAX, panels_for(u), bank);
    Ok(2.0 * PI / (k1 * k2) * m[(0, 1)])
}

fn panels_for(u: u32) -> usize {
    if u == 0 {
        32
    } else {
        8
    }
}

/// Truncation diagnostics of an asymptotic variance.
#[derive(Debug, Clone)]
pub struct SeriesInfo {
    /// Last scale lag evaluated.
    pub u_last: u32,
    pub t_max: i64,
    /// Magnitude of the last term relative to the `u = 0` term.
    pub tail: f64,
}

/// `𝓘_∞(δ_a, δ_b) = Ĩ_0 + Σ_{u≥1} (2^{u δ_a} + 2^{u δ_b}) 2^{-u} Ĩ_u` on the
/// grid of distinct `deltas`. The series stops once a term falls below
/// `10^{-3}·SERIES_TOL` of the leading term.
pub fn i_infinity(deltas: &[f64], u_max: u32, bank: &ComplexFilterBank) -> Result<(CMatrix, SeriesInfo)> {
    let ks: Vec<f64> = deltas.iter().map(|&d| k_delta(d, bank)).collect::<Result<_>>()?;
    let k = deltas.len();
    let norm = |m: CMatrix| CMatrix::from_fn(k, k, |a, b| m[(a, b)] * (2.0 * PI / (ks[a] * ks[b])));
    let base = norm(overlap_matrix(deltas, 0, DEFAULT_T_MAX, panels_for(0), bank));
    let scale = base.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut total = base;
    let mut tail = 0.0;
    let mut u_last = 0;
    for u in 1..=u_max {
        let iu = norm(overlap_matrix(deltas, u, DEFAULT_T_MAX, panels_for(u), bank));
        let term = CMatrix::from_fn(k, k, |a, b| {
            iu[(a, b)] * ((u as f64 * deltas[a]).exp2() + (u as f64 * deltas[b]).exp2()) * (-(u as f64)).exp2()
        });
        tail = term.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
        total += term;
        u_last = u;
        if tail < 1e-3 * SERIES_TOL {
            break;
        }
    }
    if tail > SERIES_TOL {
        return Err(Error::SeriesNotConverged { tail });
    }
    Ok((total, SeriesInfo { u_last, t_max: DEFAULT_T_MAX, tail }))
}

/// Distinct values of `d_a + d_b` and the index of each pair.
fn pair_deltas(d0: &[f64]) -> (Vec<f64>, DMatrix<usize>) {
    let p = d0.len();
    let mut values: Vec<f64> = Vec::new();
    let idx = DMatrix::from_fn(p, p, |a, b| {
        let s = d0[a] + d0[b];
        match values.iter().position(|&v| (v - s).abs() < 1e-14) {
            Some(i) => i,
            None => {
                values.push(s);
                values.len() - 1
            }
        }
    });
    (values, idx)
}

/// `diag(vec G) 𝓘(d_a+d_b, d_a'+d_b') diag(vec G)` as a function of the
/// four indices.
fn gig<'a>(
    g0: &'a CMatrix,
    table: &'a CMatrix,
    idx: &'a DMatrix<usize>,
) -> impl Fn(usize, usize, usize, usize) -> Complex64 + 'a {
    move |a, b, a2, b2| g0[(a, b)] * table[(idx[(a, b)], idx[(a2, b2)])] * g0[(a2, b2)]
}

fn check_inputs(g0: &CMatrix, d0: &[f64]) -> Result<CMatrix> {
    let p = d0.len();
    if g0.shape() != (p, p) {
        return Err(Error::DimensionMismatch { expected: p, found: g0.nrows() });
    }
    if (g0 - g0.adjoint()).iter().any(|z| z.norm() > 1e-12 * g0.norm()) {
        return Err(Error::InvalidParameter("G0 must be Hermitian".into()));
    }
    if !hermitian_eigenvalues(g0).first().is_some_and(|&v| v > 0.0) {
        return Err(Error::SingularG);
    }
    g0.clone().try_inverse().ok_or(Error::SingularG)
}

/// Asymptotic variance of `√n (d̂ − d⁰)`:
/// `V = (2 log²2)^{-1} (G⁻¹∘G + I)^{-1} Υ (G⁻¹∘G + I)^{-1}`.
/// The result is returned as the real symmetric part.
pub fn variance_d_inf(
    g0: &CMatrix,
    d0: &[f64],
    u_max: u32,
    bank: &ComplexFilterBank,
) -> Result<(DMatrix<f64>, SeriesInfo)> {
    let ginv = check_inputs(g0, d0)?;
    let p = d0.len();
    let (deltas, idx) = pair_deltas(d0);
    let (table, info) = i_infinity(&deltas, u_max, bank)?;
    let m = gig(g0, &table, &idx);
    let upsilon = CMatrix::from_fn(p, p, |a, a2| {
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..p {
            for b2 in 0..p {
                acc += ginv[(a, b)] * ginv[(a2, b2)] * (m(a, a2, b, b2) + m(a, b2, a2, b));
            }
        }
        acc
    });
    let h = CMatrix::from_fn(p, p, |a, b| ginv[(a, b)] * g0[(a, b)]) + CMatrix::identity(p, p);
    let hinv = h.try_inverse().ok_or(Error::SingularG)?;
    let v = &hinv * upsilon * &hinv / Complex64::new(2.0 * LN_2 * LN_2, 0.0);
    let real = DMatrix::from_fn(p, p, |a, b| 0.5 * (v[(a, b)].re + v[(b, a)].re));
    Ok((real, info))
}

/// Asymptotic variance of `vec √n (Ĝ(d̂) − G⁰)`, indexed by `(a, b) ↦ a + p·b`.
pub fn variance_g_inf(g0: &CMatrix, d0: &[f64], u_max: u32, bank: &ComplexFilterBank) -> Result<(CMatrix, SeriesInfo)> {
    check_inputs(g0, d0)?;
    let p = d0.len();
    let (deltas, idx) = pair_deltas(d0);
    let (table, info) = i_infinity(&deltas, u_max, bank)?;
    let m = gig(g0, &table, &idx);
    let v = CMatrix::from_fn(p * p, p * p, |r, c| {
        let (a, b) = (r % p, r / p);
        let (a2, b2) = (c % p, c / p);
        m(a, a2, b, b2) + m(a, b2, a2, b)
    });
    Ok((v, info))
}

/// Two-sided Wald interval for one memory parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaldInterval {
    pub estimate: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
}

impl WaldInterval {
    pub fn covers(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Intervals `d̂_a ± z_{(1+level)/2} √(V_aa / n)`.
pub fn wald_from_variance(d_hat: &[f64], v: &DMatrix<f64>, n: usize, level: f64) -> Result<Vec<WaldInterval>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("confidence level must lie in (0, 1) (got {level})")));
    }
    if v.shape() != (d_hat.len(), d_hat.len()) {
        return Err(Error::DimensionMismatch { expected: d_hat.len(), found: v.nrows() });
    }
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    Ok(d_hat
        .iter()
        .enumerate()
        .map(|(a, &d)| {
            let se = (v[(a, a)].max(0.0) / n as f64).sqrt();
            WaldInterval { estimate: d, se, lower: d - z * se, upper: d + z * se }
        })
        .collect())
}

/// Wald intervals for `d` with the variance evaluated at the fitted `(Ĝ, d̂)`.
pub fn wald_intervals(fit: &WhittleFit, level: f64, u_max: u32, bank: &ComplexFilterBank) -> Result<Vec<WaldInterval>> {
    let (v, _) = variance_d_inf(&fit.g_hat, &fit.d_hat, u_max, bank)?;
    wald_from_variance(&fit.d_hat, &v, fit.n, level)
}
