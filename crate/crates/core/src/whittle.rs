//! Local Whittle estimation of the memory vector `d` and the long-run
//! covariance `Θ`.
//!
//! For fixed `d` the Whittle criterion is minimized in `G` by
//!
//! ```text
//! Ĝ(d) = (1/n) Σ_{j=j0}^{j1} 2^{-j d} I(j) 2^{-j d},     n = Σ n_j,
//! ```
//!
//! (`2^{-j d}` is the diagonal matrix with entries `2^{-j d_ℓ}`), which
//! leaves the profile criterion
//!
//! ```text
//! R(d) = log det Ĝ(d) + 2 log 2 · (Σ_j j n_j / n) · Σ_ℓ d_ℓ.
//! ```
//!
//! `Θ` is recovered as `Θ̂_{ℓm} = Ĝ_{ℓm}(d̂) / K(d̂_ℓ + d̂_m)`.

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{ComplexFilterBank, Variant};
use crate::linalg::{hermitian_logdet, CMatrix};
use crate::optim::NelderMead;
use crate::quad::Adaptive;
use crate::scalogram::{scalogram, Scalogram};
use crate::transform::{max_scale, pyramid};

// ---------------------------------------------------------------------------
// K(δ)
// ---------------------------------------------------------------------------

/// Open interval of `δ` on which `K(δ)` converges: `(1 − 2M, 2M + 1)`.
pub fn k_strip(bank: &ComplexFilterBank) -> (f64, f64) {
    let m = bank.m as f64;
    (1.0 - 2.0 * m, 2.0 * m + 1.0)
}

const K_REL_TOL: f64 = 1e-11;
const K_MAX_OCTAVES: i32 = 40;

/// `K(δ) = c ∫₀^∞ λ^{-δ} |ψ̂_h(λ)|² dλ` with `c = 4` for analytic banks and
/// `c = 2` for real ones.
///
/// The half-line is split into octaves `[4π·2^i, 4π·2^{i+1}]` in both
/// directions from `[0, 4π]`'s upper half; each octave is integrated
/// adaptively and the remaining geometric tails are extrapolated from the
/// last two octaves.
pub fn k_delta(delta: f64, bank: &ComplexFilterBank) -> Result<f64> {
    let (lo, hi) = k_strip(bank);
    if !(delta > lo && delta < hi) || !delta.is_finite() {
        return Err(Error::DomainError { delta, lo, hi });
    }
    let mut quad = Adaptive::new(20, K_REL_TOL, 0.0);
    let integrand = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            (x.powf(-delta / 2.0) * bank.psi_h(x).norm()).powi(2)
        }
    };
    let base = 4.0 * PI;
    let mut total = quad.integrate(base / 2.0, base, integrand).value;
    // Octaves far from the bulk only need accuracy relative to the total.
    quad.abs_tol = 1e-2 * K_REL_TOL * total.abs();

    // Upward octaves; the integrand decays like λ^{-δ-2M} in mean.
    let mut prev = f64::INFINITY;
    for i in 0..K_MAX_OCTAVES {
        let a = base * 2f64.powi(i);
        if a * 2.0 > crate::filters::MAX_LAMBDA {
            break;
        }
        let v = quad.integrate(a, 2.0 * a, integrand).value;
        total += v;
        if i >= 2 {
            let ratio = (v / prev).abs();
            if ratio < 1.0 {
                let tail = v * ratio / (1.0 - ratio);
                if tail.abs() < K_REL_TOL * total.abs() {
                    total += tail;
                    break;
                }
            }
        }
        prev = v;
    }

    // Downward octaves; the integrand behaves like λ^{2M-δ} near zero.
    let mut prev = f64::INFINITY;
    for i in 1..=4 * K_MAX_OCTAVES {
        let b = base * 2f64.powi(-i);
        let v = quad.integrate(b / 2.0, b, integrand).value;
        total += v;
        if i >= 3 {
            let ratio = (v / prev).abs();
            if ratio < 1.0 {
                let tail = v * ratio / (1.0 - ratio);
                if tail.abs() < K_REL_TOL * total.abs() {
                    total += tail;
                    break;
                }
            }
        }
        prev = v;
    }
    Ok(bank.k_factor() * total)
}

/// `K` tabulated on a uniform `δ` grid with four-point Lagrange
/// interpolation.
#[derive(Debug, Clone)]
pub struct KTable {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

impl KTable {
    /// Tabulates `K` on `[a, b]` with spacing `step` (extended by two nodes
    /// on each side so that interpolation stays centered).
    pub fn new(bank: &ComplexFilterBank, a: f64, b: f64, step: f64) -> Result<Self> {
        let start = a - 2.0 * step;
        let n = ((b - a) / step).ceil() as usize + 5;
        let values = (0..n)
            .map(|i| k_delta(start + step * i as f64, bank))
            .collect::<Result<Vec<_>>>()?;
        Ok(KTable { start, step, values })
    }

    pub fn eval(&self, delta: f64) -> f64 {
        let pos = (delta - self.start) / self.step;
        let i = (pos.floor() as isize - 1).clamp(0, self.values.len() as isize - 4) as usize;
        let t = pos - i as f64;
        let y = &self.values[i..i + 4];
        // Lagrange basis on nodes 0, 1, 2, 3.
        let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3]
    }
}

// ---------------------------------------------------------------------------
// Criterion
// ---------------------------------------------------------------------------

fn scale_range(sc: &Scalogram, j0: usize, j1: usize) -> Result<(f64, f64)> {
    if j0 == 0 || j1 < j0 {
        return Err(Error::InvalidParameter(format!("invalid scale range [{j0}, {j1}]")));
    }
    let mut n = 0usize;
    let mut jn = 0usize;
    for j in j0..=j1.min(sc.j_max()) {
        n += sc.n_j(j);
        jn += j * sc.n_j(j);
    }
    if n == 0 {
        return Err(Error::EmptyScales { j0, j1 });
    }
    Ok((n as f64, jn as f64 / n as f64))
}

/// `Ĝ(d) = (1/n) Σ_{j=j0}^{j1} 2^{-jd} I(j) 2^{-jd}`.
pub fn g_hat(sc: &Scalogram, d: &[f64], j0: usize, j1: usize) -> Result<CMatrix> {
    if d.len() != sc.p {
        return Err(Error::DimensionMismatch { expected: sc.p, found: d.len() });
    }
    let (n, _) = scale_range(sc, j0, j1)?;
    let p = sc.p;
    let mut g = CMatrix::zeros(p, p);
    for j in j0..=j1.min(sc.j_max()) {
        if sc.n_j(j) == 0 {
            continue;
        }
        let w: Vec<f64> = d.iter().map(|&dl| 2f64.powf(-(j as f64) * dl)).collect();
        let i = sc.i(j);
        for a in 0..p {
            for b in 0..p {
                g[(a, b)] += i[(a, b)] * (w[a] * w[b]);
            }
        }
    }
    Ok(g / Complex64::new(n, 0.0))
}

/// `R(d) = log det Ĝ(d) + 2 log 2 · (Σ j n_j / n) · Σ d`.
pub fn criterion(d: &[f64], sc: &Scalogram, j0: usize, j1: usize) -> Result<f64> {
    let g = g_hat(sc, d, j0, j1)?;
    let (_, jbar) = scale_range(sc, j0, j1)?;
    let logdet = hermitian_logdet(&g).ok_or(Error::SingularG)?;
    Ok(logdet + 2.0 * LN_2 * jbar * d.iter().sum::<f64>())
}

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhittleConfig {
    pub j0: usize,
    /// Coarsest scale; `None` selects the deepest scale with at least
    /// [`MIN_COEFFS_J1`] coefficients.
    pub j1: Option<usize>,
    pub m: usize,
    pub l: usize,
    pub variant: Variant,
    pub d_min: f64,
    pub d_max: f64,
    pub max_iter: usize,
    pub x_tol: f64,
    pub f_tol: f64,
}

/// Minimum coefficient count of the default coarsest scale.
pub const MIN_COEFFS_J1: usize = 4;

/// Grid size of the univariate starting-point search.
pub const START_GRID: usize = 200;

impl Default for WhittleConfig {
    fn default() -> Self {
        WhittleConfig {
            j0: 4,
            j1: None,
            m: 4,
            l: 4,
            variant: Variant::CfwC,
            d_min: -0.49,
            d_max: 3.49,
            max_iter: 4000,
            x_tol: 1e-10,
            f_tol: 1e-13,
        }
    }
}

impl WhittleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.j0 < 1 {
            return Err(Error::InvalidParameter("j0 must be at least 1".into()));
        }
        if let Some(j1) = self.j1 {
            if j1 < self.j0 {
                return Err(Error::InvalidParameter(format!("j1 = {j1} is below j0 = {}", self.j0)));
            }
        }
        if !(self.d_min > -0.5) || !(self.d_max < self.m as f64 - 0.5) || self.d_min >= self.d_max {
            return Err(Error::InvalidParameter(format!(
                "d bounds must satisfy -0.5 < d_min < d_max < M - 0.5 (got [{}, {}], M = {})",
                self.d_min, self.d_max, self.m
            )));
        }
        Ok(())
    }

    pub fn bank(&self) -> Result<ComplexFilterBank> {
        ComplexFilterBank::new(self.variant, self.m, self.l)
    }
}

#[derive(Debug, Clone)]
pub struct WhittleFit {
    pub d_hat: Vec<f64>,
    pub g_hat: CMatrix,
    pub theta_hat: CMatrix,
    pub omega_hat: DMatrix<f64>,
    pub phi_hat: DMatrix<f64>,
    pub rho_hat: DMatrix<f64>,
    /// `R(d̂)`.
    pub criterion: f64,
    pub iterations: usize,
    pub j0: usize,
    pub j1: usize,
    /// Total coefficient count `n = Σ n_j`.
    pub n: usize,
    /// `n_j` for `j = j0..=j1`.
    pub n_j: Vec<usize>,
}

/// Full pipeline on an `N × p` sample.
pub fn estimate(x: &DMatrix<f64>, cfg: &WhittleConfig) -> Result<WhittleFit> {
    cfg.validate()?;
    let bank = cfg.bank()?;
    estimate_with_bank(x, cfg, &bank)
}

/// [`estimate`] with a prebuilt filter bank.
pub fn estimate_with_bank(x: &DMatrix<f64>, cfg: &WhittleConfig, bank: &ComplexFilterBank) -> Result<WhittleFit> {
    cfg.validate()?;
    let n = x.nrows();
    let pyr = pyramid(x, bank, max_scale(n))?;
    let sc = scalogram(&pyr, false)?;
    let j1 = match cfg.j1 {
        Some(j1) => j1,
        None => pyr
            .deepest_scale_with(MIN_COEFFS_J1)
            .ok_or(Error::EmptyScales { j0: cfg.j0, j1: cfg.j0 })?,
    };
    if j1 < cfg.j0 {
        return Err(Error::EmptyScales { j0: cfg.j0, j1 });
    }
    if j1 >= usize::BITS as usize || n <= 1usize << j1 {
        return Err(Error::InputTooShort { n, required: (1usize << j1.min(62)) + 1 });
    }
    estimate_from_scalogram(&sc, cfg.j0, j1, cfg, &|delta| k_delta(delta, bank))
}

/// Minimizes `R` on a prepared scalogram; `k` supplies `K(δ)` for `Θ̂`.
pub fn estimate_from_scalogram(
    sc: &Scalogram,
    j0: usize,
    j1: usize,
    cfg: &WhittleConfig,
    k: &dyn Fn(f64) -> Result<f64>,
) -> Result<WhittleFit> {
    let p = sc.p;
    let (lo, hi) = (cfg.d_min, cfg.d_max);
    let to_d = |theta: f64| lo + (hi - lo) / (1.0 + (-theta).exp());
    let to_theta = |d: f64| {
        let u = ((d - lo) / (hi - lo)).clamp(1e-12, 1.0 - 1e-12);
        (u / (1.0 - u)).ln()
    };

    // Per-channel starting points from a grid search on the univariate criterion.
    let mut start = Vec::with_capacity(p);
    for a in 0..p {
        let sub = Scalogram {
            p: 1,
            matrices: sc.matrices.iter().map(|m| CMatrix::from_element(1, 1, m[(a, a)])).collect(),
            counts: sc.counts.clone(),
            centered: sc.centered,
        };
        let mut best = (f64::INFINITY, 0.5 * (lo + hi));
        for g in 0..START_GRID {
            let d = lo + (hi - lo) * (g as f64 + 0.5) / START_GRID as f64;
            if let Ok(r) = criterion(&[d], &sub, j0, j1) {
                if r < best.0 {
                    best = (r, d);
                }
            }
        }
        start.push(to_theta(best.1));
    }

    // Surface configuration errors before optimizing.
    scale_range(sc, j0, j1)?;
    let nm = NelderMead { max_iter: cfg.max_iter, f_tol: cfg.f_tol, x_tol: cfg.x_tol, initial_step: 0.2 };
    let objective = |theta: &[f64]| {
        let d: Vec<f64> = theta.iter().map(|&t| to_d(t)).collect();
        criterion(&d, sc, j0, j1).unwrap_or(f64::INFINITY)
    };
    let min = nm.minimize(objective, &start);
    let d_hat: Vec<f64> = min.x.iter().map(|&t| to_d(t)).collect();
    if !min.f.is_finite() {
        return Err(Error::SingularG);
    }
    if !min.converged {
        return Err(Error::OptimizerDidNotConverge { best: d_hat, iterations: min.iterations });
    }

    let g = g_hat(sc, &d_hat, j0, j1)?;
    let mut theta = CMatrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let kv = k(d_hat[a] + d_hat[b])?;
            let v = g[(a, b)] / kv;
            if a == b {
                theta[(a, a)] = Complex64::new(v.re, 0.0);
            } else {
                theta[(a, b)] = v;
                theta[(b, a)] = v.conj();
            }
        }
    }
    let omega = DMatrix::from_fn(p, p, |a, b| theta[(a, b)].norm());
    let phi = DMatrix::from_fn(p, p, |a, b| if a == b { 0.0 } else { theta[(a, b)].arg() });
    let rho = DMatrix::from_fn(p, p, |a, b| {
        if a == b {
            1.0
        } else {
            omega[(a, b)] / (omega[(a, a)] * omega[(b, b)]).sqrt()
        }
    });
    let upper = j1.min(sc.j_max());
    let n_j: Vec<usize> = (j0..=upper).map(|j| sc.n_j(j)).collect();
    Ok(WhittleFit {
        d_hat,
        g_hat: g,
        theta_hat: theta,
        omega_hat: omega,
        phi_hat: phi,
        rho_hat: rho,
        criterion: min.f,
        iterations: min.iterations,
        j0,
        j1,
        n: n_j.iter().sum(),
        n_j,
    })
}
