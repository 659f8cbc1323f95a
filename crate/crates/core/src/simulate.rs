//! Synthetic multivariate long-memory processes with known `(d, Θ)`.
//!
//! Two families are provided: ARFIMA(0, d, 0) driven by correlated Gaussian
//! noise, and multivariate fractional Brownian motion (mFBM) generated by
//! spectral synthesis of its increments. The mFBM generator is approximate:
//! the increment spectrum is folded over a finite number of harmonics and the
//! synthesis is circular.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg::{psd_sqrt, CMatrix};

/// Harmonics folded into the sampled mFBM increment spectrum.
pub const ALIAS_HARMONICS: i32 = 20;

/// Relative tolerance for positive semi-definiteness checks.
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Arfima0d0,
    Mfbm,
}

/// Target parameters of a simulated process: `Θ_{ℓm} = Ω_{ℓm} e^{iΦ_{ℓm}}`.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub d: Vec<f64>,
    pub omega: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    /// Short-range regularity exponent, informational.
    pub beta: Option<f64>,
    pub kind: ModelKind,
}

impl ModelSpec {
    /// ARFIMA(0, d, 0) with innovation covariance `Σ`: `Ω = Σ`,
    /// `Φ_{ℓm} = π(d_ℓ − d_m)/2`.
    pub fn arfima(d: &[f64], sigma: &DMatrix<f64>) -> Self {
        let p = d.len();
        ModelSpec {
            d: d.to_vec(),
            omega: sigma.clone(),
            phi: DMatrix::from_fn(p, p, |a, b| PI * (d[a] - d[b]) / 2.0),
            beta: Some(2.0),
            kind: ModelKind::Arfima0d0,
        }
    }

    pub fn mfbm(params: &MfbmParams) -> Result<Self> {
        let (omega, phi) = mfbm_theta(params)?;
        Ok(ModelSpec { d: params.d.clone(), omega, phi, beta: None, kind: ModelKind::Mfbm })
    }

    pub fn theta(&self) -> CMatrix {
        CMatrix::from_fn(self.d.len(), self.d.len(), |a, b| {
            Complex64::from_polar(self.omega[(a, b)], self.phi[(a, b)])
        })
    }

    /// Long-run correlation `Ω_{ℓm} / √(Ω_{ℓℓ} Ω_{mm})`.
    pub fn rho(&self) -> DMatrix<f64> {
        let o = &self.omega;
        DMatrix::from_fn(o.nrows(), o.ncols(), |a, b| o[(a, b)] / (o[(a, a)] * o[(b, b)]).sqrt())
    }
}

/// Parameters of a `p`-variate fractional Brownian motion with
/// `d ∈ (0.5, 1.5)^p` (Hurst exponents `d − 1/2`).
#[derive(Debug, Clone)]
pub struct MfbmParams {
    pub sigma: Vec<f64>,
    /// Symmetric, unit diagonal.
    pub r: DMatrix<f64>,
    /// Antisymmetric.
    pub eta: DMatrix<f64>,
    pub d: Vec<f64>,
}

impl MfbmParams {
    /// Two-channel parameters with unit `σ`.
    pub fn bivariate(d: [f64; 2], r12: f64, eta12: f64) -> Self {
        MfbmParams {
            sigma: vec![1.0, 1.0],
            r: DMatrix::from_row_slice(2, 2, &[1.0, r12, r12, 1.0]),
            eta: DMatrix::from_row_slice(2, 2, &[0.0, eta12, -eta12, 0.0]),
            d: d.to_vec(),
        }
    }

    pub fn p(&self) -> usize {
        self.d.len()
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        if p == 0 || self.sigma.len() != p {
            return Err(Error::DimensionMismatch { expected: p, found: self.sigma.len() });
        }
        for m in [&self.r, &self.eta] {
            if m.shape() != (p, p) {
                return Err(Error::DimensionMismatch { expected: p, found: m.nrows() });
            }
        }
        for &d in &self.d {
            if !(d > 0.5 && d < 1.5) {
                return Err(Error::InvalidD(d));
            }
        }
        if self.sigma.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidParameter("sigma must be positive".into()));
        }
        for a in 0..p {
            if (self.r[(a, a)] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter("r must have unit diagonal".into()));
            }
            for b in 0..p {
                if self.r[(a, b)].abs() > 1.0 || (self.r[(a, b)] - self.r[(b, a)]).abs() > 1e-12 {
                    return Err(Error::InvalidParameter("r must be symmetric with |r| <= 1".into()));
                }
                if (self.eta[(a, b)] + self.eta[(b, a)]).abs() > 1e-12 {
                    return Err(Error::InvalidParameter("eta must be antisymmetric".into()));
                }
            }
        }
        Ok(())
    }
}

/// Closed-form `(Ω, Φ)` of an mFBM, i.e. the low-frequency behaviour
/// `f^{(1,1)}_{ℓm}(λ) ~ Ω_{ℓm} e^{iΦ_{ℓm}} |λ|^{-(d_ℓ + d_m − 2)}` of its
/// increments.
pub fn mfbm_theta(params: &MfbmParams) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    params.validate()?;
    let p = params.p();
    let mut omega = DMatrix::zeros(p, p);
    let mut phi = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in 0..p {
            let s = params.d[a] + params.d[b];
            let r = params.r[(a, b)];
            let eta = params.eta[(a, b)];
            let scale = params.sigma[a] * params.sigma[b] * gamma(s);
            let (om, ph) = if s == 2.0 {
                let t = PI / 2.0;
                (scale * (r * r + eta * eta * t * t).sqrt(), atan_ratio(eta, r, t))
            } else {
                let c = (PI * s / 2.0).cos();
                let sn = (PI * s / 2.0).sin();
                (
                    scale * (r * r * c * c + eta * eta * sn * sn).sqrt(),
                    atan_ratio(eta, r, (PI * s / 2.0).tan()),
                )
            };
            omega[(a, b)] = om;
            phi[(a, b)] = ph;
        }
    }
    Ok((omega, phi))
}

/// `atan(η/r · t)` with `0/0` read as zero.
fn atan_ratio(eta: f64, r: f64, t: f64) -> f64 {
    if eta == 0.0 || t == 0.0 {
        0.0
    } else {
        (eta / r * t).atan()
    }
}

fn check_sigma(sigma: &DMatrix<f64>, p: usize) -> Result<DMatrix<f64>> {
    if sigma.shape() != (p, p) {
        return Err(Error::DimensionMismatch { expected: p, found: sigma.nrows() });
    }
    if sigma.iter().any(|v| !v.is_finite()) || (sigma - sigma.transpose()).amax() > 1e-12 * (1.0 + sigma.amax()) {
        return Err(Error::NonPsdSigma);
    }
    let eig = sigma.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1e-300);
    if eig.eigenvalues.iter().any(|&v| v < -PSD_TOL * scale) {
        return Err(Error::NonPsdSigma);
    }
    let root = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    Ok(&eig.eigenvectors * root * eig.eigenvectors.transpose())
}

/// MA(∞) coefficients of `(1 − 𝕃)^{-d}`: `π_0 = 1`, `π_k = π_{k−1}(k − 1 + d)/k`.
pub fn frac_ma_coeffs(d: f64, len: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(len);
    let mut v = 1.0;
    for k in 0..len {
        if k > 0 {
            v *= (k as f64 - 1.0 + d) / k as f64;
        }
        c.push(v);
    }
    c
}

/// Linear convolution of `a` and `b`, truncated to `out_len` samples.
fn fft_convolve(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    let size = (a.len() + b.len()).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |x: &[f64]| {
        let mut v: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        v.resize(size, Complex64::new(0.0, 0.0));
        v
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    fa.iter().take(out_len).map(|z| z.re / size as f64).collect()
}

/// Minimum sample size accepted by [`sim_arfima0d0`].
pub const MIN_ARFIMA_N: usize = 64;

/// ARFIMA(0, d, 0): `X_ℓ = (1 − 𝕃)^{-d_ℓ} u_ℓ` with `u ~ iid N(0, Σ)`.
///
/// The fractional filter is truncated to `4N` coefficients and `4N` leading
/// samples are discarded. For `d_ℓ ≥ 1/2` the stationary series of order
/// `d_ℓ − D` is integrated `D = ⌊d_ℓ + 1/2⌋` times.
pub fn sim_arfima0d0(n: usize, d: &[f64], sigma: &DMatrix<f64>, seed: u64) -> Result<DMatrix<f64>> {
    if n < MIN_ARFIMA_N {
        return Err(Error::InputTooShort { n, required: MIN_ARFIMA_N });
    }
    let p = d.len();
    if let Some(&bad) = d.iter().find(|&&x| !(x > -0.5) || !x.is_finite()) {
        return Err(Error::InvalidD(bad));
    }
    let root = check_sigma(sigma, p)?;
    let burn = 4 * n;
    let total = n + burn;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let white = DMatrix::<f64>::from_fn(total, p, |_, _| StandardNormal.sample(&mut rng));
    let u = white * root.transpose();

    let mut out = DMatrix::zeros(n, p);
    for c in 0..p {
        let integ = (d[c] + 0.5).floor().max(0.0) as usize;
        let frac = d[c] - integ as f64;
        let col: Vec<f64> = u.column(c).iter().copied().collect();
        let mut y = fft_convolve(&col, &frac_ma_coeffs(frac, 4 * n), total);
        y.drain(..burn);
        for _ in 0..integ {
            let mut acc = 0.0;
            for v in y.iter_mut() {
                acc += *v;
                *v = acc;
            }
        }
        out.set_column(c, &nalgebra::DVector::from_vec(y));
    }
    Ok(out)
}

/// Folded increment spectral matrix of an mFBM at `λ ∈ [0, π]`, with
/// `γ(h) = (1/2π) ∫_{-π}^{π} f(λ) e^{iλh} dλ`.
pub fn mfbm_increment_spectrum(omega: &DMatrix<f64>, phi: &DMatrix<f64>, d: &[f64], lambda: f64) -> CMatrix {
    let p = d.len();
    let one_minus_cos = 1.0 - lambda.cos();
    CMatrix::from_fn(p, p, |a, b| {
        let s = d[a] + d[b];
        let mut acc = Complex64::new(0.0, 0.0);
        for t in -ALIAS_HARMONICS..=ALIAS_HARMONICS {
            let nu = lambda + 2.0 * PI * t as f64;
            if nu == 0.0 {
                continue;
            }
            let phase = -phi[(a, b)] * nu.signum();
            acc += Complex64::from_polar(2.0 * omega[(a, b)] * one_minus_cos * nu.abs().powf(-s), phase);
        }
        acc
    })
}

/// mFBM path of length `N` (a power of two, at least 256) by circular
/// spectral synthesis of its increments followed by a cumulative sum.
pub fn sim_mfbm(n: usize, params: &MfbmParams, seed: u64) -> Result<DMatrix<f64>> {
    if n < 256 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("N must be a power of two >= 256 (got {n})")));
    }
    let (omega, phi) = mfbm_theta(params)?;
    let p = params.p();
    let half = n / 2;

    // Square roots of the spectral matrices on 0 < λ_k ≤ π.
    let roots: Vec<CMatrix> = (1..=half)
        .map(|k| {
            let lambda = 2.0 * PI * k as f64 / n as f64;
            let mut f = mfbm_increment_spectrum(&omega, &phi, &params.d, lambda);
            if k == half {
                f = f.map(|z| Complex64::new(z.re, 0.0));
            }
            psd_sqrt(&f, PSD_TOL).ok_or(Error::NonPsdSpectrum { lambda })
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut spectra = vec![vec![Complex64::new(0.0, 0.0); n]; p];
    for k in 1..=half {
        let z: Vec<Complex64> = if k == half {
            (0..p).map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0)).collect()
        } else {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            (0..p)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * s, im * s)
                })
                .collect()
        };
        let root = &roots[k - 1];
        for a in 0..p {
            let v: Complex64 = (0..p).map(|b| root[(a, b)] * z[b]).sum();
            spectra[a][k] = v;
            if k != half {
                spectra[a][n - k] = v.conj();
            }
        }
    }

    let inv = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let norm = 1.0 / (n as f64).sqrt();
    let mut out = DMatrix::zeros(n, p);
    for (a, spec) in spectra.iter_mut().enumerate() {
        inv.process(spec);
        let mut acc = 0.0;
        for t in 0..n {
            acc += spec[t].re * norm;
            out[(t, a)] = acc;
        }
    }
    Ok(out)
}
