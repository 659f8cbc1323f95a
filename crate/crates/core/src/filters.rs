//! Common-factor wavelet filter banks and their frequency-domain quantities.
//!
//! Filters are stored as real taps with a signed starting index, so that
//! `response(λ) = Σ_n h[n] e^{-iλn}`. The scaling functions and wavelets are
//! the normalized infinite products
//!
//! ```text
//! φ̂_h(λ) = 2^{-1/2} Π_{j≥1} 2^{-1/2} ĥ_L(2^{-j} λ)
//! ψ̂_h(λ) = 2^{-1} ĥ_H(λ/2) φ̂_h(λ/2)
//! ```
//!
//! and likewise for the `g` branch; `ψ̂ = ψ̂_h + i ψ̂_g` is concentrated on
//! positive frequencies.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest M + L accepted by the perfect-reconstruction builder.
pub const MAX_PR_ORDER: usize = 12;

/// Largest |λ| at which the infinite products are evaluated.
pub const MAX_LAMBDA: f64 = 1_048_576.0;

const TAP_RESIDUAL_TOL: f64 = 1e-10;
const PR_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Common-factor wavelets with `q̂ = 1`.
    CfwC,
    /// Common-factor wavelets satisfying perfect reconstruction.
    CfwPr,
    /// Real Daubechies wavelets with M vanishing moments (`L` is ignored).
    Daubechies,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::CfwC => "cfw-c",
            Variant::CfwPr => "cfw-pr",
            Variant::Daubechies => "daubechies",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cfw-c" | "cfwc" | "c" => Ok(Variant::CfwC),
            "cfw-pr" | "cfwpr" | "pr" => Ok(Variant::CfwPr),
            "daubechies" | "db" => Ok(Variant::Daubechies),
            other => Err(Error::InvalidParameter(format!("unknown filter '{other}'"))),
        }
    }
}

/// A real FIR filter `h[offset], …, h[offset + len - 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filter {
    pub offset: i64,
    pub taps: Vec<f64>,
}

impl Filter {
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// `Σ_n h[n] e^{-iλn}`.
    pub fn response(&self, lambda: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, -lambda);
        let mut acc = Complex64::new(0.0, 0.0);
        for &t in self.taps.iter().rev() {
            acc = acc * z + t;
        }
        acc * Complex64::from_polar(1.0, -lambda * self.offset as f64)
    }

    /// Center of mass `Σ n h[n] / Σ h[n]`, the first-order phase slope at 0.
    pub fn centroid(&self) -> f64 {
        let s: f64 = self.taps.iter().sum();
        let m: f64 = self
            .taps
            .iter()
            .enumerate()
            .map(|(k, &t)| (self.offset + k as i64) as f64 * t)
            .sum();
        m / s
    }
}

/// The four real filters of a dual-tree bank.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexFilterBank {
    pub m: usize,
    pub l: usize,
    pub variant: Variant,
    pub h_low: Filter,
    pub h_high: Filter,
    pub g_low: Filter,
    pub g_high: Filter,
    /// Length of the scaling-function support, equal to the tap count.
    pub support_length: usize,
    centroid_h: f64,
    centroid_g: f64,
}

impl ComplexFilterBank {
    /// Builds the bank named by `variant`.
    pub fn new(variant: Variant, m: usize, l: usize) -> Result<Self> {
        match variant {
            Variant::CfwC => build_cfw_c(m, l),
            Variant::CfwPr => build_cfw_pr(m, l),
            Variant::Daubechies => build_daubechies(m),
        }
    }

    /// Whether the `g` branch is the approximate Hilbert pair of the `h` branch.
    pub fn is_analytic(&self) -> bool {
        self.variant != Variant::Daubechies
    }

    /// Multiplier in front of `∫₀^∞ λ^{-δ}|ψ̂_h|²` in the scale normalization.
    pub fn k_factor(&self) -> f64 {
        if self.is_analytic() {
            4.0
        } else {
            2.0
        }
    }

    pub fn phi_h(&self, lambda: f64) -> Complex64 {
        scaling_product(&self.h_low, self.centroid_h, lambda)
    }

    pub fn phi_g(&self, lambda: f64) -> Complex64 {
        scaling_product(&self.g_low, self.centroid_g, lambda)
    }

    pub fn psi_h(&self, lambda: f64) -> Complex64 {
        0.5 * high_pass_response(&self.h_high, self.m, lambda / 2.0) * self.phi_h(lambda / 2.0)
    }

    pub fn psi_g(&self, lambda: f64) -> Complex64 {
        0.5 * high_pass_response(&self.g_high, self.m, lambda / 2.0) * self.phi_g(lambda / 2.0)
    }

    /// `φ̂ = φ̂_h + i φ̂_g` (just `φ̂_h` for a real bank).
    pub fn phi_hat(&self, lambda: f64) -> Complex64 {
        if self.is_analytic() {
            self.phi_h(lambda) + Complex64::i() * self.phi_g(lambda)
        } else {
            self.phi_h(lambda)
        }
    }

    /// `(ψ̂_h, ψ̂_g, ψ̂)` at `λ`.
    pub fn psi_hat_parts(&self, lambda: f64) -> (Complex64, Complex64, Complex64) {
        let h = self.psi_h(lambda);
        if !self.is_analytic() {
            return (h, Complex64::new(0.0, 0.0), h);
        }
        let g = self.psi_g(lambda);
        (h, g, h + Complex64::i() * g)
    }

    pub fn psi_hat(&self, lambda: f64) -> Complex64 {
        self.psi_hat_parts(lambda).2
    }

    /// `|ψ̂(λ) − 2·1{λ>0}·ψ̂_h(λ)| / |ψ̂_h(λ)|`.
    pub fn analyticity_defect(&self, lambda: f64) -> Result<f64> {
        let (h, _, psi) = self.psi_hat_parts(lambda);
        if h.norm() < 1e-14 {
            return Err(Error::DegenerateDenominator { lambda });
        }
        let target = if lambda > 0.0 { 2.0 * h } else { Complex64::new(0.0, 0.0) };
        Ok((psi - target).norm() / h.norm())
    }

    /// Frequency response of the scale-`j` analysis cascade of one branch,
    /// `Ĥ_H(2^{j-1}λ) Π_{i<j-1} Ĥ_L(2^i λ)`.
    pub fn cascade_response(&self, branch: Branch, j: usize, lambda: f64) -> Complex64 {
        assert!(j >= 1, "scale index starts at 1");
        let (low, high) = match branch {
            Branch::H => (&self.h_low, &self.h_high),
            Branch::G => (&self.g_low, &self.g_high),
        };
        let mut acc = high.response(2f64.powi(j as i32 - 1) * lambda);
        for i in 0..j - 1 {
            acc *= low.response(2f64.powi(i as i32) * lambda);
        }
        acc
    }

    /// Time-domain taps of the scale-`j` cascade of one branch, obtained by
    /// upsampled polynomial convolution. Index 0 of the result is tap
    /// `offset`.
    pub fn cascade_taps(&self, branch: Branch, j: usize) -> Filter {
        assert!(j >= 1, "scale index starts at 1");
        let (low, high) = match branch {
            Branch::H => (&self.h_low, &self.h_high),
            Branch::G => (&self.g_low, &self.g_high),
        };
        let mut acc = Filter { offset: 0, taps: vec![1.0] };
        for i in 0..j - 1 {
            acc = convolve(&acc, &upsample(low, 1 << i));
        }
        convolve(&acc, &upsample(high, 1 << (j - 1)))
    }

    /// Periodized energy `Σ_k |φ̂_branch(λ + 2kπ)|²` truncated at `|k| ≤ k_max`.
    pub fn phi_periodized_energy(&self, branch: Branch, lambda: f64, k_max: i64) -> f64 {
        (-k_max..=k_max)
            .map(|k| {
                let x = lambda + 2.0 * PI * k as f64;
                match branch {
                    Branch::H => self.phi_h(x).norm_sqr(),
                    Branch::G => self.phi_g(x).norm_sqr(),
                }
            })
            .sum()
    }

    /// `2^{j/2} Σ_{|k|≤k_max} φ̂(λ+2kπ) conj(ψ̂(2^j(λ+2kπ)))`.
    pub fn tau_hat(&self, j: usize, lambda: f64, k_max: i64) -> Complex64 {
        let scale = 2f64.powi(j as i32);
        let s: Complex64 = (-k_max..=k_max)
            .map(|k| {
                let x = lambda + 2.0 * PI * k as f64;
                self.phi_hat(x) * self.psi_hat(scale * x).conj()
            })
            .sum();
        scale.sqrt() * s
    }

    /// Single-branch version of [`tau_hat`](Self::tau_hat), real in time.
    pub fn tau_hat_branch(&self, branch: Branch, j: usize, lambda: f64, k_max: i64) -> Complex64 {
        let scale = 2f64.powi(j as i32);
        let s: Complex64 = (-k_max..=k_max)
            .map(|k| {
                let x = lambda + 2.0 * PI * k as f64;
                match branch {
                    Branch::H => self.phi_h(x) * self.psi_h(scale * x).conj(),
                    Branch::G => self.phi_g(x) * self.psi_g(scale * x).conj(),
                }
            })
            .sum();
        scale.sqrt() * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    H,
    G,
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// The common factor `d̂_L(λ) = e^{iλ(1/4 − L/2)}[cos^{2L+1}(λ/4) + i(−1)^{L+1} sin^{2L+1}(λ/4)]`.
pub fn d_hat_l(lambda: f64, l: usize) -> Complex64 {
    let e = 2 * l as i32 + 1;
    let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
    let inner = Complex64::new((lambda / 4.0).cos().powi(e), sign * (lambda / 4.0).sin().powi(e));
    Complex64::from_polar(1.0, lambda * (0.25 - l as f64 / 2.0)) * inner
}

/// `2^{-M+1/2}(1 + e^{-iλ})^M`.
fn binomial_factor(lambda: f64, m: usize) -> Complex64 {
    let base = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -lambda);
    2f64.powf(-(m as f64) + 0.5) * base.powi(m as i32)
}

/// Number of product factors used at `λ`: `max(30, ⌈log2|λ|⌉ + 30)`.
pub fn product_depth(lambda: f64) -> u32 {
    let a = lambda.abs();
    if a <= 1.0 {
        30
    } else {
        30.max(a.log2().ceil() as u32 + 30)
    }
}

/// Response of a high-pass filter with `m` zeros at `z = 1`, evaluated as
/// `(1 − e^{-iλ})^m Q(e^{-iλ})` so that it keeps full relative accuracy
/// near `λ = 0`.
fn high_pass_response(high: &Filter, m: usize, lambda: f64) -> Complex64 {
    let mut q = high.taps.clone();
    for _ in 0..m {
        let mut acc = 0.0;
        for v in q.iter_mut() {
            acc += *v;
            *v = acc;
        }
        q.pop();
    }
    let deflated = Filter { offset: high.offset, taps: q };
    let zero = Complex64::new(0.0, 2.0 * (lambda / 2.0).sin()) * Complex64::from_polar(1.0, -lambda / 2.0);
    zero.powu(m as u32) * deflated.response(lambda)
}

/// `2^{-1/2} Π_{j≥1} 2^{-1/2} Ĥ(2^{-j}λ)`; the omitted factors are replaced by
/// their first-order phase `e^{-i c 2^{-J} λ}`.
fn scaling_product(low: &Filter, centroid: f64, lambda: f64) -> Complex64 {
    let depth = product_depth(lambda);
    let mut acc = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut w = lambda;
    for _ in 0..depth {
        w *= 0.5;
        acc *= FRAC_1_SQRT_2 * low.response(w);
    }
    acc * Complex64::from_polar(1.0, -centroid * w)
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Common-factor bank with `q̂ = 1`: `M + L + 1` taps per filter.
pub fn build_cfw_c(m: usize, l: usize) -> Result<ComplexFilterBank> {
    if m < 2 || l < 1 {
        return Err(Error::InvalidParameter(format!(
            "CFW-C needs M >= 2 and L >= 1 (got M={m}, L={l})"
        )));
    }
    assemble(Variant::CfwC, m, l, &[1.0])
}

/// Common-factor bank whose `q̂` enforces `|ĥ_L(λ)|² + |ĥ_L(λ+π)|² = 2`.
pub fn build_cfw_pr(m: usize, l: usize) -> Result<ComplexFilterBank> {
    if m < 2 || l < 1 {
        return Err(Error::InvalidParameter(format!(
            "CFW-PR needs M >= 2 and L >= 1 (got M={m}, L={l})"
        )));
    }
    if m + l > MAX_PR_ORDER {
        return Err(Error::InvalidParameter(format!(
            "CFW-PR root finding is limited to M + L <= {MAX_PR_ORDER}"
        )));
    }
    let q = pr_q_filter(m, l)?;
    let bank = assemble(Variant::CfwPr, m, l, &q)?;
    let residual = pr_residual(&bank.h_low, 1024).max(pr_residual(&bank.g_low, 1024));
    if residual > PR_RESIDUAL_TOL {
        return Err(Error::FactorizationFailed(format!(
            "perfect-reconstruction residual {residual:.3e}"
        )));
    }
    Ok(bank)
}

/// Daubechies' extremal-phase bank with `M` vanishing moments (`2M` taps).
/// The `g` filters duplicate the `h` filters and are unused.
pub fn build_daubechies(m: usize) -> Result<ComplexFilterBank> {
    if !(1..=MAX_PR_ORDER).contains(&m) {
        return Err(Error::InvalidParameter(format!("Daubechies needs 1 <= M <= {MAX_PR_ORDER}")));
    }
    let q = pr_q_filter(m, 0)?;
    let mut bank = assemble(Variant::Daubechies, m, 0, &q)?;
    bank.g_low = bank.h_low.clone();
    bank.g_high = bank.h_high.clone();
    bank.centroid_g = bank.centroid_h;
    Ok(bank)
}

/// `max_λ | |ĥ(λ)|² + |ĥ(λ+π)|² − 2 |` on an `n`-point grid.
pub fn pr_residual(low: &Filter, n: usize) -> f64 {
    (0..n)
        .map(|k| {
            let x = 2.0 * PI * k as f64 / n as f64;
            (low.response(x).norm_sqr() + low.response(x + PI).norm_sqr() - 2.0).abs()
        })
        .fold(0.0, f64::max)
}

fn assemble(variant: Variant, m: usize, l: usize, q: &[f64]) -> Result<ComplexFilterBank> {
    let t = m + l + q.len();
    let q_filter = Filter { offset: 0, taps: q.to_vec() };
    let qv = |x: f64| q_filter.response(x);
    let hl = |x: f64| binomial_factor(x, m) * qv(x) * d_hat_l(x, l);
    let gl = |x: f64| {
        binomial_factor(x, m) * qv(x) * d_hat_l(x, l).conj() * Complex64::from_polar(1.0, -x * l as f64)
    };
    let hh = |x: f64| hl(x + PI).conj() * Complex64::from_polar(1.0, -x);
    let gh = |x: f64| gl(x + PI).conj() * Complex64::from_polar(1.0, -x);

    let h_low = taps_from_response(hl, t)?;
    let h_high = taps_from_response(hh, t)?;
    let g_low = taps_from_response(gl, t)?;
    let g_high = taps_from_response(gh, t)?;
    let centroid_h = h_low.centroid();
    let centroid_g = g_low.centroid();
    Ok(ComplexFilterBank {
        m,
        l,
        variant,
        h_low,
        h_high,
        g_low,
        g_high,
        support_length: t,
        centroid_h,
        centroid_g,
    })
}

/// Inverse DFT of a sampled response, keeping the `t` contiguous taps of
/// largest energy.
fn taps_from_response(f: impl Fn(f64) -> Complex64, t: usize) -> Result<Filter> {
    let n = (8 * t).next_power_of_two();
    let mut buf: Vec<Complex64> = (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    for v in buf.iter_mut() {
        *v /= n as f64;
    }
    let energy: Vec<f64> = buf.iter().map(|v| v.norm_sqr()).collect();
    let total: f64 = energy.iter().sum();
    let window = |s: usize| (0..t).map(|i| energy[(s + i) % n]).sum::<f64>();
    let start = (0..n)
        .max_by(|&a, &b| window(a).total_cmp(&window(b)))
        .expect("non-empty grid");
    let taps: Vec<Complex64> = (0..t).map(|i| buf[(start + i) % n]).collect();
    let imag: f64 = taps.iter().map(|v| v.im * v.im).sum();
    let residual = (total - window(start) + imag) / total.max(f64::MIN_POSITIVE);
    if residual > TAP_RESIDUAL_TOL {
        return Err(Error::NumericalResidual { residual });
    }
    let offset = if start > n / 2 { start as i64 - n as i64 } else { start as i64 };
    Ok(Filter { offset, taps: taps.iter().map(|v| v.re).collect() })
}

/// `|d̂_L|²` as a function of `y = sin²(λ/2)`.
fn d_energy(y: f64, l: usize) -> f64 {
    let u = (1.0 - y).max(0.0).sqrt();
    let e = 2 * l as i32 + 1;
    ((1.0 + u) / 2.0).powi(e) + ((1.0 - u) / 2.0).powi(e)
}

/// Solves `Q(y)(1−y)^M D(y) + Q(1−y) y^M D(1−y) = 1` for `Q` of degree
/// `M+L−1`, then returns the minimum-phase `q̂` with `|q̂|² = Q`, `q̂(0) = 1`.
fn pr_q_filter(m: usize, l: usize) -> Result<Vec<f64>> {
    let k = m + l; // number of unknown coefficients
    let rows = 4 * k + 8;
    let mut a = DMatrix::<f64>::zeros(rows, k);
    let b = DVector::<f64>::from_element(rows, 1.0);
    for r in 0..rows {
        // Chebyshev points mapped to [0, 1]
        let y = 0.5 - 0.5 * (PI * (r as f64 + 0.5) / rows as f64).cos();
        let p1 = (1.0 - y).powi(m as i32) * d_energy(y, l);
        let p2 = y.powi(m as i32) * d_energy(1.0 - y, l);
        for c in 0..k {
            a[(r, c)] = y.powi(c as i32) * p1 + (1.0 - y).powi(c as i32) * p2;
        }
    }
    let coeffs = a
        .svd(true, true)
        .solve(&b, 1e-13)
        .map_err(|e| Error::FactorizationFailed(e.to_string()))?;
    let q_of = |y: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c);
    if (0..=400).any(|i| q_of(i as f64 / 400.0) < -1e-12) {
        return Err(Error::FactorizationFailed("Bezout solution is not nonnegative".into()));
    }

    // Trim vanishing leading coefficients before root finding.
    let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut deg = k - 1;
    while deg > 0 && coeffs[deg].abs() < 1e-14 * scale {
        deg -= 1;
    }
    let mut roots_z: Vec<Complex64> = Vec::with_capacity(deg);
    if deg > 0 {
        let mut comp = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            comp[(i, deg - 1)] = -coeffs[i] / coeffs[deg];
        }
        for y in comp.complex_eigenvalues().iter() {
            // y = (2 − z − 1/z)/4  ⇔  z² − (2 − 4y) z + 1 = 0
            let bq = Complex64::new(2.0, 0.0) - 4.0 * y;
            let disc = (bq * bq - 4.0).sqrt();
            let z1 = (bq + disc) / 2.0;
            let z2 = (bq - disc) / 2.0;
            let r = if z1.norm() < z2.norm() { z1 } else { z2 };
            if (r.norm() - 1.0).abs() < 1e-9 {
                return Err(Error::FactorizationFailed("root on the unit circle".into()));
            }
            roots_z.push(r);
        }
    }
    // q̂(λ) ∝ Π (1 − r e^{−iλ}); expand in powers of e^{−iλ}.
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in &roots_z {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        poly = next;
    }
    let norm: Complex64 = poly.iter().sum();
    let q: Vec<f64> = poly.iter().map(|c| (c / norm).re).collect();
    let imag = poly.iter().map(|c| (c / norm).im.abs()).fold(0.0, f64::max);
    if imag > 1e-8 {
        return Err(Error::FactorizationFailed(format!("complex factor (imag {imag:.2e})")));
    }
    Ok(q)
}

fn upsample(f: &Filter, factor: usize) -> Filter {
    let mut taps = vec![0.0; (f.len() - 1) * factor + 1];
    for (i, &t) in f.taps.iter().enumerate() {
        taps[i * factor] = t;
    }
    Filter { offset: f.offset * factor as i64, taps }
}

fn convolve(a: &Filter, b: &Filter) -> Filter {
    let mut taps = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.taps.iter().enumerate() {
        for (k, &y) in b.taps.iter().enumerate() {
            taps[i + k] += x * y;
        }
    }
    Filter { offset: a.offset + b.offset, taps }
}

/// Samples of a complex function on a strictly increasing grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrequencyResponse {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn sample(grid: Vec<f64>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.iter().map(|&x| f(x)).collect();
        FrequencyResponse { grid, values }
    }
}

/// `n` equispaced points covering `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Right-hand side of the analyticity bound:
/// `2√2 (log2(max(4π,|λ|)/2π) + 2)(1 − dist(λ, 4πℤ)/max(4π,|λ|))^{2L+1}`.
pub fn analyticity_bound(lambda: f64, l: usize) -> f64 {
    let big = (4.0 * PI).max(lambda.abs());
    let period = 4.0 * PI;
    let r = lambda.rem_euclid(period);
    let dist = r.min(period - r);
    2.0 * 2f64.sqrt() * ((big / (2.0 * PI)).log2() + 2.0) * (1.0 - dist / big).powi(2 * l as i32 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cfw_c_tap_counts() {
        let b = build_cfw_c(4, 4).unwrap();
        assert_eq!(b.support_length, 9);
        for f in [&b.h_low, &b.h_high, &b.g_low, &b.g_high] {
            assert_eq!(f.len(), 9);
        }
    }

    #[test]
    fn low_pass_dc_gain() {
        let b = build_cfw_c(2, 1).unwrap();
        assert!((b.h_low.response(0.0).re - 2f64.sqrt()).abs() < 1e-12);
        let b = build_cfw_c(4, 4).unwrap();
        assert!((b.g_low.response(0.0).re - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_orders() {
        assert!(build_cfw_c(1, 1).is_err());
        assert!(build_cfw_c(2, 0).is_err());
        assert!(build_cfw_pr(10, 4).is_err());
    }

    #[test]
    fn cascade_taps_match_response() {
        let b = build_cfw_c(2, 2).unwrap();
        for j in 1..=3 {
            let f = b.cascade_taps(Branch::G, j);
            for &x in &[0.3, 1.1, -2.0] {
                let d = f.response(x) - b.cascade_response(Branch::G, j, x);
                assert!(d.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn scaling_function_at_origin() {
        let b = build_cfw_c(4, 4).unwrap();
        let p = b.phi_hat(0.0);
        assert!((p.re - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((p.im - FRAC_1_SQRT_2).abs() < 1e-14);
    }
}
