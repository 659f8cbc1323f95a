//! Decimated dual-tree wavelet pyramid.
//!
//! Each channel runs two real Mallat cascades (`h` and `g` filters) and the
//! outputs are combined as `W = c·(W_h + i W_g)`. With 1-based samples,
//! coefficient `(j, k)`, `k ≥ 1`, reads samples `2^j k … 2^j k + T_j − 1`
//! where `T_j = (2^j − 1)(T − 1) + 1` is the length of the equivalent
//! scale-`j` filter; only fully supported coefficients are kept.
//!
//! The constant `c = √(π/2)` makes `2^{-j(d_ℓ+d_m)} E[W_ℓ conj(W_m)]` tend
//! to `Θ_{ℓm} K(d_ℓ + d_m)` when the spectral density behaves like
//! `Θ_{ℓm} |λ|^{-d_ℓ-d_m}` near zero, with `γ(h) = (1/2π)∫ f(λ) e^{iλh} dλ`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::ComplexFilterBank;

/// Normalization applied to every coefficient.
pub const COEFF_SCALE: f64 = 1.253_314_137_315_500_3; // sqrt(pi / 2)

#[derive(Debug, Clone)]
pub struct WaveletPyramid {
    /// Number of input samples.
    pub n: usize,
    /// Number of channels.
    pub p: usize,
    /// `scales[j - 1]` is the `n_j × p` coefficient matrix at scale `j`.
    pub scales: Vec<DMatrix<Complex64>>,
    /// Filter length `T` of the bank that produced the pyramid.
    pub support_length: usize,
}

impl WaveletPyramid {
    pub fn j_max(&self) -> usize {
        self.scales.len()
    }

    /// Coefficients at scale `j` (1-based).
    pub fn coeffs(&self, j: usize) -> &DMatrix<Complex64> {
        &self.scales[j - 1]
    }

    pub fn n_j(&self, j: usize) -> usize {
        self.scales.get(j.wrapping_sub(1)).map_or(0, |m| m.nrows())
    }

    /// Largest scale holding at least `min_count` coefficients.
    pub fn deepest_scale_with(&self, min_count: usize) -> Option<usize> {
        (1..=self.j_max()).rev().find(|&j| self.n_j(j) >= min_count)
    }
}

/// Length `(2^j − 1)(T − 1) + 1` of the equivalent scale-`j` filter.
pub fn equivalent_length(j: usize, t: usize) -> usize {
    ((1usize << j) - 1) * (t - 1) + 1
}

/// Number of fully supported coefficients at scale `j`:
/// `max(0, ⌊(N − T_j + 1) / 2^j⌋)`.
pub fn n_coeffs(n: usize, j: usize, t: usize) -> usize {
    let tj = equivalent_length(j, t);
    if n + 1 < tj {
        0
    } else {
        (n + 1 - tj) >> j
    }
}

/// Largest usable scale for a series of length `n`: `⌊log2 n⌋`.
pub fn max_scale(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize
    }
}

/// One analysis step: `out[k-1] = Σ_i f[i] a[2k + i - 1]` for `k = 1, 2, …`.
fn analysis_step(a: &[f64], f: &[f64]) -> Vec<f64> {
    let t = f.len();
    if a.len() + 1 < t {
        return Vec::new();
    }
    let n_out = (a.len() + 1 - t) / 2;
    (1..=n_out)
        .map(|k| {
            let base = 2 * k - 1;
            f.iter().zip(&a[base..base + t]).map(|(x, y)| x * y).sum()
        })
        .collect()
}

/// Detail coefficients of one real cascade at scales `1..=j_max`.
fn cascade(x: &[f64], low: &[f64], high: &[f64], j_max: usize) -> Vec<Vec<f64>> {
    let mut approx = x.to_vec();
    let mut out = Vec::with_capacity(j_max);
    for _ in 0..j_max {
        out.push(analysis_step(&approx, high));
        approx = analysis_step(&approx, low);
    }
    out
}

/// Complex wavelet pyramid of the `N × p` matrix `x` up to scale `j_max`.
pub fn pyramid(x: &DMatrix<f64>, bank: &ComplexFilterBank, j_max: usize) -> Result<WaveletPyramid> {
    let (n, p) = x.shape();
    let t = bank.support_length;
    if n <= t {
        return Err(Error::InputTooShort { n, required: t + 1 });
    }
    if p == 0 {
        return Err(Error::InvalidParameter("input has no channels".into()));
    }
    if j_max == 0 || j_max > max_scale(n) {
        return Err(Error::InvalidParameter(format!(
            "j_max must lie in [1, {}] for N = {n}",
            max_scale(n)
        )));
    }
    for c in 0..p {
        for r in 0..n {
            if !x[(r, c)].is_finite() {
                return Err(Error::NonFiniteInput { row: r, col: c });
            }
        }
    }

    let analytic = bank.is_analytic();
    let per_channel: Vec<(Vec<Vec<f64>>, Option<Vec<Vec<f64>>>)> = (0..p)
        .into_par_iter()
        .map(|c| {
            let col: Vec<f64> = x.column(c).iter().copied().collect();
            let h = cascade(&col, &bank.h_low.taps, &bank.h_high.taps, j_max);
            let g = analytic.then(|| cascade(&col, &bank.g_low.taps, &bank.g_high.taps, j_max));
            (h, g)
        })
        .collect();

    let scales = (0..j_max)
        .map(|s| {
            let nj = per_channel[0].0[s].len();
            debug_assert_eq!(nj, n_coeffs(n, s + 1, t));
            DMatrix::from_fn(nj, p, |k, c| {
                let (h, g) = &per_channel[c];
                let im = g.as_ref().map_or(0.0, |g| g[s][k]);
                COEFF_SCALE * Complex64::new(h[s][k], im)
            })
        })
        .collect();
    Ok(WaveletPyramid { n, p, scales, support_length: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::build_cfw_c;

    #[test]
    fn count_examples() {
        assert_eq!(n_coeffs(4096, 1, 9), 2044);
        assert_eq!(n_coeffs(9, 1, 9), 0);
        assert_eq!(n_coeffs(4096, 12, 9), 0);
        assert_eq!(max_scale(4096), 12);
        assert_eq!(max_scale(4095), 11);
    }

    #[test]
    fn pyramid_counts_follow_formula() {
        let bank = build_cfw_c(4, 4).unwrap();
        let x = DMatrix::from_fn(1000, 1, |i, _| ((i * 7919) % 101) as f64);
        let pyr = pyramid(&x, &bank, 9).unwrap();
        for j in 1..=9 {
            assert_eq!(pyr.n_j(j), n_coeffs(1000, j, 9));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let bank = build_cfw_c(2, 2).unwrap();
        let short = DMatrix::<f64>::zeros(5, 1);
        assert!(matches!(pyramid(&short, &bank, 1), Err(Error::InputTooShort { .. })));
        let mut x = DMatrix::<f64>::zeros(64, 2);
        x[(3, 1)] = f64::NAN;
        assert!(matches!(pyramid(&x, &bank, 2), Err(Error::NonFiniteInput { row: 3, col: 1 })));
    }
}
