//! Per-scale second moments of a wavelet pyramid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::transform::WaveletPyramid;

#[derive(Debug, Clone)]
pub struct Scalogram {
    pub p: usize,
    /// `matrices[j - 1]` is `I(j)`.
    pub matrices: Vec<CMatrix>,
    /// `counts[j - 1]` is `n_j`.
    pub counts: Vec<usize>,
    /// Centered scalograms hold per-coefficient covariances instead of sums.
    pub centered: bool,
}

impl Scalogram {
    pub fn j_max(&self) -> usize {
        self.matrices.len()
    }

    pub fn i(&self, j: usize) -> &CMatrix {
        &self.matrices[j - 1]
    }

    pub fn n_j(&self, j: usize) -> usize {
        self.counts.get(j.wrapping_sub(1)).copied().unwrap_or(0)
    }
}

/// `I(j) = Σ_k W_{j,k} W_{j,k}ᴴ`. With `centered`, the per-scale mean is
/// removed first and the sum divided by `n_j`.
pub fn scalogram(pyr: &WaveletPyramid, centered: bool) -> Result<Scalogram> {
    if pyr.scales.iter().all(|w| w.nrows() == 0) {
        return Err(Error::EmptyPyramid);
    }
    let p = pyr.p;
    let mut matrices = Vec::with_capacity(pyr.j_max());
    let mut counts = Vec::with_capacity(pyr.j_max());
    for w in &pyr.scales {
        let nj = w.nrows();
        counts.push(nj);
        if nj == 0 {
            matrices.push(CMatrix::zeros(p, p));
            continue;
        }
        let m = if centered {
            let mut c = w.clone();
            for col in 0..p {
                let mean: Complex64 = c.column(col).iter().sum::<Complex64>() / nj as f64;
                c.column_mut(col).iter_mut().for_each(|v| *v -= mean);
            }
            (c.transpose() * c.conjugate()) / Complex64::new(nj as f64, 0.0)
        } else {
            w.transpose() * w.conjugate()
        };
        // Exact Hermitian symmetry.
        let h = CMatrix::from_fn(p, p, |a, b| {
            if a == b {
                Complex64::new(m[(a, a)].re, 0.0)
            } else if a < b {
                m[(a, b)]
            } else {
                m[(b, a)].conj()
            }
        });
        matrices.push(h);
    }
    Ok(Scalogram { p, matrices, counts, centered })
}

/// `I_{ℓm}(j) / √(I_{ℓℓ}(j) I_{mm}(j))`.
pub fn wavelet_correlation(sc: &Scalogram, j: usize) -> Result<CMatrix> {
    if j == 0 || j > sc.j_max() {
        return Err(Error::InvalidParameter(format!("scale {j} outside 1..={}", sc.j_max())));
    }
    let i = sc.i(j);
    let diag: Vec<f64> = (0..sc.p).map(|a| i[(a, a)].re).collect();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::DegenerateScale { j });
    }
    Ok(CMatrix::from_fn(sc.p, sc.p, |a, b| {
        if a == b {
            Complex64::new(1.0, 0.0)
        } else {
            i[(a, b)] / (diag[a] * diag[b]).sqrt()
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn pyr_of(w: DMatrix<Complex64>) -> WaveletPyramid {
        WaveletPyramid { n: 64, p: w.ncols(), scales: vec![w], support_length: 9 }
    }

    #[test]
    fn constant_coefficients() {
        let w = DMatrix::from_element(5, 1, Complex64::new(1.0, 1.0));
        let sc = scalogram(&pyr_of(w), false).unwrap();
        assert_eq!(sc.i(1)[(0, 0)], Complex64::new(10.0, 0.0));
        let centered = scalogram(&pyr_of(DMatrix::from_element(5, 1, Complex64::new(1.0, 1.0))), true).unwrap();
        assert!(centered.i(1)[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn empty_pyramid() {
        let w = DMatrix::<Complex64>::zeros(0, 2);
        assert!(matches!(scalogram(&pyr_of(w), false), Err(Error::EmptyPyramid)));
    }

    #[test]
    fn zero_scale_is_degenerate() {
        let w = DMatrix::<Complex64>::zeros(4, 2);
        let sc = scalogram(&pyr_of(w), false).unwrap();
        assert!(matches!(wavelet_correlation(&sc, 1), Err(Error::DegenerateScale { j: 1 })));
    }
}
