//! Small dense helpers for Hermitian matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// `log det A` for Hermitian positive definite `A`, or `None` if the
/// Cholesky factorization breaks down.
pub fn hermitian_logdet(a: &CMatrix) -> Option<f64> {
    let n = a.nrows();
    let mut l = CMatrix::zeros(n, n);
    let mut acc = 0.0;
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        acc += djj.ln();
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(2.0 * acc)
}

/// `(A + Aᴴ)/2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Hermitian square root of a positive semi-definite matrix. Eigenvalues
/// below `-tol·max(1, trace)` are rejected; smaller negative ones are
/// clamped to zero.
pub fn psd_sqrt(a: &CMatrix, tol: f64) -> Option<CMatrix> {
    let h = hermitian_part(a);
    let scale = h.trace().re.abs().max(1e-300);
    let eig = h.symmetric_eigen();
    let mut d = CMatrix::zeros(a.nrows(), a.ncols());
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v < -tol * scale {
            return None;
        }
        d[(i, i)] = Complex64::new(v.max(0.0).sqrt(), 0.0);
    }
    Some(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Real symmetric positive semi-definiteness check.
pub fn is_psd_real(a: &DMatrix<f64>, tol: f64) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let sym = (a + a.transpose()) * 0.5;
    if (a - &sym).amax() > tol * (1.0 + a.amax()) {
        return false;
    }
    let scale = sym.trace().abs().max(1e-300);
    sym.symmetric_eigenvalues().iter().all(|&v| v >= -tol * scale)
}
