//! Adaptive Gauss–Legendre quadrature for real and complex integrands.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// Adaptive bisection driven by the difference between one panel and its
/// two halves, each integrated with a fixed Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct Adaptive {
    nodes: Vec<(f64, f64)>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Subdivision stops once this many panels have been split.
    pub max_splits: usize,
}

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

impl Adaptive {
    pub fn new(degree: usize, rel_tol: f64, abs_tol: f64) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(degree).expect("degree > 0"));
        Adaptive {
            nodes: rule.as_node_weight_pairs().to_vec(),
            rel_tol,
            abs_tol,
            max_depth: 40,
            max_splits: 1 << 14,
        }
    }

    fn rule(&self, a: f64, b: f64, f: &mut impl FnMut(f64) -> Complex64) -> Complex64 {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let s: Complex64 = self.nodes.iter().map(|&(x, w)| w * f(c + h * x)).sum();
        h * s
    }

    /// `∫_a^b f` for a complex-valued `f`.
    pub fn integrate_complex(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> Complex64) -> Estimate<Complex64> {
        let whole = self.rule(a, b, &mut f);
        let mut stack = vec![(a, b, whole, 0u32)];
        let mut total = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        // A rough scale for the relative tolerance, refined as panels finish.
        let scale = whole.norm();
        let mut splits = 0usize;
        while let Some((lo, hi, est, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = self.rule(lo, mid, &mut f);
            let right = self.rule(mid, hi, &mut f);
            let refined = left + right;
            let diff = (refined - est).norm();
            let width = (hi - lo) / (b - a);
            let tol = (self.rel_tol * scale.max(total.norm())).max(self.abs_tol) * width;
            if diff <= tol || depth >= self.max_depth || splits >= self.max_splits {
                total += refined;
                error += diff;
            } else {
                splits += 1;
                stack.push((lo, mid, left, depth + 1));
                stack.push((mid, hi, right, depth + 1));
            }
        }
        Estimate { value: total, error }
    }

    /// `∫_a^b f` for a real-valued `f`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> Estimate<f64> {
        let e = self.integrate_complex(a, b, |x| Complex64::new(f(x), 0.0));
        Estimate { value: e.value.re, error: e.error }
    }
}

/// Non-adaptive composite Gauss–Legendre rule on `panels` equal panels.
pub fn composite(degree: usize, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(degree).expect("degree > 0"));
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            rule.integrate(lo, lo + h, &mut f)
        })
        .sum()
}
