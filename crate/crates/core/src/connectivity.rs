//! Group connectivity graphs from per-subject multivariate fits.
//!
//! Each subject contributes a thresholded long-run correlation graph. The
//! group graph keeps the edges present in every subject and labels each one
//! by comparing its circular-mean phase with the phase `φ*_{ℓm} =
//! −(π/2)(d_ℓ − d_m)` that fractional integration alone would produce.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::whittle::{estimate, WhittleConfig, WhittleFit};

/// Default correlation threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.3;

/// Multiplier of `|φ*|` separating neutral from signed edges.
pub const PHASE_MARGIN: f64 = 1.1;

#[derive(Debug, Clone)]
pub struct SubjectFit {
    pub id: String,
    pub d_hat: Vec<f64>,
    pub rho_hat: DMatrix<f64>,
    pub phi_hat: DMatrix<f64>,
}

impl SubjectFit {
    pub fn from_fit(id: impl Into<String>, fit: &WhittleFit) -> Self {
        SubjectFit { id: id.into(), d_hat: fit.d_hat.clone(), rho_hat: fit.rho_hat.clone(), phi_hat: fit.phi_hat.clone() }
    }

    pub fn p(&self) -> usize {
        self.d_hat.len()
    }
}

/// Fits every subject in parallel. Results keep the input order.
pub fn fit_subjects(subjects: &[(String, DMatrix<f64>)], cfg: &WhittleConfig) -> Result<Vec<SubjectFit>> {
    subjects
        .par_iter()
        .map(|(id, x)| estimate(x, cfg).map(|f| SubjectFit::from_fit(id.clone(), &f)))
        .collect()
}

/// Edge `(ℓ, m)` for `ℓ < m` iff `|ρ_{ℓm}| > thr`. Symmetric, no self-loops.
pub fn threshold_graph(rho: &DMatrix<f64>, thr: f64) -> Result<DMatrix<bool>> {
    if !(thr > 0.0 && thr < 1.0) {
        return Err(Error::InvalidParameter(format!("threshold must lie in (0, 1) (got {thr})")));
    }
    if !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), found: rho.ncols() });
    }
    let p = rho.nrows();
    Ok(DMatrix::from_fn(p, p, |a, b| a != b && rho[(a.min(b), a.max(b))].abs() > thr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    Positive,
    Negative,
    Neutral,
}

/// Memory estimates used for the reference phase `φ*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiStarSource {
    /// `φ*` from the group mean of `d̂`.
    #[default]
    GroupMean,
    /// Circular mean over subjects of each subject's own `φ*`.
    PerSubject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub l: usize,
    pub m: usize,
    pub mean_phase: f64,
    pub phi_star: f64,
    pub class: EdgeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub threshold: f64,
}

/// `atan2(Σ sin, Σ cos)`; zero for an empty or perfectly balanced sample.
pub fn circular_mean(angles: impl IntoIterator<Item = f64>) -> f64 {
    let (s, c) = angles.into_iter().fold((0.0, 0.0), |(s, c), x| (s + x.sin(), c + x.cos()));
    if s == 0.0 && c == 0.0 {
        0.0
    } else {
        s.atan2(c)
    }
}

pub fn phi_star(d_l: f64, d_m: f64) -> f64 {
    -PI / 2.0 * (d_l - d_m)
}

pub fn classify(mean_phase: f64, phi_star: f64) -> EdgeClass {
    let band = PHASE_MARGIN * phi_star.abs();
    if mean_phase > band {
        EdgeClass::Positive
    } else if mean_phase < -band {
        EdgeClass::Negative
    } else {
        EdgeClass::Neutral
    }
}

/// Intersection of subject graphs with phase labels. Nodes are named
/// `x1, …, xp` unless `labels` is given.
pub fn group_graph(
    fits: &[SubjectFit],
    thr: f64,
    source: PhiStarSource,
    labels: Option<&[String]>,
) -> Result<GroupGraph> {
    let first = fits.first().ok_or_else(|| Error::InvalidParameter("at least one subject is required".into()))?;
    let p = first.p();
    for f in fits {
        for found in [f.p(), f.rho_hat.nrows(), f.rho_hat.ncols(), f.phi_hat.nrows(), f.phi_hat.ncols()] {
            if found != p {
                return Err(Error::DimensionMismatch { expected: p, found });
            }
        }
    }
    let nodes = match labels {
        Some(l) if l.len() == p => l.to_vec(),
        Some(l) => return Err(Error::DimensionMismatch { expected: p, found: l.len() }),
        None => (1..=p).map(|i| format!("x{i}")).collect(),
    };

    let mut adjacency = DMatrix::from_fn(p, p, |a, b| a != b);
    for f in fits {
        let g = threshold_graph(&f.rho_hat, thr)?;
        adjacency.zip_apply(&g, |x, y| *x = *x && y);
    }
    let d_bar: Vec<f64> = (0..p).map(|a| fits.iter().map(|f| f.d_hat[a]).sum::<f64>() / fits.len() as f64).collect();

    let mut edges = Vec::new();
    for l in 0..p {
        for m in l + 1..p {
            if !adjacency[(l, m)] {
                continue;
            }
            let mean_phase = circular_mean(fits.iter().map(|f| f.phi_hat[(l, m)]));
            let star = match source {
                PhiStarSource::GroupMean => phi_star(d_bar[l], d_bar[m]),
                PhiStarSource::PerSubject => circular_mean(fits.iter().map(|f| phi_star(f.d_hat[l], f.d_hat[m]))),
            };
            edges.push(Edge { l, m, mean_phase, phi_star: star, class: classify(mean_phase, star) });
        }
    }
    Ok(GroupGraph { nodes, edges, threshold: thr })
}
