//! Replication harness: simulate, estimate, and summarize bias, standard
//! deviation and RMSE of `d̂`, `Ω̂`, `ρ̂` and `φ̂`.
//!
//! Replications run in parallel on the rayon pool. Each one draws from its
//! own seed, derived from the scenario seed and the replication index, so a
//! report depends only on the scenario and never on scheduling.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::Variant;
use crate::simulate::{sim_arfima0d0, sim_mfbm, MfbmParams, ModelSpec};
use crate::whittle::{estimate_with_bank, WhittleConfig, WhittleFit};

/// Data-generating process of a scenario. Matrices are row-major nested lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioModel {
    Arfima { d: Vec<f64>, sigma: Vec<Vec<f64>> },
    Mfbm { d: Vec<f64>, sigma: Vec<f64>, r: Vec<Vec<f64>>, eta: Vec<Vec<f64>> },
}

fn to_matrix(rows: &[Vec<f64>], p: usize) -> Result<DMatrix<f64>> {
    if rows.len() != p {
        return Err(Error::DimensionMismatch { expected: p, found: rows.len() });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != p) {
        return Err(Error::DimensionMismatch { expected: p, found: bad.len() });
    }
    Ok(DMatrix::from_fn(p, p, |a, b| rows[a][b]))
}

impl ScenarioModel {
    /// Bivariate ARFIMA(0, d, 0) with unit variances and innovation correlation `rho`.
    pub fn arfima2(d: [f64; 2], rho: f64) -> Self {
        ScenarioModel::Arfima { d: d.to_vec(), sigma: vec![vec![1.0, rho], vec![rho, 1.0]] }
    }

    pub fn p(&self) -> usize {
        match self {
            ScenarioModel::Arfima { d, .. } | ScenarioModel::Mfbm { d, .. } => d.len(),
        }
    }

    fn mfbm_params(d: &[f64], sigma: &[f64], r: &[Vec<f64>], eta: &[Vec<f64>]) -> Result<MfbmParams> {
        let p = d.len();
        Ok(MfbmParams { sigma: sigma.to_vec(), r: to_matrix(r, p)?, eta: to_matrix(eta, p)?, d: d.to_vec() })
    }

    /// True parameters of the process.
    pub fn spec(&self) -> Result<ModelSpec> {
        match self {
            ScenarioModel::Arfima { d, sigma } => Ok(ModelSpec::arfima(d, &to_matrix(sigma, d.len())?)),
            ScenarioModel::Mfbm { d, sigma, r, eta } => ModelSpec::mfbm(&Self::mfbm_params(d, sigma, r, eta)?),
        }
    }

    /// One `n × p` sample path.
    pub fn simulate(&self, n: usize, seed: u64) -> Result<DMatrix<f64>> {
        match self {
            ScenarioModel::Arfima { d, sigma } => sim_arfima0d0(n, d, &to_matrix(sigma, d.len())?, seed),
            ScenarioModel::Mfbm { d, sigma, r, eta } => sim_mfbm(n, &Self::mfbm_params(d, sigma, r, eta)?, seed),
        }
    }
}

/// Parameter families reported by [`run_mc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    D,
    Omega,
    Rho,
    Phi,
}

fn default_parameters() -> Vec<Parameter> {
    vec![Parameter::D, Parameter::Omega, Parameter::Rho, Parameter::Phi]
}

fn default_reps() -> usize {
    100
}

fn default_m() -> usize {
    4
}

fn default_variant() -> Variant {
    Variant::CfwC
}

fn default_j0() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McScenario {
    pub model: ScenarioModel,
    pub n: usize,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_m")]
    pub l: usize,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_j0")]
    pub j0: usize,
    #[serde(default)]
    pub j1: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_parameters")]
    pub parameters: Vec<Parameter>,
}

impl McScenario {
    /// Scenario with CFW-C(4, 4), `j0 = 4`, 100 replications and every parameter reported.
    pub fn new(model: ScenarioModel, n: usize) -> Self {
        McScenario {
            model,
            n,
            reps: default_reps(),
            m: 4,
            l: 4,
            variant: Variant::CfwC,
            j0: 4,
            j1: None,
            seed: 0,
            parameters: default_parameters(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if !self.n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("N must be a power of two (got {})", self.n)));
        }
        self.whittle_config().validate()
    }

    pub fn whittle_config(&self) -> WhittleConfig {
        let mut cfg = WhittleConfig { j0: self.j0, j1: self.j1, m: self.m, l: self.l, variant: self.variant, ..Default::default() };
        cfg.d_max = cfg.d_max.min(self.m as f64 - 0.51);
        cfg
    }

    /// Reads a scenario from TOML, or from JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

/// Seed of replication `rep`: a SplitMix64 finalizer over the base seed and index.
pub fn replication_seed(base: u64, rep: u64) -> u64 {
    let mut z = base ^ rep.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub name: String,
    pub truth: f64,
    pub bias: f64,
    pub std: f64,
    pub rmse: f64,
}

impl McRow {
    /// Moments of `errors` (estimate minus truth). `std` uses the `1/R`
    /// normalization so that `rmse² = bias² + std²` exactly.
    pub fn from_errors(name: String, truth: f64, errors: &[f64]) -> Self {
        let r = errors.len() as f64;
        let bias = errors.iter().sum::<f64>() / r;
        let var = errors.iter().map(|e| (e - bias).powi(2)).sum::<f64>() / r;
        let std = var.sqrt();
        McRow { name, truth, bias, std, rmse: bias.hypot(std) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McReport {
    pub rows: Vec<McRow>,
    pub reps: usize,
    pub failures: usize,
    pub runtime_secs: f64,
}

impl McReport {
    pub fn failure_rate(&self) -> f64 {
        self.failures as f64 / self.reps as f64
    }

    pub fn row(&self, name: &str) -> Option<&McRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Writes `parameter,true,bias,std,rmse` rows.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["parameter", "true", "bias", "std", "rmse"])?;
        for r in &self.rows {
            out.write_record([
                r.name.clone(),
                format!("{:.16e}", r.truth),
                format!("{:.16e}", r.bias),
                format!("{:.16e}", r.std),
                format!("{:.16e}", r.rmse),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Channels are labelled from 1 in row names (`d1`, `rho12`, ...).
fn extract(fit: &WhittleFit, spec: &ModelSpec, params: &[Parameter]) -> Vec<(String, f64, f64)> {
    let p = spec.d.len();
    let truth_rho = spec.rho();
    let mut out = Vec::new();
    for &param in params {
        match param {
            Parameter::D => {
                for a in 0..p {
                    out.push((format!("d{}", a + 1), spec.d[a], fit.d_hat[a] - spec.d[a]));
                }
            }
            Parameter::Omega => {
                for a in 0..p {
                    for b in a..p {
                        let t = spec.omega[(a, b)];
                        out.push((format!("omega{}{}", a + 1, b + 1), t, fit.omega_hat[(a, b)] - t));
                    }
                }
            }
            Parameter::Rho => {
                for a in 0..p {
                    for b in a + 1..p {
                        let t = truth_rho[(a, b)];
                        out.push((format!("rho{}{}", a + 1, b + 1), t, fit.rho_hat[(a, b)] - t));
                    }
                }
            }
            Parameter::Phi => {
                for a in 0..p {
                    for b in a + 1..p {
                        let t = spec.phi[(a, b)];
                        out.push((format!("phi{}{}", a + 1, b + 1), t, wrap_phase(fit.phi_hat[(a, b)] - t)));
                    }
                }
            }
        }
    }
    out
}

/// One simulate → estimate pipeline per replication, then per-parameter moments.
/// Replications whose estimation fails are excluded and counted.
pub fn run_mc(sc: &McScenario) -> Result<McReport> {
    sc.validate()?;
    let start = Instant::now();
    let spec = sc.model.spec()?;
    let cfg = sc.whittle_config();
    let bank = cfg.bank()?;

    let fits: Vec<Result<WhittleFit>> = (0..sc.reps)
        .into_par_iter()
        .map(|rep| {
            let x = sc.model.simulate(sc.n, replication_seed(sc.seed, rep as u64))?;
            estimate_with_bank(&x, &cfg, &bank)
        })
        .collect();

    let mut failures = 0;
    let mut samples: Vec<Vec<(String, f64, f64)>> = Vec::with_capacity(sc.reps);
    for fit in fits {
        match fit {
            Ok(f) => samples.push(extract(&f, &spec, &sc.parameters)),
            Err(e) if e.is_numerical() => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if samples.is_empty() {
        return Err(Error::AllReplicationsFailed { reps: sc.reps });
    }

    let rows = (0..samples[0].len())
        .map(|k| {
            let (name, truth, _) = &samples[0][k];
            let errors: Vec<f64> = samples.iter().map(|s| s[k].2).collect();
            McRow::from_errors(name.clone(), *truth, &errors)
        })
        .collect();
    Ok(McReport { rows, reps: sc.reps, failures, runtime_secs: start.elapsed().as_secs_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_into_half_open_interval() {
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(-0.3) + 0.3).abs() < 1e-15);
    }

    #[test]
    fn single_replication_moments() {
        let r = McRow::from_errors("d1".into(), 0.2, &[-0.03]);
        assert_eq!(r.std, 0.0);
        assert!((r.rmse - 0.03).abs() < 1e-15);
    }

    #[test]
    fn scenario_parses_from_toml() {
        let text = r#"
            n = 1024
            reps = 3
            seed = 9
            [model]
            kind = "arfima"
            d = [0.2, 0.4]
            sigma = [[1.0, 0.5], [0.5, 1.0]]
        "#;
        let sc: McScenario = toml::from_str(text).unwrap();
        assert_eq!(sc.model, ScenarioModel::arfima2([0.2, 0.4], 0.5));
        assert_eq!(sc.j0, 4);
        assert_eq!(sc.parameters.len(), 4);
    }
}
