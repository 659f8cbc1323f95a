//! Command-line front end.
//!
//! Data goes in and out as CSV with a header row; reports are JSON. Exit
//! codes: 0 on success, 1 on user errors (bad flags, unreadable or malformed
//! input), 2 on numerical failures, which are also reported on stderr as a
//! JSON object. `LONGWAVE_THREADS` caps the worker pool.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::asymptotics::{wald_intervals, WaldInterval, DEFAULT_U_MAX};
use crate::connectivity::{fit_subjects, group_graph, PhiStarSource, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::filters::{linspace, ComplexFilterBank, Variant};
use crate::io::{default_headers, fmt_f64, read_table_path, write_table};
use crate::montecarlo::{run_mc, McScenario};
use crate::scalogram::{scalogram, wavelet_correlation};
use crate::simulate::{sim_arfima0d0, sim_mfbm, MfbmParams};
use crate::transform::{max_scale, pyramid};
use crate::whittle::{estimate_with_bank, WhittleConfig, WhittleFit};

/// Version string with the build target and profile.
pub const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (target ",
    env!("LONGWAVE_BUILD_TARGET"),
    ", profile ",
    env!("LONGWAVE_BUILD_PROFILE"),
    ")"
);

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LONGWAVE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "longwave", version, long_version = LONG_VERSION, about = "Wavelet local Whittle estimation of multivariate long memory")]
pub struct Cli {
    /// Print timing and diagnostics to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write filter taps, or sampled wavelet responses with --points.
    DumpFilters(DumpFiltersArgs),
    /// Wavelet coefficients as a long table `j,k,channel,re,im`.
    Transform(TransformArgs),
    /// Per-scale cross-products and wavelet correlations.
    Scalogram(ScalogramArgs),
    /// Fit `d`, `Θ`, `ρ` and `φ`, optionally with Wald intervals.
    Estimate(EstimateArgs),
    /// Simulate an ARFIMA(0, d, 0) or mFBM sample.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo scenario from a TOML or JSON file.
    Mc(McArgs),
    /// Build a group connectivity graph from one CSV per subject.
    Connect(ConnectArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Vanishing moments M.
    #[arg(long, visible_alias = "M", default_value_t = 4)]
    pub m: usize,
    /// Analyticity order L.
    #[arg(long, visible_alias = "L", default_value_t = 4)]
    pub l: usize,
    /// cfw-c, cfw-pr or daubechies.
    #[arg(long, visible_alias = "filter", default_value = "cfw-c")]
    pub variant: Variant,
}

impl FilterArgs {
    fn bank(&self) -> Result<ComplexFilterBank> {
        ComplexFilterBank::new(self.variant, self.m, self.l)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScaleArgs {
    /// Finest scale used by the estimator.
    #[arg(long, default_value_t = 4)]
    pub j0: usize,
    /// Coarsest scale; defaults to the deepest scale with enough coefficients.
    #[arg(long)]
    pub j1: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DumpFiltersArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Sample ψ̂ on this many points of [−8π, 8π] instead of writing taps.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Deepest scale; defaults to the largest scale with a coefficient.
    #[arg(long)]
    pub j_max: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScalogramArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Remove per-scale means and normalize by n_j.
    #[arg(long)]
    pub centered: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub scales: ScaleArgs,
    /// Add Wald intervals for d.
    #[arg(long)]
    pub ci: bool,
    /// Confidence level of the intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Cap on the scale-lag series of the asymptotic variance.
    #[arg(long, default_value_t = DEFAULT_U_MAX)]
    pub u_max: u32,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Arfima,
    Mfbm,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    /// Comma-separated memory parameters, one per channel.
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<f64>,
    /// Common off-diagonal correlation (innovations for ARFIMA, r for mFBM).
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    /// Antisymmetric mFBM parameter η_{ℓm} for ℓ < m.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Override the replication count.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Run 1000 replications.
    #[arg(long, conflicts_with = "reps")]
    pub full: bool,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhiStarArg {
    GroupMean,
    PerSubject,
}

#[derive(Debug, Args)]
pub struct ConnectArgs {
    /// One CSV per subject, all with the same columns.
    #[arg(long, num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub scales: ScaleArgs,
    /// Memory estimates used for the reference phase.
    #[arg(long, value_enum, default_value = "group-mean")]
    pub phi_star: PhiStarArg,
    /// JSON graph destination (stdout by default).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Optional edge-list CSV.
    #[arg(long)]
    pub edges: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|()| dispatch(&cli));
    match result {
        Ok(()) => 0,
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &Error) -> i32 {
    if e.is_numerical() {
        let body = serde_json::json!({ "error": e.kind(), "message": e.to_string(), "exit_code": 2 });
        eprintln!("{body}");
        2
    } else {
        eprintln!("error: {e}");
        1
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer (got '{raw}')")))?;
    // A pool configured earlier in the process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    let start = std::time::Instant::now();
    let out = match &cli.command {
        Command::DumpFilters(a) => dump_filters(a),
        Command::Transform(a) => transform(a),
        Command::Scalogram(a) => scalogram_cmd(a),
        Command::Estimate(a) => estimate_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Mc(a) => mc_cmd(a),
        Command::Connect(a) => connect_cmd(a),
    };
    if cli.verbose > 0 {
        eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    }
    out
}

/// Stdout when `path` is `None`.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_rows(path: Option<&Path>, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn dump_filters(a: &DumpFiltersArgs) -> Result<()> {
    let bank = a.filter.bank()?;
    let out = a.output.as_deref();
    if let Some(points) = a.points {
        if points < 2 {
            return Err(Error::InvalidParameter("--points must be at least 2".into()));
        }
        let rows = linspace(-8.0 * PI, 8.0 * PI, points).into_iter().map(|lambda| {
            let (h, g, psi) = bank.psi_hat_parts(lambda);
            [lambda, h.re, h.im, g.re, g.im, psi.re, psi.im, psi.norm()].iter().map(|&v| fmt_f64(v)).collect()
        });
        let header = ["lambda", "psi_h_re", "psi_h_im", "psi_g_re", "psi_g_im", "psi_re", "psi_im", "psi_abs"];
        return write_rows(out, &header, rows);
    }
    let filters = [("h_low", &bank.h_low), ("h_high", &bank.h_high), ("g_low", &bank.g_low), ("g_high", &bank.g_high)];
    let rows = filters.into_iter().flat_map(|(name, f)| {
        f.taps
            .iter()
            .enumerate()
            .map(move |(k, &v)| vec![name.to_string(), (f.offset + k as i64).to_string(), fmt_f64(v)])
    });
    write_rows(out, &["filter", "index", "value"], rows)
}

fn load(path: &Path) -> Result<(Vec<String>, DMatrix<f64>)> {
    let t = read_table_path(path)?;
    Ok((t.headers, t.data))
}

fn transform(a: &TransformArgs) -> Result<()> {
    let (_, x) = load(&a.input)?;
    let bank = a.filter.bank()?;
    let pyr = pyramid(&x, &bank, a.j_max.unwrap_or_else(|| max_scale(x.nrows())))?;
    let rows = (1..=pyr.j_max()).flat_map(|j| {
        let w = pyr.coeffs(j);
        (0..w.nrows()).flat_map(move |k| {
            (0..w.ncols()).map(move |c| {
                let z = w[(k, c)];
                vec![j.to_string(), (k + 1).to_string(), (c + 1).to_string(), fmt_f64(z.re), fmt_f64(z.im)]
            })
        })
    });
    write_rows(a.output.as_deref(), &["j", "k", "channel", "re", "im"], rows)
}

fn scalogram_cmd(a: &ScalogramArgs) -> Result<()> {
    let (_, x) = load(&a.input)?;
    let bank = a.filter.bank()?;
    let pyr = pyramid(&x, &bank, max_scale(x.nrows()))?;
    let sc = scalogram(&pyr, a.centered)?;
    let mut rows = Vec::new();
    for j in 1..=sc.j_max() {
        if sc.n_j(j) == 0 {
            continue;
        }
        let corr = wavelet_correlation(&sc, j).ok();
        let i = sc.i(j);
        for l in 0..sc.p {
            for m in 0..sc.p {
                let c = corr.as_ref().map(|c| c[(l, m)]);
                rows.push(vec![
                    j.to_string(),
                    sc.n_j(j).to_string(),
                    (l + 1).to_string(),
                    (m + 1).to_string(),
                    fmt_f64(i[(l, m)].re),
                    fmt_f64(i[(l, m)].im),
                    c.map_or_else(|| "NaN".into(), |z| fmt_f64(z.re)),
                    c.map_or_else(|| "NaN".into(), |z| fmt_f64(z.im)),
                ]);
            }
        }
    }
    write_rows(a.output.as_deref(), &["j", "n_j", "l", "m", "re", "im", "corr_re", "corr_im"], rows)
}

fn whittle_config(filter: &FilterArgs, scales: &ScaleArgs) -> WhittleConfig {
    let mut cfg = WhittleConfig {
        j0: scales.j0,
        j1: scales.j1,
        m: filter.m,
        l: filter.l,
        variant: filter.variant,
        ..Default::default()
    };
    cfg.d_max = cfg.d_max.min(filter.m as f64 - 0.51);
    cfg
}

/// One complex entry in JSON output.
#[derive(Debug, Serialize)]
struct JsonComplex {
    re: f64,
    im: f64,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn complex_rows(m: &crate::linalg::CMatrix) -> Vec<Vec<JsonComplex>> {
    m.row_iter().map(|r| r.iter().map(|z| JsonComplex { re: z.re, im: z.im }).collect()).collect()
}

#[derive(Debug, Serialize)]
struct ConfidenceReport {
    level: f64,
    intervals: Vec<WaldInterval>,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
    channels: Vec<String>,
    criterion: f64,
    iterations: usize,
    j0: usize,
    j1: usize,
    n: usize,
    n_j: Vec<usize>,
    theta: Vec<Vec<JsonComplex>>,
}

#[derive(Debug, Serialize)]
struct EstimateReport {
    d: Vec<f64>,
    #[serde(rename = "G")]
    g: Vec<Vec<JsonComplex>>,
    omega: Vec<Vec<f64>>,
    phi: Vec<Vec<f64>>,
    rho: Vec<Vec<f64>>,
    diagnostics: Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence: Option<ConfidenceReport>,
}

impl EstimateReport {
    fn new(channels: Vec<String>, fit: &WhittleFit) -> Self {
        EstimateReport {
            d: fit.d_hat.clone(),
            g: complex_rows(&fit.g_hat),
            omega: rows_of(&fit.omega_hat),
            phi: rows_of(&fit.phi_hat),
            rho: rows_of(&fit.rho_hat),
            diagnostics: Diagnostics {
                channels,
                criterion: fit.criterion,
                iterations: fit.iterations,
                j0: fit.j0,
                j1: fit.j1,
                n: fit.n,
                n_j: fit.n_j.clone(),
                theta: complex_rows(&fit.theta_hat),
            },
            confidence: None,
        }
    }
}

fn estimate_cmd(a: &EstimateArgs) -> Result<()> {
    let (headers, x) = load(&a.input)?;
    let cfg = whittle_config(&a.filter, &a.scales);
    cfg.validate()?;
    let bank = a.filter.bank()?;
    let fit = estimate_with_bank(&x, &cfg, &bank)?;
    let mut report = EstimateReport::new(headers, &fit);
    if a.ci {
        let intervals = wald_intervals(&fit, a.level, a.u_max, &bank)?;
        report.confidence = Some(ConfidenceReport { level: a.level, intervals });
    }
    write_json(a.output.as_deref(), &report)
}

fn simulate_cmd(a: &SimulateArgs) -> Result<()> {
    let p = a.d.len();
    let off = |i: usize, k: usize, v: f64| if i == k { 1.0 } else { v };
    let x = match a.model {
        ModelArg::Arfima => {
            let sigma = DMatrix::from_fn(p, p, |i, k| off(i, k, a.rho));
            sim_arfima0d0(a.n, &a.d, &sigma, a.seed)?
        }
        ModelArg::Mfbm => {
            let params = MfbmParams {
                sigma: vec![1.0; p],
                r: DMatrix::from_fn(p, p, |i, k| off(i, k, a.rho)),
                eta: DMatrix::from_fn(p, p, |i, k| match i.cmp(&k) {
                    std::cmp::Ordering::Less => a.eta,
                    std::cmp::Ordering::Greater => -a.eta,
                    std::cmp::Ordering::Equal => 0.0,
                }),
                d: a.d.clone(),
            };
            sim_mfbm(a.n, &params, a.seed)?
        }
    };
    write_table(sink(a.output.as_deref())?, &default_headers(p), &x)
}

fn mc_cmd(a: &McArgs) -> Result<()> {
    let mut sc = McScenario::from_file(&a.scenario)?;
    if let Some(r) = a.reps {
        sc.reps = r;
    }
    if a.full {
        sc.reps = 1000;
    }
    if let Some(s) = a.seed {
        sc.seed = s;
    }
    let report = run_mc(&sc)?;
    eprintln!(
        "{} replications, {} failed ({:.1}%), {:.2} s",
        report.reps,
        report.failures,
        100.0 * report.failure_rate(),
        report.runtime_secs
    );
    report.write_csv(sink(a.output.as_deref())?)
}

fn connect_cmd(a: &ConnectArgs) -> Result<()> {
    let mut subjects = Vec::with_capacity(a.inputs.len());
    let mut labels: Option<Vec<String>> = None;
    for path in &a.inputs {
        let (headers, x) = load(path)?;
        match &labels {
            Some(l) if l.len() != headers.len() => {
                return Err(Error::DimensionMismatch { expected: l.len(), found: headers.len() })
            }
            Some(_) => {}
            None => labels = Some(headers),
        }
        let id = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        subjects.push((id, x));
    }
    let cfg = whittle_config(&a.filter, &a.scales);
    cfg.validate()?;
    let fits = fit_subjects(&subjects, &cfg)?;
    let source = match a.phi_star {
        PhiStarArg::GroupMean => PhiStarSource::GroupMean,
        PhiStarArg::PerSubject => PhiStarSource::PerSubject,
    };
    let graph = group_graph(&fits, a.threshold, source, labels.as_deref())?;
    if let Some(path) = &a.edges {
        let rows = graph.edges.iter().map(|e| {
            vec![
                graph.nodes[e.l].clone(),
                graph.nodes[e.m].clone(),
                fmt_f64(e.mean_phase),
                fmt_f64(e.phi_star),
                serde_json::to_value(e.class).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default(),
            ]
        });
        write_rows(Some(path), &["l", "m", "mean_phase", "phi_star", "class"], rows)?;
    }
    write_json(a.output.as_deref(), &graph)
}

