//! Batch driver: flat `key = value` configs with dotted sections, experiment
//! dispatch, checksummed artifacts and byte-exact replay.

use crate::coeff_models::{implied_covariance, keyed_rng, model_from_config, CoefficientModel, StreamPurpose};
use crate::csv_out::{fmt_f64, hex_digest, CsvWriter};
use crate::error::Error;
use crate::limit_gaf::{CholeskySampler, IntegralSampler, KernelParams};
use crate::stats_harness::{
    clt_normality_check, covariance_convergence, geometric_grid, lil_band_check, real_zero_process_comparison,
    reports_to_csv, sigma_c_report, zero_count_experiment, zero_count_pmf, zeta_limit_check, zeta_ray, zeta_report,
    zeta_rows_to_csv, LilParams, Normalizer, SamplingOptions, StatReport, Verdict, ZeroSearchOptions,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_REPLAY: i32 = 4;

pub const TOOL_NAME: &str = "rdseries";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const FORMAT_VERSION: u32 = 1;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.json";
pub const DEFAULT_OUTPUT_DIR: &str = "rdseries-out";

/// Default LIL grid: 40 points from 1e−2 down to 1e−6.
pub const LIL_DEFAULT_POINTS: usize = 40;
pub const LIL_DEFAULT_HEAD_N: usize = 1 << 20;

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "coefficients.kind",
    "coefficients.variance",
    "coefficients.re",
    "coefficients.im",
    "coefficients.p",
    "alpha",
    "s",
    "s_grid",
    "s_min",
    "s_max",
    "points",
    "replicates",
    "seed",
    "output_dir",
    "threads",
    "r",
    "window",
    "grid",
    "y_max",
    "cells",
    "eps",
    "beta",
    "n_max",
    "head_n",
    "sampler",
    "normalizer",
    "margin",
    "rel_tol",
];

fn canonical_key(key: &str) -> &str {
    match key {
        "model" => "coefficients.kind",
        other => other,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("replay mismatch: {0}")]
    Replay(String),
    #[error("experiment failed: {0}")]
    Experiment(Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Resource(_) => EXIT_RESOURCE,
            Self::Replay(_) => EXIT_REPLAY,
            Self::Experiment(_) | Self::Io(_) => EXIT_FAIL,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceCap { .. } => Self::Resource(e.to_string()),
            Error::InvalidArgument(_) | Error::Domain(_) | Error::EmptyRequest(_) | Error::Length { .. } => {
                Self::Config(e.to_string())
            }
            other => Self::Experiment(other),
        }
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Debug, Clone, PartialEq)]
enum Origin {
    Line(usize),
    Flag,
    Manifest,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    origin: Origin,
}

/// Parsed configuration; command-line flags override file entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
}

impl Config {
    pub fn parse(text: &str) -> RunResult<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| RunError::Config(format!("line {line_no}: unterminated section header")))?
                    .trim();
                section = name.to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| RunError::Config(format!("line {line_no}: expected `key = value`, got `{line}`")))?;
            let k = k.trim();
            let full = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            let key = canonical_key(&full).to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(RunError::Config(format!("line {line_no}: unknown key `{full}`")));
            }
            if let Some(prev) = cfg.entries.get(&key) {
                if let Origin::Line(p) = prev.origin {
                    return Err(RunError::Config(format!("line {line_no}: key `{key}` already set on line {p}")));
                }
            }
            cfg.entries.insert(key, Entry { value: v.trim().to_string(), origin: Origin::Line(line_no) });
        }
        Ok(cfg)
    }

    /// Sets a value from a `--key value` flag.
    pub fn set_flag(&mut self, key: &str, value: &str) -> RunResult<()> {
        let key = canonical_key(key);
        if !KNOWN_KEYS.contains(&key) {
            return Err(RunError::Config(format!("flag --{key}: unknown key")));
        }
        self.entries.insert(key.to_string(), Entry { value: value.to_string(), origin: Origin::Flag });
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    /// Flat key → value map, as echoed into the manifest.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.value.clone())).collect()
    }

    pub fn from_echo(map: &BTreeMap<String, String>) -> RunResult<Self> {
        let mut cfg = Self::default();
        for (k, v) in map {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                return Err(RunError::Config(format!("manifest: unknown key `{k}`")));
            }
            cfg.entries.insert(k.clone(), Entry { value: v.clone(), origin: Origin::Manifest });
        }
        Ok(cfg)
    }

    fn place(&self, key: &str) -> String {
        match self.entries.get(key).map(|e| &e.origin) {
            Some(Origin::Line(n)) => format!("line {n}: key `{key}`"),
            Some(Origin::Flag) => format!("flag --{key}"),
            Some(Origin::Manifest) | None => format!("key `{key}`"),
        }
    }

    fn bad(&self, key: &str, why: impl std::fmt::Display) -> RunError {
        RunError::Config(format!("{}: {why}", self.place(key)))
    }

    fn required(&self, key: &str) -> RunResult<&str> {
        self.get(key).ok_or_else(|| RunError::Config(format!("missing required key `{key}`")))
    }

    fn parse_with<T>(&self, key: &str, f: impl Fn(&str) -> Option<T>, what: &str) -> RunResult<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => f(v).map(Some).ok_or_else(|| self.bad(key, format!("expected {what}, got `{v}`"))),
        }
    }

    pub fn f64_opt(&self, key: &str) -> RunResult<Option<f64>> {
        self.parse_with(key, |v| v.parse::<f64>().ok().filter(|x| x.is_finite()), "a finite number")
    }

    pub fn f64_req(&self, key: &str) -> RunResult<f64> {
        self.required(key)?;
        Ok(self.f64_opt(key)?.expect("present"))
    }

    pub fn u64_opt(&self, key: &str) -> RunResult<Option<u64>> {
        self.parse_with(key, parse_u64, "a non-negative integer")
    }

    pub fn u64_req(&self, key: &str) -> RunResult<u64> {
        self.required(key)?;
        Ok(self.u64_opt(key)?.expect("present"))
    }

    pub fn usize_opt(&self, key: &str) -> RunResult<Option<usize>> {
        Ok(self.u64_opt(key)?.map(|v| v as usize))
    }

    pub fn usize_req(&self, key: &str) -> RunResult<usize> {
        Ok(self.u64_req(key)? as usize)
    }

    pub fn f64_list(&self, key: &str) -> RunResult<Option<Vec<f64>>> {
        self.parse_with(
            key,
            |v| v.split(',').map(|t| t.trim().parse::<f64>().ok().filter(|x| x.is_finite())).collect(),
            "a comma-separated list of numbers",
        )
    }

    pub fn complex_list(&self, key: &str) -> RunResult<Option<Vec<Complex64>>> {
        self.parse_with(
            key,
            |v| v.split(',').map(|t| parse_complex(t.trim())).collect(),
            "a comma-separated list of complex numbers like 0.7+0.8i",
        )
    }

    fn model(&self) -> RunResult<CoefficientModel> {
        let kind = self.required("coefficients.kind")?;
        let mut params = BTreeMap::new();
        for p in ["variance", "re", "im", "p"] {
            let key = format!("coefficients.{p}");
            if let Some(v) = self.f64_opt(&key)? {
                params.insert(p, v);
            }
        }
        model_from_config(kind, |p| params.get(p).copied()).map_err(|e| self.bad("coefficients.kind", e))
    }

    fn sampling(&self) -> RunResult<SamplingOptions> {
        let mut o = SamplingOptions::default();
        if let Some(eps) = self.f64_opt("eps")? {
            if !(eps > 0.0) {
                return Err(self.bad("eps", "must be positive"));
            }
            o.eps = eps;
        }
        if let Some(h) = self.usize_opt("head_n")? {
            if h < 2 {
                return Err(self.bad("head_n", "must be at least 2"));
            }
            o.head_n = h;
        }
        Ok(o)
    }

    fn positive(&self, key: &str) -> RunResult<f64> {
        let v = self.f64_req(key)?;
        if !(v > 0.0) {
            return Err(self.bad(key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    fn replicates(&self, min: usize) -> RunResult<usize> {
        let m = self.usize_req("replicates")?;
        if m < min {
            return Err(self.bad("replicates", format!("needs at least {min}, got {m}")));
        }
        Ok(m)
    }
}

fn parse_u64(v: &str) -> Option<u64> {
    if let Ok(n) = v.parse::<u64>() {
        return Some(n);
    }
    // accept integral floats such as 1e5
    let x = v.parse::<f64>().ok()?;
    (x >= 0.0 && x.fract() == 0.0 && x < 1.8e19).then_some(x as u64)
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
pub fn parse_complex(t: &str) -> Option<Complex64> {
    let t = t.replace(' ', "");
    if t.is_empty() {
        return None;
    }
    let finite = |x: f64| x.is_finite().then_some(x);
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return finite(t.parse().ok()?).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok().and_then(finite),
    };
    match split {
        Some(k) => Some(Complex64::new(finite(body[..k].parse().ok()?)?, imag(&body[k..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

/// Experiments the driver knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Clt,
    Covariance,
    ZerosComplex,
    ZerosReal,
    NrDist,
    Lil,
    ZetaCheck,
    GafSample,
    SigmaC,
}

impl ExperimentKind {
    pub const ALL: [Self; 9] = [
        Self::Clt,
        Self::Covariance,
        Self::ZerosComplex,
        Self::ZerosReal,
        Self::NrDist,
        Self::Lil,
        Self::ZetaCheck,
        Self::GafSample,
        Self::SigmaC,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Clt => "clt",
            Self::Covariance => "covariance",
            Self::ZerosComplex => "zeros-complex",
            Self::ZerosReal => "zeros-real",
            Self::NrDist => "nr-dist",
            Self::Lil => "lil",
            Self::ZetaCheck => "zeta-check",
            Self::GafSample => "gaf-sample",
            Self::SigmaC => "sigma-c",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    fn stochastic(&self) -> bool {
        !matches!(self, Self::NrDist | Self::ZetaCheck)
    }
}

/// Reports and CSV payloads of one run, in emission order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub experiment: ExperimentKind,
    pub reports: Vec<StatReport>,
    pub artifacts: Vec<(String, String)>,
}

impl RunOutput {
    /// True when every hard verdict passed; smoke verdicts never fail a run.
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn report_json(&self) -> String {
        let v = serde_json::json!({ "experiment": self.experiment.name(), "reports": self.reports });
        serde_json::to_string_pretty(&v).expect("reports serialize") + "\n"
    }
}

/// Validates `cfg` and runs its experiment on the current rayon pool, or on
/// a dedicated pool when `threads` is set. Nothing is written to disk.
pub fn execute(cfg: &Config) -> RunResult<RunOutput> {
    let name = cfg.required("experiment")?;
    let kind =
        ExperimentKind::parse(name).ok_or_else(|| cfg.bad("experiment", format!("unknown experiment `{name}`")))?;
    if kind.stochastic() {
        cfg.u64_req("seed")?;
    }
    let threads = cfg.usize_opt("threads")?;
    if threads == Some(0) {
        return Err(cfg.bad("threads", "must be at least 1"));
    }
    let run = || dispatch(kind, cfg);
    let (reports, artifacts) = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Resource(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let mut artifacts = artifacts;
    artifacts.push(("report.csv".to_string(), reports_to_csv(&reports)));
    Ok(RunOutput { experiment: kind, reports, artifacts })
}

type Produced = (Vec<StatReport>, Vec<(String, String)>);

fn dispatch(kind: ExperimentKind, cfg: &Config) -> RunResult<Produced> {
    match kind {
        ExperimentKind::Clt => run_clt(cfg),
        ExperimentKind::Covariance => run_covariance(cfg),
        ExperimentKind::ZerosComplex => run_zeros_complex(cfg),
        ExperimentKind::ZerosReal => run_zeros_real(cfg),
        ExperimentKind::NrDist => run_nr_dist(cfg),
        ExperimentKind::Lil => run_lil(cfg),
        ExperimentKind::ZetaCheck => run_zeta(cfg),
        ExperimentKind::GafSample => run_gaf_sample(cfg),
        ExperimentKind::SigmaC => run_sigma_c(cfg),
    }
}

fn alpha_zero(cfg: &Config) -> RunResult<()> {
    match cfg.f64_opt("alpha")? {
        Some(a) if a != 0.0 => Err(cfg.bad("alpha", "this experiment requires alpha = 0")),
        _ => Ok(()),
    }
}

fn run_clt(cfg: &Config) -> RunResult<Produced> {
    let model = cfg.model()?;
    let alpha = cfg.f64_req("alpha")?;
    let s = cfg.positive("s")?;
    let m = cfg.replicates(500)?;
    let seed = cfg.u64_req("seed")?;
    let normalizer = match cfg.get("normalizer").unwrap_or("exact") {
        "exact" => Normalizer::Exact,
        "drop-two-power" => Normalizer::DropTwoPower,
        other => return Err(cfg.bad("normalizer", format!("expected exact or drop-two-power, got `{other}`"))),
    };
    let out = clt_normality_check(model, alpha, s, m, seed, &cfg.sampling()?, normalizer)?;
    let mut w = CsvWriter::new(&["replicate", "value"]);
    for (i, v) in out.values.iter().enumerate() {
        w.row(&[i.to_string(), fmt_f64(*v)]);
    }
    Ok((vec![out.report], vec![("clt_values.csv".into(), w.finish())]))
}

fn run_covariance(cfg: &Config) -> RunResult<Produced> {
    let model = cfg.model()?;
    let alpha = cfg.f64_req("alpha")?;
    cfg.required("s_grid")?;
    cfg.required("grid")?;
    let s_list = cfg.f64_list("s_grid")?.expect("present");
    let grid = cfg.complex_list("grid")?.expect("present");
    let m = cfg.replicates(30)?;
    let seed = cfg.u64_req("seed")?;
    let out = covariance_convergence(model, alpha, &s_list, &grid, m, seed, &cfg.sampling()?)?;
    Ok((vec![out.report.clone()], vec![("covariance.csv".into(), out.to_csv())]))
}

fn zero_options(cfg: &Config) -> RunResult<ZeroSearchOptions> {
    let mut o = ZeroSearchOptions { sampling: cfg.sampling()?, ..Default::default() };
    if let Some(m) = cfg.f64_opt("margin")? {
        if !(m > 0.0) {
            return Err(cfg.bad("margin", "must be positive"));
        }
        o.margin = m;
    }
    if let Some(t) = cfg.f64_opt("rel_tol")? {
        if !(t > 0.0 && t < 1.0) {
            return Err(cfg.bad("rel_tol", "must lie in (0, 1)"));
        }
        o.rel_tol = t;
    }
    Ok(o)
}

fn run_zeros_complex(cfg: &Config) -> RunResult<Produced> {
    alpha_zero(cfg)?;
    let model = cfg.model()?;
    let s = cfg.positive("s")?;
    let r = cfg.f64_req("r")?;
    if !(r > 0.0 && r < 1.0) {
        return Err(cfg.bad("r", "must lie in (0, 1)"));
    }
    let m = cfg.replicates(1)?;
    let seed = cfg.u64_req("seed")?;
    let out = zero_count_experiment(model, s, r, m, seed, &zero_options(cfg)?)?;
    let mut w = CsvWriter::new(&["replicate", "count"]);
    for (i, c) in out.counts.iter().enumerate() {
        w.row(&[i.to_string(), c.to_string()]);
    }
    Ok((
        vec![out.report.clone()],
        vec![("zero_count_pmf.csv".into(), out.to_csv()), ("zero_counts.csv".into(), w.finish())],
    ))
}

fn run_zeros_real(cfg: &Config) -> RunResult<Produced> {
    alpha_zero(cfg)?;
    let model = cfg.model()?;
    let s = cfg.positive("s")?;
    cfg.required("window")?;
    let window = cfg.f64_list("window")?.expect("present");
    if window.len() != 2 {
        return Err(cfg.bad("window", "expected two numbers a,b"));
    }
    let m = cfg.replicates(2)?;
    let seed = cfg.u64_req("seed")?;
    let out = real_zero_process_comparison(model, s, (window[0], window[1]), m, seed, &cfg.sampling()?)?;
    let mut w = CsvWriter::new(&["replicate", "series_count", "limit_count"]);
    for (i, (a, b)) in out.series_counts.iter().zip(&out.limit_counts).enumerate() {
        w.row(&[i.to_string(), a.to_string(), b.to_string()]);
    }
    Ok((
        vec![out.report.clone()],
        vec![("real_zero_pmf.csv".into(), out.to_csv()), ("real_zero_counts.csv".into(), w.finish())],
    ))
}

fn run_nr_dist(cfg: &Config) -> RunResult<Produced> {
    let r = cfg.f64_req("r")?;
    if !(r > 0.0 && r < 1.0) {
        return Err(cfg.bad("r", "must lie in (0, 1)"));
    }
    let law = zero_count_pmf(r)?;
    let r2 = r * r;
    let mean_err = (law.mean() - r2 / (1.0 - r2)).abs();
    let sum_err = (law.pmf.iter().sum::<f64>() - 1.0).abs();
    let report = StatReport::new("nr-dist", mean_err, 0, None, Verdict::from_pass(mean_err < 1e-12 && sum_err < 1e-12))
        .detail("r", r)
        .detail("k_max", law.k_max as f64)
        .detail("normalization_error", sum_err)
        .detail("variance", law.variance());
    Ok((vec![report], vec![("nr_pmf.csv".into(), law.to_csv())]))
}

fn run_lil(cfg: &Config) -> RunResult<Produced> {
    let model = cfg.model()?;
    let alpha = cfg.f64_req("alpha")?;
    let seed = cfg.u64_req("seed")?;
    let grid = match cfg.f64_list("s_grid")? {
        Some(g) => g,
        None => {
            let hi = cfg.f64_opt("s_max")?.unwrap_or(1e-2);
            let lo = cfg.f64_opt("s_min")?.unwrap_or(1e-6);
            let n = cfg.usize_opt("points")?.unwrap_or(LIL_DEFAULT_POINTS);
            if n == 0 || !(lo > 0.0 && lo < hi) {
                return Err(RunError::Config("LIL grid needs points >= 1 and 0 < s_min < s_max".into()));
            }
            geometric_grid(hi, lo, n)
        }
    };
    let sigma1_sq = implied_covariance(&model).sigma1_sq();
    let params = LilParams::new(alpha, sigma1_sq, grid).map_err(|e| cfg.bad("s_grid", e))?;
    let head_n = cfg.usize_opt("head_n")?.unwrap_or(LIL_DEFAULT_HEAD_N);
    let out = lil_band_check(model, &params, seed, head_n)?;
    Ok((vec![out.report.clone()], vec![("lil.csv".into(), out.to_csv())]))
}

fn run_zeta(cfg: &Config) -> RunResult<Produced> {
    let beta = cfg.f64_req("beta")?;
    cfg.required("s")?;
    let moduli = cfg.f64_list("s")?.expect("present");
    let rows = zeta_limit_check(beta, &zeta_ray(&moduli))?;
    Ok((vec![zeta_report(beta, &rows)], vec![("zeta.csv".into(), zeta_rows_to_csv(beta, &rows))]))
}

fn run_gaf_sample(cfg: &Config) -> RunResult<Produced> {
    let model = cfg.model()?;
    let alpha = cfg.f64_req("alpha")?;
    cfg.required("grid")?;
    let grid = cfg.complex_list("grid")?.expect("present");
    let seed = cfg.u64_req("seed")?;
    let m = cfg.usize_opt("replicates")?.unwrap_or(1).max(1);
    let params = KernelParams::new(alpha, implied_covariance(&model))?;
    let sampler = cfg.get("sampler").unwrap_or("cholesky");
    let draw: Box<dyn Fn(u64) -> Vec<Complex64> + Sync> = match sampler {
        "cholesky" => {
            let s = CholeskySampler::new(&params, &grid)?;
            Box::new(move |r| s.sample(&mut keyed_rng(seed, r, StreamPurpose::LimitProcess)).values)
        }
        "integral" => {
            let s = IntegralSampler::new(&params, &grid, cfg.f64_opt("y_max")?, cfg.usize_opt("cells")?)?;
            Box::new(move |r| s.sample(&mut keyed_rng(seed, r, StreamPurpose::LimitProcess)).values)
        }
        other => return Err(cfg.bad("sampler", format!("expected cholesky or integral, got `{other}`"))),
    };
    let samples = crate::stats_harness::map_replicates(m, |r| Ok(draw(r)))?;
    let mut w = CsvWriter::new(&["replicate", "re_z", "im_z", "re_val", "im_val"]);
    for (r, vals) in samples.iter().enumerate() {
        for (z, v) in grid.iter().zip(vals) {
            w.row(&[r.to_string(), fmt_f64(z.re), fmt_f64(z.im), fmt_f64(v.re), fmt_f64(v.im)]);
        }
    }
    let mut report = StatReport::new("gaf-sample", 0.0, m, Some(seed), Verdict::Smoke).detail("alpha", alpha);
    report.note = Some(format!("{sampler} sampler, data only"));
    Ok((vec![report], vec![("gaf_samples.csv".into(), w.finish())]))
}

fn run_sigma_c(cfg: &Config) -> RunResult<Produced> {
    let model = cfg.model()?;
    let alpha = cfg.f64_req("alpha")?;
    let n_max = cfg.usize_req("n_max")?;
    let seed = cfg.u64_req("seed")?;
    let report = sigma_c_report(model, alpha, n_max, seed)?;
    let mut w = CsvWriter::new(&["n_max", "alpha", "sigma_c_estimate"]);
    w.row(&[n_max.to_string(), fmt_f64(alpha), fmt_f64(report.statistic)]);
    Ok((vec![report], vec![("sigma_c.csv".into(), w.finish())]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub experiment: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub format: u32,
    pub config: BTreeMap<String, String>,
    pub artifacts: Vec<ArtifactRecord>,
    pub verdicts: Vec<VerdictRecord>,
    pub wall_clock_seconds: f64,
}

/// Runs `cfg`, writes artifacts, report and manifest under `output_dir`
/// and returns the exit code the CLI would use.
pub fn run_to_dir(cfg: &Config) -> RunResult<(RunOutput, PathBuf)> {
    let start = Instant::now();
    let out = execute(cfg)?;
    let dir = PathBuf::from(cfg.get("output_dir").unwrap_or(DEFAULT_OUTPUT_DIR));
    fs::create_dir_all(&dir)?;
    let mut artifacts = Vec::new();
    for (name, body) in &out.artifacts {
        fs::write(dir.join(name), body)?;
        artifacts.push(ArtifactRecord { file: name.clone(), sha256: hex_digest(body.as_bytes()) });
    }
    fs::write(dir.join(REPORT_FILE), out.report_json())?;
    let manifest = RunManifest {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        format: FORMAT_VERSION,
        config: cfg.echo(),
        artifacts,
        verdicts: out
            .reports
            .iter()
            .map(|r| VerdictRecord { experiment: r.experiment.clone(), verdict: r.verdict })
            .collect(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")?;
    Ok((out, dir))
}

/// Re-executes the run recorded in `manifest_path` and byte-compares every
/// CSV payload with the recorded digest and with the file beside the
/// manifest, when present.
pub fn replay(manifest_path: &Path, threads: Option<usize>) -> RunResult<RunOutput> {
    let text = fs::read_to_string(manifest_path)?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| RunError::Replay(format!("unreadable manifest: {e}")))?;
    if manifest.tool != TOOL_NAME || manifest.version != TOOL_VERSION || manifest.format != FORMAT_VERSION {
        return Err(RunError::Replay(format!(
            "manifest is from {} {} (format {}), this is {TOOL_NAME} {TOOL_VERSION} (format {FORMAT_VERSION})",
            manifest.tool, manifest.version, manifest.format
        )));
    }
    let mut cfg = Config::from_echo(&manifest.config)?;
    if let Some(n) = threads {
        cfg.set_flag("threads", &n.to_string())?;
    }
    let out = execute(&cfg)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let names: Vec<&str> = out.artifacts.iter().map(|a| a.0.as_str()).collect();
    let recorded: Vec<&str> = manifest.artifacts.iter().map(|a| a.file.as_str()).collect();
    if names != recorded {
        return Err(RunError::Replay(format!("artifact list differs: {names:?} vs {recorded:?}")));
    }
    for ((name, body), rec) in out.artifacts.iter().zip(&manifest.artifacts) {
        if hex_digest(body.as_bytes()) != rec.sha256 {
            return Err(RunError::Replay(format!("{name}: payload digest differs from manifest")));
        }
        let on_disk = dir.join(name);
        if on_disk.exists() && fs::read(&on_disk)? != body.as_bytes() {
            return Err(RunError::Replay(format!("{name}: payload differs from {}", on_disk.display())));
        }
    }
    Ok(out)
}

pub const USAGE: &str =
    "usage:\n  rdseries run [--config FILE] [--key value]...\n  rdseries replay MANIFEST [--threads N]";

fn parse_flags(args: &[String]) -> RunResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let key = a.strip_prefix("--").ok_or_else(|| RunError::Config(format!("unexpected argument `{a}`")))?;
        let (k, v) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| RunError::Config(format!("flag --{key} needs a value")))?;
                (key.to_string(), v.clone())
            }
        };
        out.push((k, v));
    }
    Ok(out)
}

fn summarize(out: &RunOutput) {
    for r in &out.reports {
        let mut line = format!("{} {} statistic={}", r.experiment, r.verdict.as_str(), r.statistic);
        if let Some(p) = r.p_value {
            line.push_str(&format!(" p_value={p}"));
        }
        if let Some(tv) = r.tv_distance {
            line.push_str(&format!(" tv_distance={tv}"));
        }
        println!("{line}");
    }
}

fn cli(args: &[String]) -> RunResult<i32> {
    match args.first().map(String::as_str) {
        Some("run") => {
            let flags = parse_flags(&args[1..])?;
            let mut cfg = Config::default();
            if let Some((_, path)) = flags.iter().find(|(k, _)| k == "config") {
                let text = fs::read_to_string(path)
                    .map_err(|e| RunError::Config(format!("cannot read config {path}: {e}")))?;
                cfg = Config::parse(&text).map_err(|e| match e {
                    RunError::Config(m) => RunError::Config(format!("{path}: {m}")),
                    other => other,
                })?;
            }
            for (k, v) in flags.iter().filter(|(k, _)| k != "config") {
                cfg.set_flag(k, v)?;
            }
            let (out, dir) = run_to_dir(&cfg)?;
            summarize(&out);
            println!("artifacts written to {}", dir.display());
            Ok(if out.passed() { EXIT_PASS } else { EXIT_FAIL })
        }
        Some("replay") => {
            let path = args.get(1).ok_or_else(|| RunError::Config("replay needs a manifest path".into()))?;
            let flags = parse_flags(&args[2..])?;
            let mut threads = None;
            for (k, v) in flags {
                match k.as_str() {
                    "threads" => {
                        threads = Some(parse_u64(&v).filter(|&n| n > 0).ok_or_else(|| {
                            RunError::Config(format!("flag --threads: expected a positive integer, got `{v}`"))
                        })? as usize)
                    }
                    other => return Err(RunError::Config(format!("replay does not take --{other}"))),
                }
            }
            let out = replay(Path::new(path), threads)?;
            println!("replay identical: {} artifacts", out.artifacts.len());
            Ok(EXIT_PASS)
        }
        _ => Err(RunError::Config(USAGE.into())),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args(args: &[String]) -> i32 {
    match cli(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_aliases() {
        let cfg =
            Config::parse("# demo\nexperiment = clt\nmodel = rademacher\n[coefficients]\nvariance = 2 # inline\n")
                .unwrap();
        assert_eq!(cfg.get("coefficients.kind"), Some("rademacher"));
        assert_eq!(cfg.get("coefficients.variance"), Some("2"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = Config::parse("experiment = clt\nbogus = 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = Config::parse("alpha = 0\nalpha = 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2") && e.to_string().contains("line 1"), "{e}");
        let cfg = Config::parse("experiment = clt\nalpha = x\n").unwrap();
        let e = cfg.f64_req("alpha").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert_eq!(e.exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn missing_key_is_named() {
        let mut cfg = Config::default();
        for (k, v) in
            [("experiment", "clt"), ("model", "rademacher"), ("s", "2e-3"), ("replicates", "500"), ("seed", "1")]
        {
            cfg.set_flag(k, v).unwrap();
        }
        let e = execute(&cfg).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
        assert!(e.to_string().contains("`alpha`"), "{e}");
    }

    #[test]
    fn complex_literals() {
        let c = |re, im| Some(Complex64::new(re, im));
        assert_eq!(parse_complex("0.7+0.8i"), c(0.7, 0.8));
        assert_eq!(parse_complex("1.5-0.4i"), c(1.5, -0.4));
        assert_eq!(parse_complex("2"), c(2.0, 0.0));
        assert_eq!(parse_complex("-i"), c(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e-3i"), c(1e-3, 2e-3));
        assert_eq!(parse_complex("3j"), c(0.0, 3.0));
        assert_eq!(parse_complex("1+"), None);
        assert_eq!(parse_complex("abc"), None);
    }

    #[test]
    fn flags_override_file() {
        let mut cfg = Config::parse("experiment = zeta-check\nbeta = 1\ns = 1e-3\n").unwrap();
        cfg.set_flag("beta", "0").unwrap();
        let out = execute(&cfg).unwrap();
        assert_eq!(out.reports[0].details["beta"], 0.0);
        assert!(out.passed());
    }

    #[test]
    fn resource_cap_maps_to_exit_three() {
        let e: RunError = Error::ResourceCap { cap: 10 }.into();
        assert_eq!(e.exit_code(), EXIT_RESOURCE);
    }
}
