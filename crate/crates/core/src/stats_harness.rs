//! Monte Carlo checks of sampled series against their limit laws.
//!
//! Every experiment binds replicate `r` to the coefficient stream
//! `(seed, r)`, runs replicates on the rayon pool and collects them in
//! replicate order, so reports do not depend on the thread count.

use crate::coeff_models::{implied_covariance, keyed_rng, CoefficientModel, CoefficientStream, StreamPurpose};
use crate::csv_out::{fmt_f64, CsvWriter};
use crate::error::{Error, Result};
use crate::limit_gaf::{
    eval_power_series, kernel_hermitian, kernel_pseudo, mobius_inv, sample_power_series_gaf, KernelParams,
};
use crate::series_eval::check_alpha;
use crate::special::{gamma, pairwise_sum, pairwise_sum_complex, upper_gamma_complex, KahanSum};
use crate::synthesis::{
    head_weights, plan_truncation, PathSampler, PointTailSampler, SeriesPath, TruncationPlan, DEFAULT_DIRECT_CAP,
    DEFAULT_HEAD_N,
};
use crate::zero_finder::{count_in_mapped_disk, covering_rectangle, locate_zeros, real_zeros, Shape};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, SQRT_2};

/// KS p-value above which the CLT check passes.
pub const KS_PASS_P: f64 = 1e-3;
/// TV bound for the complex zero-count law.
pub const ZERO_COUNT_TV: f64 = 0.1;
/// TV bound for the real-zero comparison.
pub const REAL_ZERO_TV: f64 = 0.15;
/// Band half-width, in standard errors, for covariance entries.
pub const COVARIANCE_SE_BAND: f64 = 5.0;
/// Smallest paired sample accepted by the covariance estimator.
pub const MIN_PAIRED: usize = 30;
/// Truncation of the Bernoulli product: stop once r^{2k} drops below this.
pub const PMF_CUTOFF: f64 = 1e-15;
/// Terms summed explicitly before the integral tail in the zeta check.
pub const ZETA_TERMS: u64 = 100_000;
/// Minimum expected count per chi-square bin.
pub const CHI_SQUARE_MIN_EXPECTED: f64 = 5.0;
/// Terms kept in real power-series limit samples.
pub const POWER_SERIES_MIN_TERMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Smoke,
}

impl Verdict {
    pub fn from_pass(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Smoke => "smoke",
        }
    }
}

/// Outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub experiment: String,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tv_distance: Option<f64>,
    pub n_replicates: usize,
    pub seed: Option<u64>,
    pub verdict: Verdict,
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl StatReport {
    pub fn new(experiment: &str, statistic: f64, n_replicates: usize, seed: Option<u64>, verdict: Verdict) -> Self {
        Self {
            experiment: experiment.to_string(),
            statistic,
            p_value: None,
            tv_distance: None,
            n_replicates,
            seed,
            verdict,
            details: BTreeMap::new(),
            note: None,
        }
    }

    pub fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: [&'static str; 7] =
        ["experiment", "statistic", "p_value", "tv_distance", "n_replicates", "seed", "verdict"];

    pub fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        vec![
            self.experiment.clone(),
            fmt_f64(self.statistic),
            opt(self.p_value),
            opt(self.tv_distance),
            self.n_replicates.to_string(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.verdict.as_str().to_string(),
        ]
    }
}

/// Reports as a checksummed CSV table.
pub fn reports_to_csv(reports: &[StatReport]) -> String {
    let mut w = CsvWriter::new(&StatReport::CSV_HEADER);
    for r in reports {
        w.row(&r.csv_fields());
    }
    w.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateMeta {
    pub alpha: f64,
    pub s: f64,
    pub model: String,
    pub seed: u64,
}

/// One value per replicate; replicate `r` came from stream `(seed, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSet {
    pub values: Vec<Complex64>,
    pub meta: ReplicateMeta,
}

impl ReplicateSet {
    pub fn new(values: Vec<Complex64>, meta: ReplicateMeta) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyRequest("replicate set is empty"));
        }
        Ok(Self { values, meta })
    }

    pub fn from_real(values: &[f64], meta: ReplicateMeta) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect(), meta)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Empirical second moments with per-component standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceEstimate {
    pub pseudo: Complex64,
    pub hermitian: Complex64,
    /// Largest of the four component standard errors.
    pub se: f64,
    /// (re, im) standard errors of the pseudo-covariance.
    pub se_pseudo: [f64; 2],
    /// (re, im) standard errors of the hermitian covariance.
    pub se_hermitian: [f64; 2],
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = pairwise_sum(xs) / m;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// mean(x·y) and mean(x·ȳ) over paired samples.
pub fn complex_covariance(xs: &[Complex64], ys: &[Complex64]) -> Result<CovarianceEstimate> {
    if xs.len() != ys.len() {
        return Err(Error::Pairing(format!("{} vs {} replicates", xs.len(), ys.len())));
    }
    if xs.len() < MIN_PAIRED {
        return Err(Error::Pairing(format!("need at least {MIN_PAIRED} paired replicates, got {}", xs.len())));
    }
    let prod = |f: &dyn Fn(Complex64, Complex64) -> Complex64| -> Vec<Complex64> {
        xs.iter().zip(ys).map(|(&x, &y)| f(x, y)).collect()
    };
    let pseudo = prod(&|x, y| x * y);
    let herm = prod(&|x, y| x * y.conj());
    let parts = |v: &[Complex64]| {
        let re: Vec<f64> = v.iter().map(|c| c.re).collect();
        let im: Vec<f64> = v.iter().map(|c| c.im).collect();
        let (mr, sr) = mean_and_se(&re);
        let (mi, si) = mean_and_se(&im);
        (Complex64::new(mr, mi), [sr, si])
    };
    let (p, sp) = parts(&pseudo);
    let (h, sh) = parts(&herm);
    let se = sp.iter().chain(&sh).fold(0.0f64, |a, &b| a.max(b));
    Ok(CovarianceEstimate { pseudo: p, hermitian: h, se, se_pseudo: sp, se_hermitian: sh })
}

pub fn empirical_complex_covariance(xs: &ReplicateSet, ys: &ReplicateSet) -> Result<CovarianceEstimate> {
    if xs.meta.seed != ys.meta.seed {
        return Err(Error::Pairing(format!("seeds differ: {} vs {}", xs.meta.seed, ys.meta.seed)));
    }
    complex_covariance(&xs.values, &ys.values)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Kolmogorov survival function Q(λ) = 2 Σ (−1)^{j−1} e^{−2 j² λ²}.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test against `cdf`: (D, asymptotic p-value).
pub fn ks_test(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyRequest("KS test needs data"));
    }
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    let en = n.sqrt();
    Ok((d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)))
}

pub fn ks_standard_normal(values: &[f64]) -> Result<(f64, f64)> {
    ks_test(values, normal_cdf)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

// Groups adjacent bins from the top down until each group reaches the
// minimum expected count; an undersized bottom group joins its neighbour.
fn merge_bins(n_bins: usize, enough: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut hi = n_bins;
    let mut j = n_bins;
    while j > 0 {
        j -= 1;
        if enough(j, hi) {
            groups.push((j, hi));
            hi = j;
        }
    }
    if hi > 0 {
        match groups.last_mut() {
            Some(last) => last.0 = 0,
            None => groups.push((0, hi)),
        }
    }
    groups.reverse();
    groups
}

fn chi_square_p(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN)
}

/// Goodness of fit of integer counts to `probs`, bins merged to expected ≥ 5.
pub fn chi_square_gof(histogram: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    let m: u64 = histogram.iter().sum();
    if m == 0 {
        return Err(Error::EmptyRequest("chi-square needs data"));
    }
    let n_bins = histogram.len().max(probs.len());
    let obs = |j: usize| histogram.get(j).copied().unwrap_or(0) as f64;
    let exp = |j: usize| probs.get(j).copied().unwrap_or(0.0) * m as f64;
    let sum = |f: &dyn Fn(usize) -> f64, a: usize, b: usize| (a..b).map(f).sum::<f64>();
    let groups = merge_bins(n_bins, |a, b| sum(&exp, a, b) >= CHI_SQUARE_MIN_EXPECTED);
    let mut stat = 0.0;
    for &(a, b) in &groups {
        let (o, e) = (sum(&obs, a, b), sum(&exp, a, b));
        if e > 0.0 {
            stat += (o - e) * (o - e) / e;
        } else if o > 0.0 {
            stat = f64::INFINITY;
        }
    }
    let df = groups.len().saturating_sub(1);
    Ok(ChiSquare { statistic: stat, df, p_value: chi_square_p(stat, df) })
}

/// Two-sample homogeneity test on count histograms.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquare> {
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::EmptyRequest("chi-square needs data in both samples"));
    }
    let n_bins = a.len().max(b.len());
    let get = |h: &[u64], j: usize| h.get(j).copied().unwrap_or(0) as f64;
    let pooled = |lo: usize, hi: usize| (lo..hi).map(|j| get(a, j) + get(b, j)).sum::<f64>();
    let total = na + nb;
    let groups = merge_bins(n_bins, |lo, hi| {
        let p = pooled(lo, hi);
        p * na.min(nb) / total >= CHI_SQUARE_MIN_EXPECTED
    });
    let mut stat = 0.0;
    for &(lo, hi) in &groups {
        let p = pooled(lo, hi);
        for (h, n) in [(a, na), (b, nb)] {
            let e = p * n / total;
            let o: f64 = (lo..hi).map(|j| get(h, j)).sum();
            if e > 0.0 {
                stat += (o - e) * (o - e) / e;
            }
        }
    }
    let df = groups.len().saturating_sub(1);
    Ok(ChiSquare { statistic: stat, df, p_value: chi_square_p(stat, df) })
}

pub fn histogram(counts: &[u32]) -> Vec<u64> {
    let top = counts.iter().copied().max().unwrap_or(0) as usize;
    let mut h = vec![0u64; top + 1];
    for &c in counts {
        h[c as usize] += 1;
    }
    h
}

pub fn empirical_pmf(counts: &[u32]) -> Vec<f64> {
    let m = counts.len() as f64;
    histogram(counts).into_iter().map(|c| c as f64 / m).collect()
}

/// ½ Σ |p_j − q_j|, shorter vector padded with zeros.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let diffs: Vec<f64> =
        (0..n).map(|j| (p.get(j).copied().unwrap_or(0.0) - q.get(j).copied().unwrap_or(0.0)).abs()).collect();
    0.5 * pairwise_sum(&diffs)
}

fn mean_var_counts(counts: &[u32]) -> (f64, f64) {
    let xs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (mean, se) = mean_and_se(&xs);
    (mean, se * se * xs.len() as f64)
}

/// Maps replicates in parallel and returns them in replicate order.
pub fn map_replicates<T, F>(m: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..m as u64).into_par_iter().map(f).collect()
}

/// Knobs shared by the series-sampling experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    /// Target tail standard deviation for a direct truncation.
    pub eps: f64,
    /// Exact head length when a synthesized tail is needed.
    pub head_n: usize,
    /// Largest N accepted for a direct truncation.
    pub direct_cap: u64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self { eps: 1e-3, head_n: DEFAULT_HEAD_N, direct_cap: DEFAULT_DIRECT_CAP }
    }
}

impl SamplingOptions {
    pub fn plan(&self, alpha: f64, s: f64, x_min: f64, second_moment: f64) -> Result<TruncationPlan> {
        plan_truncation(alpha, s, x_min, self.eps, second_moment, self.direct_cap, self.head_n)
    }
}

/// Values of D(α; 1/2 + a_p) at a fixed list of shifts, using precomputed
/// head weights and the exact point law of the tail.
#[derive(Debug, Clone)]
pub struct PointEvaluator {
    model: CoefficientModel,
    head_n: usize,
    weights: Vec<Vec<Complex64>>,
    tail: Option<PointTailSampler>,
}

impl PointEvaluator {
    pub fn new(model: CoefficientModel, alpha: f64, plan: &TruncationPlan, shifts: &[Complex64]) -> Result<Self> {
        let head_n = plan.head_n();
        let weights = shifts.iter().map(|&a| head_weights(alpha, head_n, a)).collect::<Result<Vec<_>>>()?;
        let tail = match plan {
            TruncationPlan::Direct { .. } => None,
            TruncationPlan::Hybrid { layout, .. } => {
                Some(PointTailSampler::new(alpha, &implied_covariance(&model), layout.u_start, shifts)?)
            }
        };
        Ok(Self { model, head_n, weights, tail })
    }

    pub fn eval(&self, seed: u64, replicate: u64) -> Result<Vec<Complex64>> {
        let stream = CoefficientStream::new(self.model, seed, replicate);
        let coeffs = stream.sample_pairs(self.head_n - 1)?;
        let mut out: Vec<Complex64> = self
            .weights
            .iter()
            .map(|w| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, w) in coeffs.iter().zip(w) {
                    acc += Complex64::new(w.re * c.0 - w.im * c.1, w.re * c.1 + w.im * c.0);
                }
                acc
            })
            .collect();
        if let Some(t) = &self.tail {
            let mut rng = keyed_rng(seed, replicate, StreamPurpose::GaussianTail);
            for (o, v) in out.iter_mut().zip(t.sample(&mut rng)) {
                *o += v;
            }
        }
        Ok(out)
    }
}

/// How the CLT replicates are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizer {
    /// ((2s)^{1+2α} / (Γ(1+2α) σ₁²))^{1/2}
    Exact,
    /// The same without the 2^{1+2α}; a negative control.
    DropTwoPower,
}

impl Normalizer {
    pub fn factor(&self, alpha: f64, s: f64, sigma1_sq: f64) -> f64 {
        let base = match self {
            Self::Exact => 2.0 * s,
            Self::DropTwoPower => s,
        };
        (base.powf(1.0 + 2.0 * alpha) / (gamma(1.0 + 2.0 * alpha) * sigma1_sq)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltOutcome {
    pub report: StatReport,
    pub values: Vec<f64>,
}

/// KS test of normalized real sums Σ (log k)^α k^{−1/2−s} η_k against N(0, 1).
pub fn clt_normality_check(
    model: CoefficientModel,
    alpha: f64,
    s: f64,
    m: usize,
    seed: u64,
    opts: &SamplingOptions,
    normalizer: Normalizer,
) -> Result<CltOutcome> {
    check_alpha(alpha)?;
    if !model.is_real() {
        return Err(Error::InvalidArgument(format!("CLT check needs a real model, got {}", model.kind_name())));
    }
    if !(s > 0.0 && s < 0.1) {
        return Err(Error::InvalidArgument(format!("CLT check needs 0 < s < 0.1, got {s}")));
    }
    if m < 500 {
        return Err(Error::InvalidArgument(format!("CLT check needs at least 500 replicates, got {m}")));
    }
    let cov = implied_covariance(&model);
    let plan = opts.plan(alpha, s, 1.0, cov.second_moment())?;
    let eval = PointEvaluator::new(model, alpha, &plan, &[Complex64::new(s, 0.0)])?;
    let k = normalizer.factor(alpha, s, cov.sigma1_sq());
    let values = map_replicates(m, |r| Ok(eval.eval(seed, r)?[0].re * k))?;
    let (d, p) = ks_standard_normal(&values)?;
    let mut report = StatReport::new("clt", d, m, Some(seed), Verdict::from_pass(p > KS_PASS_P))
        .detail("alpha", alpha)
        .detail("s", s)
        .detail("head_n", plan.head_n() as f64);
    report.p_value = Some(p);
    if normalizer == Normalizer::DropTwoPower {
        report.note = Some("negative control: normalizer without 2^(1+2 alpha)".into());
    }
    Ok(CltOutcome { report, values })
}

/// One covariance entry of the convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceRow {
    pub s: f64,
    pub i: usize,
    pub j: usize,
    pub hermitian: bool,
    pub empirical: Complex64,
    pub kernel: Complex64,
    pub se: [f64; 2],
}

impl CovarianceRow {
    /// Largest component deviation in units of its standard error.
    pub fn z_score(&self) -> f64 {
        let d = self.empirical - self.kernel;
        let z = |dev: f64, se: f64| {
            if se > 0.0 {
                dev.abs() / se
            } else if dev == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        };
        z(d.re, self.se[0]).max(z(d.im, self.se[1]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceOutcome {
    pub report: StatReport,
    pub rows: Vec<CovarianceRow>,
    /// (s, max entry deviation relative to the largest kernel variance)
    pub distances: Vec<(f64, f64)>,
}

impl CovarianceOutcome {
    pub fn to_csv(&self) -> String {
        let mut w =
            CsvWriter::new(&["s", "i", "j", "kind", "emp_re", "emp_im", "kernel_re", "kernel_im", "se_re", "se_im"]);
        for r in &self.rows {
            w.row(&[
                fmt_f64(r.s),
                r.i.to_string(),
                r.j.to_string(),
                if r.hermitian { "hermitian" } else { "pseudo" }.to_string(),
                fmt_f64(r.empirical.re),
                fmt_f64(r.empirical.im),
                fmt_f64(r.kernel.re),
                fmt_f64(r.kernel.im),
                fmt_f64(r.se[0]),
                fmt_f64(r.se[1]),
            ]);
        }
        w.finish()
    }
}

/// Empirical covariances of z ↦ s^{1/2+α} D(α; 1/2 + s z) on `grid` against
/// the limit kernels, for each s in `s_list` (common seeds across s).
/// Passes when the distance shrinks strictly along `s_list` and every entry
/// at the last s lies within [`COVARIANCE_SE_BAND`] standard errors.
pub fn covariance_convergence(
    model: CoefficientModel,
    alpha: f64,
    s_list: &[f64],
    grid: &[Complex64],
    m: usize,
    seed: u64,
    opts: &SamplingOptions,
) -> Result<CovarianceOutcome> {
    check_alpha(alpha)?;
    if s_list.is_empty() || grid.is_empty() {
        return Err(Error::EmptyRequest("covariance check needs scales and grid points"));
    }
    if let Some(s) = s_list.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::InvalidArgument(format!("scales must be positive, got {s}")));
    }
    if let Some(z) = grid.iter().find(|z| !(z.re > 0.0)) {
        return Err(Error::Domain(format!("grid point {z} is not in the right half-plane")));
    }
    let cov = implied_covariance(&model);
    let params = KernelParams::new(alpha, cov)?;
    let x_min = grid.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let scale = grid.iter().map(|&z| kernel_hermitian(&params, z, z).map(|v| v.re)).collect::<Result<Vec<_>>>()?;
    let scale = scale.into_iter().fold(0.0, f64::max);
    let mut rows = Vec::new();
    let mut distances = Vec::new();
    for &s in s_list {
        let plan = opts.plan(alpha, s, x_min, cov.second_moment())?;
        let shifts: Vec<Complex64> = grid.iter().map(|z| z * s).collect();
        let eval = PointEvaluator::new(model, alpha, &plan, &shifts)?;
        let pre = s.powf(0.5 + alpha);
        let samples = map_replicates(m, |r| Ok(eval.eval(seed, r)?.into_iter().map(|v| v * pre).collect::<Vec<_>>()))?;
        let mut dist: f64 = 0.0;
        for i in 0..grid.len() {
            let xi: Vec<Complex64> = samples.iter().map(|v| v[i]).collect();
            for j in i..grid.len() {
                let xj: Vec<Complex64> = samples.iter().map(|v| v[j]).collect();
                let est = complex_covariance(&xi, &xj)?;
                let kp = kernel_pseudo(&params, grid[i], grid[j])?;
                let kh = kernel_hermitian(&params, grid[i], grid[j])?;
                dist = dist.max((est.pseudo - kp).norm()).max((est.hermitian - kh).norm());
                rows.push(CovarianceRow {
                    s,
                    i,
                    j,
                    hermitian: false,
                    empirical: est.pseudo,
                    kernel: kp,
                    se: est.se_pseudo,
                });
                rows.push(CovarianceRow {
                    s,
                    i,
                    j,
                    hermitian: true,
                    empirical: est.hermitian,
                    kernel: kh,
                    se: est.se_hermitian,
                });
            }
        }
        distances.push((s, dist / scale));
    }
    let monotone = distances.windows(2).all(|w| w[1].1 < w[0].1);
    let last_s = distances.last().map(|d| d.0).unwrap_or(0.0);
    let max_z = rows.iter().filter(|r| r.s == last_s).map(CovarianceRow::z_score).fold(0.0, f64::max);
    let ok = monotone && max_z <= COVARIANCE_SE_BAND;
    let mut report = StatReport::new(
        "covariance",
        distances.last().map(|d| d.1).unwrap_or(0.0),
        m,
        Some(seed),
        Verdict::from_pass(ok),
    )
    .detail("alpha", alpha)
    .detail("max_z_final", max_z)
    .detail("monotone", if monotone { 1.0 } else { 0.0 });
    for (k, (s, d)) in distances.iter().enumerate() {
        report = report.detail(&format!("distance_{k}"), *d).detail(&format!("s_{k}"), *s);
    }
    Ok(CovarianceOutcome { report, rows, distances })
}

/// Law of N_r = Σ_k Bernoulli(r^{2k}), truncated at `k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCountLaw {
    pub r: f64,
    pub pmf: Vec<f64>,
    pub k_max: usize,
}

impl ZeroCountLaw {
    pub fn mean(&self) -> f64 {
        let terms: Vec<f64> = self.pmf.iter().enumerate().map(|(j, p)| j as f64 * p).collect();
        pairwise_sum(&terms)
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let terms: Vec<f64> = self.pmf.iter().enumerate().map(|(j, p)| (j as f64 - mu).powi(2) * p).collect();
        pairwise_sum(&terms)
    }

    /// E (1 + t)^{N_r} = Σ_j pmf_j (1 + t)^j.
    pub fn generating(&self, t: f64) -> f64 {
        self.pmf.iter().rev().fold(0.0, |acc, p| acc * (1.0 + t) + p)
    }

    pub fn to_csv(&self) -> String {
        let mut w =
            CsvWriter::with_comment(&format!("r={} k_max={}", fmt_f64(self.r), self.k_max), &["k", "probability"]);
        for (k, p) in self.pmf.iter().enumerate() {
            w.row(&[k.to_string(), fmt_f64(*p)]);
        }
        w.finish()
    }
}

pub fn zero_count_pmf(r: f64) -> Result<ZeroCountLaw> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("radius must lie in (0, 1), got {r}")));
    }
    let r2 = r * r;
    let mut pmf = vec![1.0];
    let mut q = 1.0;
    let mut k = 0;
    loop {
        k += 1;
        q *= r2;
        let mut next = vec![0.0; pmf.len() + 1];
        for (j, &p) in pmf.iter().enumerate() {
            next[j] += (1.0 - q) * p;
            next[j + 1] += q * p;
        }
        pmf = next;
        if q < PMF_CUTOFF {
            break;
        }
    }
    while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
        pmf.pop();
    }
    Ok(ZeroCountLaw { r, pmf, k_max: k })
}

/// Knobs for complex zero counting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSearchOptions {
    pub sampling: SamplingOptions,
    /// Relative padding of the rectangle around φ(𝔻(r)).
    pub margin: f64,
    /// Quadtree cell size, relative to the rectangle diameter.
    pub rel_tol: f64,
}

impl Default for ZeroSearchOptions {
    fn default() -> Self {
        Self { sampling: SamplingOptions::default(), margin: 0.05, rel_tol: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCountOutcome {
    pub report: StatReport,
    pub counts: Vec<u32>,
    pub law: ZeroCountLaw,
}

impl ZeroCountOutcome {
    pub fn empirical_pmf(&self) -> Vec<f64> {
        empirical_pmf(&self.counts)
    }

    pub fn to_csv(&self) -> String {
        let emp = self.empirical_pmf();
        let n = emp.len().max(self.law.pmf.len());
        let mut w = CsvWriter::new(&["k", "empirical", "limit"]);
        for k in 0..n {
            w.row(&[
                k.to_string(),
                fmt_f64(emp.get(k).copied().unwrap_or(0.0)),
                fmt_f64(self.law.pmf.get(k).copied().unwrap_or(0.0)),
            ]);
        }
        w.finish()
    }
}

/// Zeros of one α = 0 path inside φ(𝔻(r)), at scale s.
pub fn count_path_zeros(path: &SeriesPath, s: f64, r: f64, opts: &ZeroSearchOptions) -> Result<u32> {
    let region = covering_rectangle(r, opts.margin)?;
    let scaled = path.scaled(s);
    let f = |z: Complex64| scaled.eval(z);
    let pm = locate_zeros(&f, &region, opts.rel_tol * region.diameter(), None)?;
    count_in_mapped_disk(&pm, r)
}

/// Empirical law of the number of zeros of z ↦ D(0; 1/2 + s z) in φ(𝔻(r)),
/// compared with [`zero_count_pmf`].
pub fn zero_count_experiment(
    model: CoefficientModel,
    s: f64,
    r: f64,
    m: usize,
    seed: u64,
    opts: &ZeroSearchOptions,
) -> Result<ZeroCountOutcome> {
    let cov = implied_covariance(&model);
    if !cov.is_isotropic() {
        return Err(Error::InvalidArgument(format!(
            "zero-count law needs an isotropic model, got {}",
            model.kind_name()
        )));
    }
    if !(s > 0.0) || m == 0 {
        return Err(Error::InvalidArgument("need s > 0 and at least one replicate".into()));
    }
    let law = zero_count_pmf(r)?;
    let region = covering_rectangle(r, opts.margin)?;
    let x_min = match region.shape {
        Shape::Rectangle { lo, .. } => lo[0],
        Shape::Disk { center, radius } => center[0] - radius,
    };
    let plan = opts.sampling.plan(0.0, s, x_min, cov.second_moment())?;
    let sampler = PathSampler::new(0.0, &plan)?;
    let counts = map_replicates(m, |rep| {
        let path = sampler.sample(&CoefficientStream::new(model, seed, rep))?;
        count_path_zeros(&path, s, r, opts)
    })?;
    let emp = empirical_pmf(&counts);
    let tv = tv_distance(&emp, &law.pmf);
    let chi = chi_square_gof(&histogram(&counts), &law.pmf)?;
    let (mean, _) = mean_var_counts(&counts);
    let mut report = StatReport::new("zeros-complex", tv, m, Some(seed), Verdict::from_pass(tv < ZERO_COUNT_TV))
        .detail("s", s)
        .detail("r", r)
        .detail("mean_count", mean)
        .detail("limit_mean", law.mean())
        .detail("chi_square", chi.statistic)
        .detail("chi_square_df", chi.df as f64);
    report.tv_distance = Some(tv);
    report.p_value = Some(chi.p_value);
    report.note = Some(format!("model {}", model.kind_name()));
    Ok(ZeroCountOutcome { report, counts, law })
}

/// Parameters of the iterated-logarithm band.
#[derive(Debug, Clone, PartialEq)]
pub struct LilParams {
    pub alpha: f64,
    pub sigma1_sq: f64,
    pub c_alpha: f64,
    pub s_grid: Vec<f64>,
}

impl LilParams {
    pub fn new(alpha: f64, sigma1_sq: f64, s_grid: Vec<f64>) -> Result<Self> {
        check_alpha(alpha)?;
        if !(sigma1_sq > 0.0) {
            return Err(Error::InvalidArgument(format!("sigma1^2 must be positive, got {sigma1_sq}")));
        }
        if s_grid.is_empty() {
            return Err(Error::EmptyRequest("LIL grid is empty"));
        }
        if let Some(s) = s_grid.iter().find(|&&s| !(s > 0.0 && s < (-1.0f64).exp())) {
            return Err(Error::InvalidArgument(format!("grid scale {s} is outside (0, 1/e)")));
        }
        if s_grid.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidArgument("LIL grid must be strictly decreasing".into()));
        }
        let c_alpha = gamma(1.0 + 2.0 * alpha) / 2f64.powf(2.0 * alpha);
        Ok(Self { alpha, sigma1_sq, c_alpha, s_grid })
    }

    /// f_α(s) = (s^{1+2α} / (c_α log log(1/s)))^{1/2}.
    pub fn f_alpha(&self, s: f64) -> f64 {
        (s.powf(1.0 + 2.0 * self.alpha) / (self.c_alpha * (1.0 / s).ln().ln())).sqrt()
    }
}

/// `n` points from `hi` down to `lo`, equally spaced in log s.
pub fn geometric_grid(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (hi.ln(), lo.ln());
    (0..n)
        .map(|k| match k {
            0 => hi,
            _ if k == n - 1 => lo,
            _ => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// R(s) = f_α(s) · D(α; 1/2 + s) / σ₁ on the grid of `params`.
pub fn lil_ratios(path: &SeriesPath, params: &LilParams) -> Vec<f64> {
    let sigma1 = params.sigma1_sq.sqrt();
    params.s_grid.iter().map(|&s| params.f_alpha(s) * path.eval_shifted(Complex64::new(s, 0.0)).re / sigma1).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LilOutcome {
    pub report: StatReport,
    pub ratios: Vec<f64>,
    pub s_grid: Vec<f64>,
}

impl LilOutcome {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut w = CsvWriter::new(&["s", "ratio"]);
        for (s, r) in self.s_grid.iter().zip(&self.ratios) {
            w.row_f64(&[*s, *r]);
        }
        w.finish()
    }
}

fn lil_report(ratios: Vec<f64>, params: &LilParams, seed: Option<u64>) -> LilOutcome {
    let inside = ratios.iter().filter(|r| r.abs() <= 1.05).count() as f64 / ratios.len() as f64;
    let mut out = LilOutcome {
        report: StatReport::new("lil", 0.0, 1, seed, Verdict::Smoke),
        ratios,
        s_grid: params.s_grid.clone(),
    };
    let (mx, mn) = (out.max_ratio(), out.min_ratio());
    out.report.statistic = mx;
    out.report =
        out.report.clone().detail("max_ratio", mx).detail("min_ratio", mn).detail("fraction_within_1.05", inside);
    out.report.note = Some("smoke test: single path at desk-scale s, not a verification of the limsup".into());
    out
}

/// Single-path band check; one coefficient stream serves every grid scale.
pub fn lil_band_check(model: CoefficientModel, params: &LilParams, seed: u64, head_n: usize) -> Result<LilOutcome> {
    if !model.is_real() {
        return Err(Error::InvalidArgument(format!("LIL band needs a real model, got {}", model.kind_name())));
    }
    let (lo, hi) = (1e-6 * (1.0 - 1e-12), 1e-2 * (1.0 + 1e-12));
    if let Some(s) = params.s_grid.iter().find(|&&s| !(s >= lo && s <= hi)) {
        return Err(Error::InvalidArgument(format!("grid scale {s} is outside [1e-6, 1e-2]")));
    }
    let s_min = params.s_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let sampler = PathSampler::new(
        params.alpha,
        &TruncationPlan::Hybrid { head_n, layout: crate::synthesis::TailLayout::for_head(head_n, s_min, 1.0) },
    )?;
    let path = sampler.sample(&CoefficientStream::new(model, seed, 0))?;
    Ok(lil_band_from_path(&path, params, Some(seed)))
}

pub fn lil_band_from_path(path: &SeriesPath, params: &LilParams, seed: Option<u64>) -> LilOutcome {
    lil_report(lil_ratios(path, params), params, seed)
}

/// z^{1+β} Σ_{k≥2} (log k)^β k^{−1−z}: `k_terms` explicit terms plus the
/// integral tail ∫_K^∞ (log x)^β x^{−1−z} dx = z^{−(1+β)} Γ(1+β, z log K),
/// less half the K-th term.
pub fn zeta_scaled_sum(beta: f64, z: Complex64, k_terms: u64) -> Result<Complex64> {
    if !(beta > -1.0) {
        return Err(Error::InvalidArgument(format!("beta must exceed -1, got {beta}")));
    }
    if !(z.re > 0.0) || z.norm() > 1.0 {
        return Err(Error::InvalidArgument(format!("need Re z > 0 and |z| <= 1, got {z}")));
    }
    if k_terms < 2 {
        return Err(Error::InvalidArgument("need at least two explicit terms".into()));
    }
    let mut acc = KahanSum::<Complex64>::default();
    for k in 2..=k_terms {
        let l = (k as f64).ln();
        let amp = if beta == 0.0 { 1.0 } else { l.powf(beta) };
        acc += (-(z + 1.0) * l).exp() * amp;
    }
    let e = 1.0 + beta;
    let lk = (k_terms as f64).ln();
    let last = (-(z + 1.0) * lk).exp() * if beta == 0.0 { 1.0 } else { lk.powf(beta) };
    let tail = upper_gamma_complex(e, z * lk);
    Ok(z.powf(e) * (acc.value() - last * 0.5) + tail)
}

/// |z^{1+β} S(z) − Γ(1+β)| for each z, with K = [`ZETA_TERMS`].
pub fn zeta_limit_check(beta: f64, z_list: &[Complex64]) -> Result<Vec<(Complex64, f64)>> {
    let target = gamma(1.0 + beta);
    z_list.iter().map(|&z| Ok((z, (zeta_scaled_sum(beta, z, ZETA_TERMS)? - target).norm()))).collect()
}

/// Points s·e^{iπ/4}.
pub fn zeta_ray(moduli: &[f64]) -> Vec<Complex64> {
    moduli.iter().map(|&s| Complex64::from_polar(s, FRAC_PI_4)).collect()
}

pub fn zeta_rows_to_csv(beta: f64, rows: &[(Complex64, f64)]) -> String {
    let mut w = CsvWriter::with_comment(&format!("beta={}", fmt_f64(beta)), &["re_z", "im_z", "error"]);
    for (z, e) in rows {
        w.row_f64(&[z.re, z.im, *e]);
    }
    w.finish()
}

/// Report for a zeta run: passes when every point with |z| ≤ 1e−3 is within
/// 0.02 of the limit.
pub fn zeta_report(beta: f64, rows: &[(Complex64, f64)]) -> StatReport {
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let hard: Vec<f64> = rows.iter().filter(|r| r.0.norm() <= 1e-3 * (1.0 + 1e-12)).map(|r| r.1).collect();
    let ok = hard.iter().all(|&e| e < 0.02);
    StatReport::new("zeta-check", worst, rows.len(), None, Verdict::from_pass(ok)).detail("beta", beta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealZeroOutcome {
    pub report: StatReport,
    pub series_counts: Vec<u32>,
    pub limit_counts: Vec<u32>,
}

impl RealZeroOutcome {
    pub fn to_csv(&self) -> String {
        let (a, b) = (empirical_pmf(&self.series_counts), empirical_pmf(&self.limit_counts));
        let mut w = CsvWriter::new(&["k", "series", "limit"]);
        for k in 0..a.len().max(b.len()) {
            w.row(&[
                k.to_string(),
                fmt_f64(a.get(k).copied().unwrap_or(0.0)),
                fmt_f64(b.get(k).copied().unwrap_or(0.0)),
            ]);
        }
        w.finish()
    }
}

/// Real-zero counts of x ↦ D(0; 1/2 + s x) on `window` against those of the
/// real hyperbolic power series on φ⁻¹(window), M replicates each.
pub fn real_zero_process_comparison(
    model: CoefficientModel,
    s: f64,
    window: (f64, f64),
    m: usize,
    seed: u64,
    opts: &SamplingOptions,
) -> Result<RealZeroOutcome> {
    if !model.is_real() {
        return Err(Error::InvalidArgument(format!(
            "real-zero comparison needs a real model, got {}",
            model.kind_name()
        )));
    }
    let (a, b) = window;
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("window must be a compact interval in (0, inf), got ({a}, {b})")));
    }
    if !(s > 0.0) || m < 2 {
        return Err(Error::InvalidArgument("need s > 0 and at least two replicates".into()));
    }
    let cov = implied_covariance(&model);
    let plan = opts.plan(0.0, s, a, cov.second_moment())?;
    let sampler = PathSampler::new(0.0, &plan)?;
    let tol = 1e-9 * (b - a);
    let series_counts = map_replicates(m, |rep| {
        let path = sampler.sample(&CoefficientStream::new(model, seed, rep))?;
        let scaled = path.scaled(s);
        Ok(real_zeros(&|x| scaled.eval_real(x), a, b, None, tol)?.count() as u32)
    })?;
    let (ua, ub) = (mobius_inv(Complex64::new(a, 0.0))?.re, mobius_inv(Complex64::new(b, 0.0))?.re);
    let n_terms = crate::limit_gaf::power_series_terms(0.0, ua.abs().max(ub.abs()), 1e-16).max(POWER_SERIES_MIN_TERMS);
    let limit_counts = map_replicates(m, |rep| {
        let mut rng = keyed_rng(seed, rep, StreamPurpose::PowerSeries);
        let coeffs = sample_power_series_gaf(0.0, false, &mut rng, n_terms)?;
        let f = |x: f64| eval_power_series(&coeffs, Complex64::new(x, 0.0)).re;
        Ok(real_zeros(&f, ua, ub, None, tol * (ub - ua) / (b - a))?.count() as u32)
    })?;
    let tv = tv_distance(&empirical_pmf(&series_counts), &empirical_pmf(&limit_counts));
    let chi = chi_square_two_sample(&histogram(&series_counts), &histogram(&limit_counts))?;
    let (m1, v1) = mean_var_counts(&series_counts);
    let (m2, v2) = mean_var_counts(&limit_counts);
    let se = (v1 / m as f64 + v2 / m as f64).sqrt();
    let means_agree = (m1 - m2).abs() <= 3.0 * se;
    let ok = tv < REAL_ZERO_TV && means_agree;
    let mut report = StatReport::new("zeros-real", tv, m, Some(seed), Verdict::from_pass(ok))
        .detail("s", s)
        .detail("window_lo", a)
        .detail("window_hi", b)
        .detail("mean_series", m1)
        .detail("mean_limit", m2)
        .detail("mean_diff_se", se)
        .detail("chi_square", chi.statistic)
        .detail("chi_square_df", chi.df as f64);
    report.tv_distance = Some(tv);
    report.p_value = Some(chi.p_value);
    Ok(RealZeroOutcome { report, series_counts, limit_counts })
}

/// σ_c probe on one coefficient path.
pub fn sigma_c_report(model: CoefficientModel, alpha: f64, n_max: usize, seed: u64) -> Result<StatReport> {
    let coeffs = CoefficientStream::new(model, seed, 0).sample_pairs(n_max - 1)?;
    let est = crate::series_eval::estimate_sigma_c(&coeffs, alpha, n_max)?;
    Ok(StatReport::new("sigma-c", est, 1, Some(seed), Verdict::from_pass((est - 0.5).abs() < 0.1))
        .detail("alpha", alpha)
        .detail("n_max", n_max as f64))
}

/// Means of replicate values, tree-summed.
pub fn replicate_mean(values: &[Complex64]) -> Complex64 {
    pairwise_sum_complex(values) / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn meta(seed: u64) -> ReplicateMeta {
        ReplicateMeta { alpha: 0.0, s: 0.1, model: "test".into(), seed }
    }

    #[test]
    fn covariance_of_zeros_is_zero() {
        let z = ReplicateSet::new(vec![Complex64::new(0.0, 0.0); 40], meta(1)).unwrap();
        let e = empirical_complex_covariance(&z, &z).unwrap();
        assert_eq!((e.pseudo, e.hermitian, e.se), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0));
    }

    #[test]
    fn pairing_errors() {
        let a = ReplicateSet::new(vec![Complex64::new(1.0, 0.0); 40], meta(1)).unwrap();
        let b = ReplicateSet::new(vec![Complex64::new(1.0, 0.0); 41], meta(1)).unwrap();
        let c = ReplicateSet::new(vec![Complex64::new(1.0, 0.0); 40], meta(2)).unwrap();
        assert!(matches!(empirical_complex_covariance(&a, &b), Err(Error::Pairing(_))));
        assert!(matches!(empirical_complex_covariance(&a, &c), Err(Error::Pairing(_))));
        let short = ReplicateSet::new(vec![Complex64::new(1.0, 0.0); 10], meta(1)).unwrap();
        assert!(matches!(empirical_complex_covariance(&short, &short), Err(Error::Pairing(_))));
    }

    #[test]
    fn hermitian_consistency_is_exact() {
        let mut rng = keyed_rng(3, 0, StreamPurpose::Auxiliary);
        let mut draw = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let xs: Vec<Complex64> = (0..100).map(|_| draw()).collect();
        let ys: Vec<Complex64> = (0..100).map(|_| draw()).collect();
        let a = complex_covariance(&xs, &ys).unwrap();
        let b = complex_covariance(&ys, &xs).unwrap();
        assert_eq!(a.hermitian, b.hermitian.conj());
    }

    #[test]
    fn ks_of_normal_draws() {
        let mut rng = keyed_rng(42, 0, StreamPurpose::Auxiliary);
        let xs: Vec<f64> = (0..2000).map(|_| rng.sample(StandardNormal)).collect();
        let (_, p) = ks_standard_normal(&xs).unwrap();
        assert!(p > 1e-3, "{p}");
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.5).collect();
        assert!(ks_standard_normal(&shifted).unwrap().1 < 1e-6);
    }

    #[test]
    fn kolmogorov_q_known_values() {
        // Q(1.36) ≈ 0.0493, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_q(1.36) - 0.04939).abs() < 1e-4);
        assert!((kolmogorov_q(1.63) - 0.00977).abs() < 1e-4);
    }

    #[test]
    fn merged_bins_reach_minimum() {
        let probs = [0.5, 0.3, 0.15, 0.04, 0.01];
        let hist = [50u64, 30, 15, 4, 1];
        let chi = chi_square_gof(&hist, &probs).unwrap();
        assert!(chi.statistic.abs() < 1e-12);
        assert_eq!(chi.df, 3);
        assert!((chi.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_identities() {
        for i in 1..=9 {
            let r = i as f64 / 10.0;
            let law = zero_count_pmf(r).unwrap();
            let r2 = r * r;
            assert!(law.pmf.iter().all(|&p| p >= 0.0));
            assert!((law.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!((law.mean() - r2 / (1.0 - r2)).abs() < 1e-12, "r={r}");
            let var: f64 = (1..=2000).map(|k| r2.powi(k)).map(|q| q * (1.0 - q)).sum();
            assert!((law.variance() - var).abs() < 1e-12, "r={r}");
            assert!(r2.powi(law.k_max as i32) < PMF_CUTOFF);
        }
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[1.0], &[1.0, 0.0]), 0.0);
        assert_eq!(tv_distance(&[1.0], &[0.0, 1.0]), 1.0);
    }

    #[test]
    fn lil_of_zero_stream_is_zero() {
        let params = LilParams::new(0.0, 1.0, geometric_grid(1e-2, 1e-6, 5)).unwrap();
        let path = SeriesPath::from_coefficients(0.0, &[(0.0, 0.0); 100]).unwrap();
        let out = lil_band_from_path(&path, &params, None);
        assert_eq!((out.max_ratio(), out.min_ratio()), (0.0, 0.0));
        assert_eq!(out.report.verdict, Verdict::Smoke);
    }

    #[test]
    fn lil_params_validate() {
        assert!(LilParams::new(0.0, 1.0, vec![0.5]).is_err());
        assert!(LilParams::new(0.0, 1.0, vec![1e-3, 1e-2]).is_err());
        let p = LilParams::new(0.5, 1.0, vec![1e-3]).unwrap();
        assert!((p.c_alpha - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zeta_gamma_anchor() {
        // β = 1 at z → 0 approaches Γ(2) = 1
        let rows = zeta_limit_check(1.0, &zeta_ray(&[1e-3, 1e-4])).unwrap();
        assert!(rows[1].1 < rows[0].1 && rows[0].1 < 0.02);
        assert!(zeta_limit_check(0.0, &[Complex64::new(0.0, 0.5)]).is_err());
        assert!(zeta_limit_check(0.0, &[Complex64::new(0.9, 0.9)]).is_err());
    }

    #[test]
    fn report_json_fields() {
        let mut r = StatReport::new("clt", 0.01, 2000, Some(42), Verdict::Pass);
        r.p_value = Some(0.5);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["n_replicates"], 2000);
        assert!(v.get("tv_distance").is_none());
        let back: StatReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
