#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdseries::series_eval::parse_coefficient_list;
use serde_json::Value;
use std::path::PathBuf;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

pub fn load_json(name: &str) -> Value {
    let text = std::fs::read_to_string(data_path(name)).expect("fixture readable");
    serde_json::from_str(&text).expect("fixture is valid JSON")
}

/// Decimal string or number to f64.
pub fn num(v: &Value) -> f64 {
    match v {
        Value::String(s) => s.parse().expect("decimal string"),
        Value::Number(n) => n.as_f64().expect("finite number"),
        other => panic!("not a number: {other}"),
    }
}

pub fn cnum(v: &Value) -> Complex64 {
    c(num(&v[0]), num(&v[1]))
}

pub fn rademacher_fixture() -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(data_path("rademacher64.txt")).expect("fixture readable");
    parse_coefficient_list(&text).expect("fixture parses")
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random point with real part in [lo, hi] and imaginary part in [−h, h].
pub fn random_point(rng: &mut impl Rng, lo: f64, hi: f64, h: f64) -> Complex64 {
    c(rng.random_range(lo..hi), rng.random_range(-h..h))
}

/// Distinct random roots in [−0.9, 0.9]², pairwise at least `sep` apart.
pub fn separated_roots(rng: &mut impl Rng, k: usize, sep: f64) -> Vec<Complex64> {
    let mut roots: Vec<Complex64> = Vec::with_capacity(k);
    while roots.len() < k {
        let z = c(rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9));
        if roots.iter().all(|r| (r - z).norm() > sep) {
            roots.push(z);
        }
    }
    roots
}

pub fn poly_from_roots(roots: &[(Complex64, u32)]) -> impl Fn(Complex64) -> Complex64 + Sync + '_ {
    move |z| roots.iter().fold(c(1.0, 0.0), |acc, &(r, m)| acc * (z - r).powu(m))
}

/// Mean and standard error of real samples.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Largest |empirical − target| in standard errors over the four real
/// components of a covariance estimate.
pub fn max_z(est: &rdseries::stats_harness::CovarianceEstimate, pseudo: Complex64, hermitian: Complex64) -> f64 {
    let z = |d: f64, se: f64| if d.abs() <= 1e-12 { 0.0 } else { d.abs() / se };
    let dp = est.pseudo - pseudo;
    let dh = est.hermitian - hermitian;
    [
        z(dp.re, est.se_pseudo[0]),
        z(dp.im, est.se_pseudo[1]),
        z(dh.re, est.se_hermitian[0]),
        z(dh.im, est.se_hermitian[1]),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Column `p` of a list of per-draw value vectors.
pub fn column(draws: &[Vec<Complex64>], p: usize) -> Vec<Complex64> {
    draws.iter().map(|d| d[p]).collect()
}

/// Random polynomial of degree ≤ 5 with separated roots, some double.
pub fn corpus() -> Vec<Vec<(Complex64, u32)>> {
    let mut r = rng(88);
    (0..100)
        .map(|_| {
            let degree = r.random_range(1..=5u32);
            let mut mults = Vec::new();
            let mut left = degree;
            while left > 0 {
                let m = if left >= 2 && r.random_bool(0.25) { 2 } else { 1 };
                mults.push(m);
                left -= m;
            }
            separated_roots(&mut r, mults.len(), 0.05).into_iter().zip(mults).collect()
        })
        .collect()
}
