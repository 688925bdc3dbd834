//! Truncated random Dirichlet sums
//! D_N(α; w) = Σ_{n=2}^{N} (log n)^α (η_n + iθ_n) n^{−w},
//! their scaled form s^{1/2+α} D_N(α; 1/2 + s z), tail-variance bounds, and
//! the abscissa-of-convergence probe.

use crate::error::{Error, Result};
use crate::special::{power_exp_integral, KahanSum};
use num_complex::Complex64;
use std::sync::{Arc, OnceLock, RwLock};

/// Default hard cap on the truncation level.
pub const DEFAULT_TRUNCATION_CAP: u64 = 1 << 27;

/// Above this many terms compensated summation is switched on by default.
pub const COMPENSATION_THRESHOLD: usize = 100_000;

/// Number of geometric checkpoints in the abscissa probe.
pub const SIGMA_C_GRID: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSpec {
    pub alpha: f64,
    pub truncation_n: usize,
    pub compensated_summation: bool,
}

impl SeriesSpec {
    /// Compensation defaults to on for `truncation_n > 10⁵`.
    pub fn new(alpha: f64, truncation_n: usize) -> Result<Self> {
        Self::with_compensation(alpha, truncation_n, truncation_n > COMPENSATION_THRESHOLD)
    }

    pub fn with_compensation(alpha: f64, truncation_n: usize, compensated: bool) -> Result<Self> {
        check_alpha(alpha)?;
        if truncation_n < 2 {
            return Err(Error::InvalidArgument("truncation level must be at least 2".into()));
        }
        Ok(Self { alpha, truncation_n, compensated_summation: compensated })
    }

    /// Number of coefficient pairs consumed (n = 2..=N).
    pub fn terms(&self) -> usize {
        self.truncation_n - 1
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > -0.5) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must exceed -1/2, got {alpha}")));
    }
    Ok(())
}

/// Point z ∈ H₀ and scale s > 0 at which s^{1/2+α} D(α; 1/2 + s z) is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRequest {
    pub z: Complex64,
    pub s: f64,
}

impl EvalRequest {
    pub fn new(z: Complex64, s: f64) -> Result<Self> {
        if !(z.re > 0.0) {
            return Err(Error::Domain(format!("Re(z) must be positive, got {z}")));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!("scale s must be positive, got {s}")));
        }
        Ok(Self { z, s })
    }

    /// The Dirichlet argument 1/2 + s z.
    pub fn argument(&self) -> Complex64 {
        Complex64::new(0.5, 0.0) + self.z * self.s
    }
}

static LOG_TABLE: OnceLock<RwLock<Arc<Vec<f64>>>> = OnceLock::new();

/// Shared read-only table `t[n] = ln n` for `n ≤ upto` (t[0] is unused).
pub fn log_table(upto: usize) -> Arc<Vec<f64>> {
    let cell = LOG_TABLE.get_or_init(|| RwLock::new(Arc::new(vec![f64::NEG_INFINITY, 0.0])));
    {
        let t = cell.read().expect("log table poisoned");
        if t.len() > upto {
            return Arc::clone(&t);
        }
    }
    let mut w = cell.write().expect("log table poisoned");
    if w.len() <= upto {
        let target = (upto + 1).max(2 * w.len());
        let mut v = Vec::with_capacity(target);
        v.extend_from_slice(&w);
        for n in v.len()..target {
            v.push((n as f64).ln());
        }
        *w = Arc::new(v);
    }
    Arc::clone(&w)
}

fn check_len(coeffs: &[(f64, f64)], spec: &SeriesSpec) -> Result<()> {
    if coeffs.len() < spec.terms() {
        return Err(Error::Length { needed: spec.terms(), available: coeffs.len() });
    }
    Ok(())
}

fn sum_terms(coeffs: &[(f64, f64)], spec: &SeriesSpec, alpha: f64, w: Complex64) -> Complex64 {
    let logs = log_table(spec.truncation_n);
    let terms = coeffs[..spec.terms()].iter().enumerate().map(|(i, &(eta, theta))| {
        let ln = logs[i + 2];
        let weight = if alpha == 0.0 { 1.0 } else { ln.powf(alpha) };
        // n^{−w} = exp(−w ln n) with real ln n
        Complex64::new(eta, theta) * (-w * ln).exp() * weight
    });
    if spec.compensated_summation {
        let mut acc = KahanSum::<Complex64>::default();
        for t in terms {
            acc += t;
        }
        acc.value()
    } else {
        terms.sum()
    }
}

/// Σ_{n=2}^{N} (log n)^α (η_n + iθ_n) n^{−w}; `coeffs[0]` belongs to n = 2.
pub fn eval_partial(coeffs: &[(f64, f64)], spec: &SeriesSpec, w: Complex64) -> Result<Complex64> {
    check_len(coeffs, spec)?;
    Ok(sum_terms(coeffs, spec, spec.alpha, w))
}

/// s^{1/2+α} · D_N(α; 1/2 + s z).
pub fn scaled_eval(coeffs: &[(f64, f64)], spec: &SeriesSpec, req: &EvalRequest) -> Result<Complex64> {
    let d = eval_partial(coeffs, spec, req.argument())?;
    Ok(d * req.s.powf(0.5 + spec.alpha))
}

/// Σ_{n=2}^{N} (log n)^{α+1} (η_n + iθ_n) n^{−w}, which is −d/dw of the
/// α-sum.
pub fn eval_shifted_alpha_derivative(coeffs: &[(f64, f64)], spec: &SeriesSpec, w: Complex64) -> Result<Complex64> {
    check_len(coeffs, spec)?;
    Ok(sum_terms(coeffs, spec, spec.alpha + 1.0, w))
}

/// Parses a coefficient list with one `η θ` pair per line, starting at
/// n = 2. Blank lines and `#` comments are skipped; a lone value means θ = 0.
pub fn parse_coefficient_list(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::InvalidArgument(format!("line {}: expected `eta theta`, got `{line}`", i + 1));
        let mut it = line.split_whitespace().map(|t| t.parse::<f64>().ok().filter(|x| x.is_finite()));
        let eta = it.next().flatten().ok_or_else(bad)?;
        let theta = match it.next() {
            None => 0.0,
            Some(v) => v.ok_or_else(bad)?,
        };
        if it.next().is_some() {
            return Err(bad());
        }
        out.push((eta, theta));
    }
    if out.is_empty() {
        return Err(Error::EmptyRequest("coefficient list is empty"));
    }
    Ok(out)
}

pub fn format_coefficient_list(coeffs: &[(f64, f64)]) -> String {
    coeffs.iter().map(|(e, t)| format!("{e:?} {t:?}\n")).collect()
}

/// Upper bound on the standard deviation of the discarded tail
/// s^{1/2+α} Σ_{k>N} (log k)^α ξ_k k^{−1/2−s z} over Re(z) ≥ x0:
/// √( E|ξ|² · s^{1+2α} · ∫_N^∞ (log x)^{2α} x^{−1−2 s x0} dx ).
pub fn tail_std_bound(alpha: f64, truncation_n: u64, s: f64, x0: f64, second_moment: f64) -> f64 {
    assert!(s > 0.0 && x0 > 0.0, "tail_std_bound needs s > 0 and x0 > 0");
    let lower = (truncation_n.max(2) as f64).ln();
    let integral = power_exp_integral(2.0 * alpha, 2.0 * s * x0, lower, f64::INFINITY);
    (second_moment * s.powf(1.0 + 2.0 * alpha) * integral).sqrt()
}

/// Smallest power of two N ≥ 2 whose tail bound is below `eps`.
pub fn choose_truncation(alpha: f64, s: f64, x0: f64, eps: f64, second_moment: f64, cap: u64) -> Result<u64> {
    check_alpha(alpha)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let mut n: u64 = 2;
    loop {
        if tail_std_bound(alpha, n, s, x0, second_moment) < eps {
            return Ok(n);
        }
        if n >= cap {
            return Err(Error::ResourceCap { cap });
        }
        n = (n * 2).min(cap.max(2));
    }
}

/// Checkpoints ⌊n_max^{j/J}⌋ for j = J/2, …, J (the upper half of the
/// geometric grid, so n ≥ √n_max).
pub fn sigma_c_checkpoints(n_max: usize) -> Vec<usize> {
    let mut pts: Vec<usize> = (SIGMA_C_GRID / 2..=SIGMA_C_GRID)
        .map(|j| {
            let v = (n_max as f64).powf(j as f64 / SIGMA_C_GRID as f64);
            // guard against powf landing a hair under an integer
            let r = v.round();
            if (v - r).abs() < 1e-9 * r {
                r as usize
            } else {
                v.floor() as usize
            }
        })
        .filter(|&n| n >= 2)
        .collect();
    pts.dedup();
    pts
}

/// Probe of σ_c = limsup log|X_1+…+X_n| / log n with X_n = (log n)^α ξ_n:
/// the maximum of log|S_n|/log n over [`sigma_c_checkpoints`].
pub fn estimate_sigma_c(coeffs: &[(f64, f64)], alpha: f64, n_max: usize) -> Result<f64> {
    if n_max < 100 {
        return Err(Error::InvalidArgument("n_max must be at least 100".into()));
    }
    if coeffs.len() < n_max - 1 {
        return Err(Error::Length { needed: n_max - 1, available: coeffs.len() });
    }
    let checkpoints = sigma_c_checkpoints(n_max);
    let logs = log_table(n_max);
    let mut acc = KahanSum::<Complex64>::default();
    let mut best: Option<f64> = None;
    let mut next = checkpoints.iter().peekable();
    for n in 2..=n_max {
        let (eta, theta) = coeffs[n - 2];
        let weight = if alpha == 0.0 { 1.0 } else { logs[n].powf(alpha) };
        acc += Complex64::new(eta, theta) * weight;
        while let Some(&&c) = next.peek() {
            if c != n {
                break;
            }
            next.next();
            let m = acc.value().norm();
            if m > 0.0 {
                let v = m.ln() / logs[n];
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    }
    best.ok_or(Error::UndefinedEstimator("all partial sums vanish on the checkpoint grid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ones(n: usize) -> Vec<(f64, f64)> {
        vec![(1.0, 0.0); n]
    }

    #[test]
    fn trivial_sums() {
        let spec = SeriesSpec::new(0.0, 3).unwrap();
        let v = eval_partial(&ones(2), &spec, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(v, Complex64::new(2.0, 0.0));

        let mut c = vec![(0.0, 0.0); 10];
        c[0] = (1.0, 0.0);
        let spec = SeriesSpec::new(1.0, 11).unwrap();
        let v = eval_partial(&c, &spec, Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 2f64.ln() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(v.re, 0.34657, epsilon = 1e-5);
    }

    #[test]
    fn coefficient_list_round_trip() {
        let c = vec![(1.0, 0.0), (-1.0, 0.5), (0.25, -3.0)];
        assert_eq!(parse_coefficient_list(&format_coefficient_list(&c)).unwrap(), c);
        assert_eq!(parse_coefficient_list("# two terms\n1\n-1 0\n").unwrap(), vec![(1.0, 0.0), (-1.0, 0.0)]);
        assert!(parse_coefficient_list("1 2 3\n").is_err());
        assert!(parse_coefficient_list("# nothing\n").is_err());
    }

    #[test]
    fn length_error() {
        let spec = SeriesSpec::new(0.0, 10).unwrap();
        assert_eq!(
            eval_partial(&ones(5), &spec, Complex64::new(1.0, 0.0)),
            Err(Error::Length { needed: 9, available: 5 })
        );
    }

    #[test]
    fn spec_validation() {
        assert!(SeriesSpec::new(-0.5, 10).is_err());
        assert!(SeriesSpec::new(0.0, 1).is_err());
        assert!(SeriesSpec::new(-0.49, 2).is_ok());
        assert!(!SeriesSpec::new(0.0, 1000).unwrap().compensated_summation);
        assert!(SeriesSpec::new(0.0, 200_000).unwrap().compensated_summation);
        assert!(EvalRequest::new(Complex64::new(0.0, 1.0), 1.0).is_err());
        assert!(EvalRequest::new(Complex64::new(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn scaled_eval_examples() {
        let spec = SeriesSpec::new(0.0, 3).unwrap();
        let req = EvalRequest::new(Complex64::new(1.0, 0.0), 0.5).unwrap();
        let v = scaled_eval(&ones(2), &spec, &req).unwrap();
        // oracle: 0.5^{0.5}·(2^{−1}+3^{−1})
        let want = 0.5f64.sqrt() * (0.5 + 1.0 / 3.0);
        assert_relative_eq!(v.re, want, max_relative = 1e-15);
        assert_relative_eq!(v.re, 0.58926, epsilon = 1e-5);

        let c: Vec<_> = (0..30).map(|i| ((i as f64).sin(), (i as f64).cos())).collect();
        let spec = SeriesSpec::new(0.7, 31).unwrap();
        let id = scaled_eval(&c, &spec, &EvalRequest::new(Complex64::new(0.5, 0.0), 1.0).unwrap()).unwrap();
        let direct = eval_partial(&c, &spec, Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!((id - direct).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn derivative_identity_single_term() {
        let mut c = vec![(0.0, 0.0); 4];
        c[0] = (1.0, 0.0);
        let spec = SeriesSpec::new(0.3, 5).unwrap();
        let w = Complex64::new(0.8, -0.4);
        let v = eval_shifted_alpha_derivative(&c, &spec, w).unwrap();
        let want = (-w * 2f64.ln()).exp() * 2f64.ln().powf(1.3);
        assert_relative_eq!((v - want).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn conjugation_symmetry_for_real_coefficients() {
        let c: Vec<_> = (0..99).map(|i| (((i * 7919) % 13) as f64 - 6.0, 0.0)).collect();
        let spec = SeriesSpec::new(0.5, 100).unwrap();
        let w = Complex64::new(0.7, 2.3);
        let a = eval_partial(&c, &spec, w.conj()).unwrap();
        let b = eval_partial(&c, &spec, w).unwrap().conj();
        assert_relative_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tail_bound_closed_form_example() {
        // α = 0, s·x0 = 0.01, N = 10⁶, s = 1: bound² = (10⁶)^{−0.02}/0.02
        let b = tail_std_bound(0.0, 1_000_000, 1.0, 0.01, 1.0);
        let want = (1e6f64.powf(-0.02) / 0.02).sqrt();
        assert_relative_eq!(b, want, max_relative = 1e-12);
    }

    #[test]
    fn truncation_choices() {
        assert_eq!(choose_truncation(0.0, 0.5, 1.0, 1e3, 1.0, DEFAULT_TRUNCATION_CAP), Ok(2));
        // bound² = 0.5/N: first power of two below 1e−6 is 2¹⁹
        assert_eq!(choose_truncation(0.0, 0.5, 1.0, 1e-3, 1.0, DEFAULT_TRUNCATION_CAP), Ok(1 << 19));
        assert_eq!(
            choose_truncation(0.0, 1e-6, 1.0, 1e-9, 1.0, DEFAULT_TRUNCATION_CAP),
            Err(Error::ResourceCap { cap: DEFAULT_TRUNCATION_CAP })
        );
        // small s with the default cap is out of reach of direct summation
        assert!(choose_truncation(0.0, 1e-3, 1.0, 1e-3, 1.0, DEFAULT_TRUNCATION_CAP).is_err());
    }

    #[test]
    fn sigma_c_of_constant_sequence() {
        let n_max = 10_000;
        let est = estimate_sigma_c(&ones(n_max), 0.0, n_max).unwrap();
        assert!(est <= 1.0 && est >= 1.0 - 2.0 / (n_max as f64).ln(), "{est}");
    }

    #[test]
    fn sigma_c_errors() {
        assert!(matches!(estimate_sigma_c(&ones(200), 0.0, 50), Err(Error::InvalidArgument(_))));
        let zeros = vec![(0.0, 0.0); 999];
        assert!(matches!(estimate_sigma_c(&zeros, 0.0, 1000), Err(Error::UndefinedEstimator(_))));
    }

    #[test]
    fn checkpoints_are_increasing_and_end_at_n_max() {
        let pts = sigma_c_checkpoints(1_000_000);
        assert_eq!(*pts.last().unwrap(), 1_000_000);
        assert_eq!(pts[0], 1000);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn log_table_grows() {
        let t = log_table(10);
        assert_eq!(t[1], 0.0);
        assert_relative_eq!(t[10], 10f64.ln());
        let t2 = log_table(5000);
        assert_relative_eq!(t2[4999], 4999f64.ln());
    }
}
