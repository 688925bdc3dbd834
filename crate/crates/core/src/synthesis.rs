//! Realized sample paths of the scaled random Dirichlet series
//! z ↦ s^{1/2+α} D(α; 1/2 + s z).
//!
//! A path carries an exact head Σ_{n=2}^{N₀} built from the coefficient
//! stream, and optionally a synthesized Gaussian tail for n > N₀. The tail
//! lives in u = log n: for u ≥ log N₀ the partial sums of k^{−1/2} ξ_k over a
//! block of u-width δu have covariance 𝔠·δu up to O(1/N₀), so the tail is
//! represented by block moment vectors
//!
//! M_{j,m} = ∫_{block j} u^α t^m dW(u),  t = (u − c_j)/h_j ∈ [−1, 1],
//!
//! drawn exactly from their joint Gaussian law. Since e^{−a u} = e^{−a c_j}
//! Σ_m (−a h_j)^m t^m / m!, the tail is an entire function of a = s z whose
//! law does not depend on s, so one path serves every scale at once.
//!
//! Without a tail the path is the plain truncated sum, bit-for-bit the value
//! [`crate::series_eval::eval_partial`] computes up to summation order.

use crate::coeff_models::{
    covariance_sqrt, implied_covariance, keyed_rng, CoefficientStream, CovarianceSpec, StreamPurpose,
};
use crate::error::{Error, Result};
use crate::limit_gaf::{assemble_real_covariance, jittered_cholesky};
use crate::series_eval::{check_alpha, choose_truncation, log_table};
use crate::special::{upper_gamma_complex, GaussLegendre};
use nalgebra::{Cholesky, DMatrix, DVector, SMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::cell::RefCell;
use std::sync::{Arc, OnceLock, RwLock};

/// Taylor order of the per-block expansion of e^{−a u}.
pub const TAYLOR_ORDER: usize = 6;
const MOMENTS: usize = TAYLOR_ORDER + 1;

/// Tail mass beyond `Re(a)·u = TAIL_DECAY` is below e^{−TAIL_DECAY} in std.
pub const TAIL_DECAY: f64 = 25.0;

/// Default relative block width in u.
pub const DEFAULT_REL_WIDTH: f64 = 0.01;

/// Default exact head length for synthesized paths.
pub const DEFAULT_HEAD_N: usize = 4096;

/// Default cap up to which a purely direct truncation is used.
pub const DEFAULT_DIRECT_CAP: u64 = 1 << 20;

/// Geometry of the synthesized tail blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailLayout {
    pub u_start: f64,
    pub u_end: f64,
    pub rel_width: f64,
}

impl TailLayout {
    /// Tail for n > `head_n`, long enough for every Re(s z) ≥ `s_min·x_min`.
    pub fn for_head(head_n: usize, s_min: f64, x_min: f64) -> Self {
        let u_start = (head_n as f64 + 0.5).ln();
        let u_end = (TAIL_DECAY / (s_min * x_min)).max(u_start * (1.0 + DEFAULT_REL_WIDTH));
        Self { u_start, u_end, rel_width: DEFAULT_REL_WIDTH }
    }

    pub fn with_rel_width(mut self, rel_width: f64) -> Self {
        self.rel_width = rel_width;
        self
    }

    fn blocks(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut lo = self.u_start;
        while lo < self.u_end {
            let hi = (lo * (1.0 + self.rel_width)).min(self.u_end);
            out.push((lo, hi));
            lo = hi;
        }
        out
    }
}

/// Deterministic part of the tail: block geometry and Cholesky factors of the
/// moment covariances. Shared by every replicate.
#[derive(Debug, Clone)]
pub struct GaussianTailModel {
    alpha: f64,
    layout: TailLayout,
    centers: Vec<f64>,
    half_widths: Vec<f64>,
    // lower-triangular factors, row-major MOMENTS×MOMENTS each
    factors: Vec<[f64; MOMENTS * MOMENTS]>,
}

impl GaussianTailModel {
    pub fn new(alpha: f64, layout: TailLayout) -> Result<Self> {
        check_alpha(alpha)?;
        if !(layout.u_start > 0.0 && layout.rel_width > 0.0) {
            return Err(Error::InvalidArgument("tail layout needs u_start > 0 and rel_width > 0".into()));
        }
        let gl = GaussLegendre::new(16);
        let blocks = layout.blocks();
        let mut centers = Vec::with_capacity(blocks.len());
        let mut half_widths = Vec::with_capacity(blocks.len());
        let mut factors = Vec::with_capacity(blocks.len());
        for (lo, hi) in blocks {
            let c = 0.5 * (lo + hi);
            let h = 0.5 * (hi - lo);
            let mut k = SMatrix::<f64, MOMENTS, MOMENTS>::zeros();
            let mut hank = [0.0; 2 * MOMENTS - 1];
            for (p, slot) in hank.iter_mut().enumerate() {
                *slot = h * gl.integrate(-1.0, 1.0, |t| (c + h * t).powf(2.0 * alpha) * t.powi(p as i32));
            }
            for i in 0..MOMENTS {
                for j in 0..MOMENTS {
                    k[(i, j)] = hank[i + j];
                }
            }
            let l =
                Cholesky::new(k).ok_or(Error::KernelInconsistency { min_eigenvalue: f64::NAN, tolerance: 0.0 })?.l();
            let mut flat = [0.0; MOMENTS * MOMENTS];
            for i in 0..MOMENTS {
                for j in 0..=i {
                    flat[i * MOMENTS + j] = l[(i, j)];
                }
            }
            centers.push(c);
            half_widths.push(h);
            factors.push(flat);
        }
        Ok(Self { alpha, layout, centers, half_widths, factors })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn layout(&self) -> &TailLayout {
        &self.layout
    }

    pub fn blocks(&self) -> usize {
        self.centers.len()
    }

    /// Draws one tail realization with coefficient covariance `cov`.
    pub fn sample(self: &Arc<Self>, cov: &CovarianceSpec, rng: &mut impl Rng) -> GaussianTail {
        let root = covariance_sqrt(cov);
        let real = cov.is_real();
        let mut inv_fact = [1.0; MOMENTS];
        for m in 1..MOMENTS {
            inv_fact[m] = inv_fact[m - 1] / m as f64;
        }
        let mut moments = Vec::with_capacity(self.blocks() * MOMENTS);
        for l in &self.factors {
            let mut n1 = [0.0; MOMENTS];
            let mut n2 = [0.0; MOMENTS];
            for v in n1.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            if !real {
                for v in n2.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
            }
            for i in 0..MOMENTS {
                let (mut u1, mut u2) = (0.0, 0.0);
                for j in 0..=i {
                    u1 += l[i * MOMENTS + j] * n1[j];
                    u2 += l[i * MOMENTS + j] * n2[j];
                }
                // (1, i)·𝔠^{1/2}·(U₁, U₂)ᵀ
                let re = root[0][0] * u1 + root[0][1] * u2;
                let im = root[1][0] * u1 + root[1][1] * u2;
                moments.push(Complex64::new(re, im) * inv_fact[i]);
            }
        }
        GaussianTail { model: Arc::clone(self), moments }
    }
}

/// One tail realization (moments pre-divided by m!).
#[derive(Debug, Clone)]
pub struct GaussianTail {
    model: Arc<GaussianTailModel>,
    moments: Vec<Complex64>,
}

impl GaussianTail {
    /// ≈ Σ_{n>N₀} (log n)^α ξ_n n^{−1/2} e^{−a log n}.
    pub fn eval(&self, a: Complex64) -> Complex64 {
        let m = &self.model;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, (&c, &h)) in m.centers.iter().zip(&m.half_widths).enumerate() {
            let lo = c - h;
            if a.re * lo > 2.0 * TAIL_DECAY {
                break;
            }
            let x = -a * h;
            let g = &self.moments[j * MOMENTS..(j + 1) * MOMENTS];
            let mut poly = g[MOMENTS - 1];
            for k in (0..MOMENTS - 1).rev() {
                poly = poly * x + g[k];
            }
            acc += (-a * c).exp() * poly;
        }
        acc
    }

    fn negate(&mut self) {
        for v in &mut self.moments {
            *v = -*v;
        }
    }
}

static SPF: OnceLock<RwLock<Arc<Vec<u32>>>> = OnceLock::new();

/// Smallest-prime-factor sieve up to `n`, shared.
fn spf_table(n: usize) -> Arc<Vec<u32>> {
    let cell = SPF.get_or_init(|| RwLock::new(Arc::new(Vec::new())));
    {
        let t = cell.read().expect("sieve poisoned");
        if t.len() > n {
            return Arc::clone(&t);
        }
    }
    let mut w = cell.write().expect("sieve poisoned");
    if w.len() <= n {
        let size = (n + 1).max(2 * w.len());
        let mut spf = vec![0u32; size];
        for i in 2..size {
            if spf[i] == 0 {
                let mut j = i;
                while j < size {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        *w = Arc::new(spf);
    }
    Arc::clone(&w)
}

thread_local! {
    static POWERS: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

/// A sample path of the (unscaled) series with an exact head and optional
/// synthesized tail.
#[derive(Debug, Clone)]
pub struct SeriesPath {
    alpha: f64,
    // amp[i] = ξ_n (log n)^α n^{−1/2} for n = i + 2
    amp: Vec<Complex64>,
    real: bool,
    tail: Option<GaussianTail>,
}

impl SeriesPath {
    /// Exact truncated path from explicit coefficients (n = 2, 3, …).
    pub fn from_coefficients(alpha: f64, coeffs: &[(f64, f64)]) -> Result<Self> {
        check_alpha(alpha)?;
        if coeffs.is_empty() {
            return Err(Error::EmptyRequest("a path needs at least one coefficient"));
        }
        let logs = log_table(coeffs.len() + 1);
        let amp = coeffs
            .iter()
            .enumerate()
            .map(|(i, &(eta, theta))| {
                let n = i + 2;
                let w = if alpha == 0.0 { 1.0 } else { logs[n].powf(alpha) } / (n as f64).sqrt();
                Complex64::new(eta, theta) * w
            })
            .collect();
        let real = coeffs.iter().all(|c| c.1 == 0.0);
        Ok(Self { alpha, amp, real, tail: None })
    }

    /// Draws a path: `head_n − 1` exact coefficients from `stream`, plus a
    /// tail drawn from `tail_model` (if any) with the stream model's covariance.
    pub fn sample(
        stream: &CoefficientStream,
        alpha: f64,
        head_n: usize,
        tail_model: Option<&Arc<GaussianTailModel>>,
    ) -> Result<Self> {
        if head_n < 2 {
            return Err(Error::InvalidArgument("head length must be at least 2".into()));
        }
        let coeffs = stream.sample_pairs(head_n - 1)?;
        let mut path = Self::from_coefficients(alpha, &coeffs)?;
        path.real = stream.model.is_real();
        if let Some(model) = tail_model {
            if (model.alpha() - alpha).abs() > 0.0 {
                return Err(Error::InvalidArgument("tail model alpha differs from path alpha".into()));
            }
            let expected_start = (head_n as f64 + 0.5).ln();
            if (model.layout().u_start - expected_start).abs() > 1e-12 * expected_start {
                return Err(Error::InvalidArgument("tail layout does not start after the head".into()));
            }
            let cov = implied_covariance(&stream.model);
            let mut rng = keyed_rng(stream.master_seed, stream.replicate_id, StreamPurpose::GaussianTail);
            path.tail = Some(model.sample(&cov, &mut rng));
        }
        Ok(path)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Last exact index N₀.
    pub fn head_n(&self) -> usize {
        self.amp.len() + 1
    }

    pub fn has_tail(&self) -> bool {
        self.tail.is_some()
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// The path of −ξ.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.amp {
            *v = -*v;
        }
        if let Some(t) = &mut out.tail {
            t.negate();
        }
        out
    }

    /// D(α; 1/2 + a) on this path (unscaled).
    pub fn eval_shifted(&self, a: Complex64) -> Complex64 {
        let n_max = self.head_n();
        let spf = spf_table(n_max);
        let logs = log_table(n_max);
        let head = POWERS.with(|cell| {
            let mut pw = cell.borrow_mut();
            pw.clear();
            pw.resize(n_max + 1, Complex64::new(0.0, 0.0));
            pw[1] = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 2..=n_max {
                let p = spf[n] as usize;
                // n^{−a} is completely multiplicative in n
                let v = if p == n { (-a * logs[n]).exp() } else { pw[p] * pw[n / p] };
                pw[n] = v;
                acc += self.amp[n - 2] * v;
            }
            acc
        });
        match &self.tail {
            Some(t) => head + t.eval(a),
            None => head,
        }
    }

    /// Scaled view at `s`.
    pub fn scaled(&self, s: f64) -> ScaledPath<'_> {
        ScaledPath { path: self, s, prefactor: s.powf(0.5 + self.alpha) }
    }
}

/// z ↦ s^{1/2+α} D(α; 1/2 + s z) on one path.
#[derive(Debug, Clone, Copy)]
pub struct ScaledPath<'a> {
    path: &'a SeriesPath,
    s: f64,
    prefactor: f64,
}

impl ScaledPath<'_> {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.path.eval_shifted(z * self.s) * self.prefactor
    }

    /// Real part of the value at real `x`; the whole value for real paths.
    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(Complex64::new(x, 0.0)).re
    }
}

/// How a scaled evaluation at scale `s` is truncated.
#[derive(Debug, Clone, PartialEq)]
pub enum TruncationPlan {
    /// Plain truncated sum up to N.
    Direct { n: usize },
    /// Exact head up to `head_n` plus synthesized tail.
    Hybrid { head_n: usize, layout: TailLayout },
}

impl TruncationPlan {
    pub fn head_n(&self) -> usize {
        match self {
            Self::Direct { n } => *n,
            Self::Hybrid { head_n, .. } => *head_n,
        }
    }
}

/// Uses direct truncation when [`choose_truncation`] reaches `eps` within
/// `direct_cap`; otherwise a hybrid with `head_n` exact terms whose tail
/// covers scales down to `s` and real parts down to `x_min`.
pub fn plan_truncation(
    alpha: f64,
    s: f64,
    x_min: f64,
    eps: f64,
    second_moment: f64,
    direct_cap: u64,
    head_n: usize,
) -> Result<TruncationPlan> {
    match choose_truncation(alpha, s, x_min, eps, second_moment, direct_cap) {
        Ok(n) => Ok(TruncationPlan::Direct { n: n as usize }),
        Err(Error::ResourceCap { .. }) => {
            Ok(TruncationPlan::Hybrid { head_n, layout: TailLayout::for_head(head_n, s, x_min) })
        }
        Err(e) => Err(e),
    }
}

/// Samples replicate paths under a plan; the tail model is built once.
#[derive(Debug, Clone)]
pub struct PathSampler {
    alpha: f64,
    head_n: usize,
    tail: Option<Arc<GaussianTailModel>>,
}

impl PathSampler {
    pub fn new(alpha: f64, plan: &TruncationPlan) -> Result<Self> {
        match plan {
            TruncationPlan::Direct { n } => Ok(Self { alpha, head_n: *n, tail: None }),
            TruncationPlan::Hybrid { head_n, layout } => {
                Ok(Self { alpha, head_n: *head_n, tail: Some(Arc::new(GaussianTailModel::new(alpha, *layout)?)) })
            }
        }
    }

    pub fn head_n(&self) -> usize {
        self.head_n
    }

    pub fn tail_model(&self) -> Option<&Arc<GaussianTailModel>> {
        self.tail.as_ref()
    }

    pub fn sample(&self, stream: &CoefficientStream) -> Result<SeriesPath> {
        SeriesPath::sample(stream, self.alpha, self.head_n, self.tail.as_ref())
    }
}

/// Weights (log n)^α n^{−1/2−a} for n = 2..=`head_n`, so that the head of
/// D(α; 1/2 + a) is Σ ξ_n w_n.
pub fn head_weights(alpha: f64, head_n: usize, a: Complex64) -> Result<Vec<Complex64>> {
    check_alpha(alpha)?;
    if head_n < 2 {
        return Err(Error::InvalidArgument("head length must be at least 2".into()));
    }
    let logs = log_table(head_n);
    Ok((2..=head_n)
        .map(|n| {
            let l = logs[n];
            let amp = if alpha == 0.0 { 1.0 } else { l.powf(alpha) };
            (-(a + 0.5) * l).exp() * amp
        })
        .collect())
}

/// Exact joint law of the Gaussian tail ∫_{u₀}^∞ u^α e^{−a u} dW(u) at a
/// finite list of shifts a_p, for when only those values are needed.
#[derive(Debug, Clone)]
pub struct PointTailSampler {
    shifts: Vec<Complex64>,
    factor: DMatrix<f64>,
}

impl PointTailSampler {
    pub fn new(alpha: f64, cov: &CovarianceSpec, u_start: f64, shifts: &[Complex64]) -> Result<Self> {
        check_alpha(alpha)?;
        if shifts.is_empty() {
            return Err(Error::EmptyRequest("no shifts requested"));
        }
        if let Some(a) = shifts.iter().find(|a| !(a.re > 0.0)) {
            return Err(Error::Domain(format!("tail shift {a} must have positive real part")));
        }
        if !(u_start > 0.0) {
            return Err(Error::InvalidArgument("u_start must be positive".into()));
        }
        let p_coef = Complex64::new(cov.sigma1_sq() - cov.sigma2_sq(), 2.0 * cov.rho());
        let h_coef = cov.second_moment();
        let e = 1.0 + 2.0 * alpha;
        // ∫_{u₀}^∞ u^{2α} e^{−w u} du = w^{−(1+2α)} Γ(1+2α, w u₀)
        let integral = |w: Complex64| w.powf(-e) * upper_gamma_complex(e, w * u_start);
        let c = assemble_real_covariance(shifts.len(), |i, j| {
            let p = p_coef * integral(shifts[i] + shifts[j]);
            let h = h_coef * integral(shifts[i] + shifts[j].conj());
            Ok((p, h))
        })?;
        Ok(Self { shifts: shifts.to_vec(), factor: jittered_cholesky(&c)? })
    }

    pub fn shifts(&self) -> &[Complex64] {
        &self.shifts
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<Complex64> {
        let dim = self.factor.nrows();
        let n = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let v = &self.factor * n;
        (0..self.shifts.len()).map(|i| Complex64::new(v[2 * i], v[2 * i + 1])).collect()
    }
}
