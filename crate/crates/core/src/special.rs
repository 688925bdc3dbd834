//! Numerical helpers shared by the modules: gamma functions, incomplete
//! gamma on the right half-plane, Gauss–Legendre rules and compensated sums.

use num_complex::Complex64;
use std::ops::AddAssign;

pub use statrs::function::gamma::{gamma, ln_gamma};

const MAX_ITER: usize = 10_000;
const REL_EPS: f64 = 1e-16;

/// Upper incomplete gamma Γ(a, w) = ∫_w^∞ t^{a−1} e^{−t} dt for `a > 0` and
/// `Re(w) ≥ 0`, principal branch of `w^a`.
pub fn upper_gamma_complex(a: f64, w: Complex64) -> Complex64 {
    assert!(a > 0.0, "upper_gamma_complex needs a > 0");
    if w.norm() == 0.0 {
        return Complex64::new(gamma(a), 0.0);
    }
    if w.norm() < (a + 1.0).max(3.0) {
        Complex64::new(gamma(a), 0.0) - lower_gamma_series(a, w)
    } else {
        upper_gamma_cf(a, w)
    }
}

/// Real upper incomplete gamma Γ(a, x), `x ≥ 0`.
pub fn upper_gamma(a: f64, x: f64) -> f64 {
    upper_gamma_complex(a, Complex64::new(x, 0.0)).re
}

/// Lower incomplete gamma γ(a, w) by the Kummer-type series
/// γ(a,w) = w^a e^{−w} Σ_n w^n / (a(a+1)…(a+n)).
pub fn lower_gamma_series(a: f64, w: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0 / a, 0.0);
    let mut sum = term;
    let mut denom = a;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= w / denom;
        sum += term;
        if term.norm() < sum.norm() * REL_EPS {
            break;
        }
    }
    w.powf(a) * (-w).exp() * sum
}

// Modified Lentz evaluation of the Legendre continued fraction.
fn upper_gamma_cf(a: f64, w: Complex64) -> Complex64 {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut b = w + 1.0 - a;
    let mut c = Complex64::new(1.0 / 1e-300, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = b + d * an;
        if d.norm() < 1e-300 {
            d = tiny;
        }
        c = b + c.inv() * an;
        if c.norm() < 1e-300 {
            c = tiny;
        }
        d = d.inv();
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).norm() < REL_EPS {
            break;
        }
    }
    (-w).exp() * w.powf(a) * h
}

/// ∫_lo^hi y^p e^{−c y} dy for `p > −1`, `c > 0`, `0 ≤ lo ≤ hi ≤ ∞`.
pub fn power_exp_integral(p: f64, c: f64, lo: f64, hi: f64) -> f64 {
    let a = p + 1.0;
    let scale = c.powf(-a);
    let upper = |x: f64| {
        if x.is_infinite() {
            0.0
        } else {
            upper_gamma(a, c * x)
        }
    };
    if lo == 0.0 && c * hi < a + 1.0 {
        // Avoid Γ(a) − Γ(a, x) cancellation near the origin.
        return scale * lower_gamma_series(a, Complex64::new(c * hi, 0.0)).re;
    }
    scale * (upper(lo) - upper(hi))
}

/// Gauss–Legendre nodes and weights on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// ∫_lo^hi f.
    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum<T> {
    sum: T,
    comp: T,
}

impl KahanSum<f64> {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl KahanSum<Complex64> {
    pub fn add(&mut self, x: Complex64) {
        let mut re = KahanSum { sum: self.sum.re, comp: self.comp.re };
        let mut im = KahanSum { sum: self.sum.im, comp: self.comp.im };
        re.add(x.re);
        im.add(x.im);
        self.sum = Complex64::new(re.sum, im.sum);
        self.comp = Complex64::new(re.comp, im.comp);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for KahanSum<f64> {
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

impl AddAssign<Complex64> for KahanSum<Complex64> {
    fn add_assign(&mut self, x: Complex64) {
        self.add(x);
    }
}

/// Fixed-shape pairwise reduction; the result does not depend on how the
/// values were produced, only on their order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum_complex(l) + pairwise_sum_complex(r)
        }
    }
}
