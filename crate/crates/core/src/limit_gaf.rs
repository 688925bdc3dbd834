//! The Gaussian limit process I(α; ·) on the right half-plane, its two
//! samplers, the hyperbolic power-series GAFs and the maps between them.
//!
//! I(α; z) = (1, i)·𝔠^{1/2}·(I₁, I₂)ᵀ with I_j(α; z) = ∫₀^∞ y^α e^{−zy} dB_j(y).

use crate::coeff_models::{covariance_sqrt, CovarianceSpec};
use crate::csv_out::CsvWriter;
use crate::error::{Error, Result};
use crate::series_eval::check_alpha;
use crate::special::{gamma, power_exp_integral, GaussLegendre};
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_PI_4;

/// Relative tolerance on the smallest eigenvalue of an assembled covariance.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Diagonal jitter schedule for the Cholesky sampler, relative to trace/2m.
pub const JITTER_SCHEDULE: [f64; 3] = [1e-12, 1e-11, 1e-10];

/// Default number of mesh cells for the integral sampler.
pub const DEFAULT_CELLS: usize = 1 << 14;

/// y_max·min Re(grid) must reach this for the discarded tail to be negligible.
pub const MIN_DECAY: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub alpha: f64,
    pub cov: CovarianceSpec,
}

impl KernelParams {
    pub fn new(alpha: f64, cov: CovarianceSpec) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha, cov })
    }
}

fn check_half_plane(z: Complex64) -> Result<()> {
    if z.re > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{z} is not in the right half-plane")))
    }
}

/// E[I(z₁) I(z₂)] = Γ(1+2α)(σ₁² − σ₂² + 2iρ) / (z₁ + z₂)^{1+2α}.
pub fn kernel_pseudo(params: &KernelParams, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    check_half_plane(z1)?;
    check_half_plane(z2)?;
    let c = &params.cov;
    let num = Complex64::new(c.sigma1_sq() - c.sigma2_sq(), 2.0 * c.rho()) * gamma(1.0 + 2.0 * params.alpha);
    Ok(num * (z1 + z2).powf(-(1.0 + 2.0 * params.alpha)))
}

/// E[I(z₁) conj I(z₂)] = Γ(1+2α)(σ₁² + σ₂²) / (z₁ + z̄₂)^{1+2α}.
pub fn kernel_hermitian(params: &KernelParams, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    check_half_plane(z1)?;
    check_half_plane(z2)?;
    let num = gamma(1.0 + 2.0 * params.alpha) * params.cov.second_moment();
    Ok((z1 + z2.conj()).powf(-(1.0 + 2.0 * params.alpha)) * num)
}

/// Covariance of (Re I(z₁), Im I(z₁), Re I(z₂), …), interleaved.
pub fn joint_real_covariance(params: &KernelParams, grid: &[Complex64]) -> Result<DMatrix<f64>> {
    let c = assemble_real_covariance(grid.len(), |i, j| {
        Ok((kernel_pseudo(params, grid[i], grid[j])?, kernel_hermitian(params, grid[i], grid[j])?))
    })?;
    let trace = c.trace();
    if !grid.is_empty() {
        let min_eig = SymmetricEigen::new(c.clone()).eigenvalues.min();
        let tolerance = -PSD_TOLERANCE * trace;
        if min_eig < tolerance {
            return Err(Error::KernelInconsistency { min_eigenvalue: min_eig, tolerance });
        }
    }
    Ok(c)
}

/// Real 2m×2m covariance from (pseudo, hermitian) pairs for i ≤ j.
pub(crate) fn assemble_real_covariance(
    m: usize,
    mut entry: impl FnMut(usize, usize) -> Result<(Complex64, Complex64)>,
) -> Result<DMatrix<f64>> {
    let mut c = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in i..m {
            let (p, h) = entry(i, j)?;
            let rr = 0.5 * (p.re + h.re);
            let ii = 0.5 * (h.re - p.re);
            let ri = 0.5 * (p.im - h.im);
            let ir = 0.5 * (p.im + h.im);
            let (a, b) = (2 * i, 2 * j);
            c[(a, b)] = rr;
            c[(a + 1, b + 1)] = ii;
            c[(a, b + 1)] = ri;
            c[(a + 1, b)] = ir;
            c[(b, a)] = rr;
            c[(b + 1, a + 1)] = ii;
            c[(b + 1, a)] = ri;
            c[(b, a + 1)] = ir;
        }
    }
    Ok(c)
}

/// Lower Cholesky factor, escalating diagonal jitter along [`JITTER_SCHEDULE`].
pub(crate) fn jittered_cholesky(c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dim = c.nrows();
    let base = c.trace() / dim as f64;
    for &eps in &JITTER_SCHEDULE {
        let jittered = c + DMatrix::identity(dim, dim) * (eps * base);
        if let Some(ch) = Cholesky::new(jittered) {
            return Ok(ch.l());
        }
    }
    Err(Error::DegenerateGrid("Cholesky failed after jitter escalation".into()))
}

/// Which domain a sample's points live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleDomain {
    HalfPlane,
    UnitDisk,
}

/// A realization restricted to finitely many points.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub domain: SampleDomain,
}

impl GridSample {
    pub fn new(points: Vec<Complex64>, values: Vec<Complex64>, domain: SampleDomain) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Length { needed: points.len(), available: values.len() });
        }
        for &z in &points {
            let inside = match domain {
                SampleDomain::HalfPlane => z.re > 0.0,
                SampleDomain::UnitDisk => z.norm() < 1.0,
            };
            if !inside {
                return Err(Error::Domain(format!("{z} outside the sample domain")));
            }
        }
        Ok(Self { points, values, domain })
    }

    pub fn to_csv(&self) -> String {
        let mut w = CsvWriter::new(&["re_z", "im_z", "re_val", "im_val"]);
        for (z, v) in self.points.iter().zip(&self.values) {
            w.row_f64(&[z.re, z.im, v.re, v.im]);
        }
        w.finish()
    }
}

fn check_distinct(grid: &[Complex64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyRequest("grid is empty"));
    }
    for i in 0..grid.len() {
        for j in 0..i {
            if (grid[i] - grid[j]).norm() <= 1e-14 * grid[i].norm().max(1.0) {
                return Err(Error::DegenerateGrid(format!("point {} repeats point {}", grid[i], grid[j])));
            }
        }
    }
    Ok(())
}

/// Finite-dimensional sampler through a Cholesky factor of the joint law.
#[derive(Debug, Clone)]
pub struct CholeskySampler {
    grid: Vec<Complex64>,
    factor: DMatrix<f64>,
}

impl CholeskySampler {
    pub fn new(params: &KernelParams, grid: &[Complex64]) -> Result<Self> {
        check_distinct(grid)?;
        let c = joint_real_covariance(params, grid)?;
        Ok(Self { grid: grid.to_vec(), factor: jittered_cholesky(&c)? })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> GridSample {
        let dim = self.factor.nrows();
        let n = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let v = &self.factor * n;
        let values = (0..self.grid.len()).map(|i| Complex64::new(v[2 * i], v[2 * i + 1])).collect();
        GridSample { points: self.grid.clone(), values, domain: SampleDomain::HalfPlane }
    }
}

pub fn sample_gaf_cholesky(params: &KernelParams, grid: &[Complex64], rng: &mut impl Rng) -> Result<GridSample> {
    Ok(CholeskySampler::new(params, grid)?.sample(rng))
}

/// Brownian increments on a fixed mesh 0 = t₀ < t₁ < … < t_n = y_max.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianGrid {
    pub times: Vec<f64>,
    pub increments: [Vec<f64>; 2],
}

impl BrownianGrid {
    /// Graded mesh t_i = y_max (i/n)², finer near the origin.
    pub fn graded_times(y_max: f64, cells: usize) -> Vec<f64> {
        (0..=cells).map(|i| y_max * (i as f64 / cells as f64).powi(2)).collect()
    }

    pub fn sample(times: Vec<f64>, rng: &mut impl Rng) -> Self {
        let mut inc = [Vec::with_capacity(times.len()), Vec::with_capacity(times.len())];
        for b in inc.iter_mut() {
            for w in times.windows(2) {
                b.push((w[1] - w[0]).sqrt() * rng.sample::<f64, _>(StandardNormal));
            }
        }
        Self { times, increments: inc }
    }
}

/// Sampler discretizing the stochastic integrals on a graded mesh with exact
/// per-cell variances.
#[derive(Debug, Clone)]
pub struct IntegralSampler {
    grid: Vec<Complex64>,
    times: Vec<f64>,
    // weights[p * cells + i] = sqrt(V_i(Re z_p) / Δt_i) · e^{−i Im z_p · y_mid}
    weights: Vec<Complex64>,
    root: [[f64; 2]; 2],
    real: bool,
}

impl IntegralSampler {
    pub fn new(params: &KernelParams, grid: &[Complex64], y_max: Option<f64>, cells: Option<usize>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::EmptyRequest("grid is empty"));
        }
        for &z in grid {
            check_half_plane(z)?;
        }
        let min_re = grid.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let y_max = y_max.unwrap_or(MIN_DECAY / min_re);
        let cells = cells.unwrap_or(DEFAULT_CELLS);
        if y_max * min_re < MIN_DECAY * (1.0 - 1e-12) {
            return Err(Error::DiscretizationTooCoarse(format!("y_max·min Re = {} < {MIN_DECAY}", y_max * min_re)));
        }
        if cells < 1000 {
            return Err(Error::DiscretizationTooCoarse(format!("{cells} cells < 1000")));
        }
        let times = BrownianGrid::graded_times(y_max, cells);
        let two_a = 2.0 * params.alpha;
        let gl = GaussLegendre::new(8);
        let mut weights = Vec::with_capacity(grid.len() * cells);
        for &z in grid {
            for i in 0..cells {
                let (lo, hi) = (times[i], times[i + 1]);
                let var = if i == 0 {
                    power_exp_integral(two_a, 2.0 * z.re, 0.0, hi)
                } else {
                    gl.integrate(lo, hi, |y| y.powf(two_a) * (-2.0 * z.re * y).exp())
                };
                let mid = 0.5 * (lo + hi);
                weights.push(Complex64::from_polar((var / (hi - lo)).sqrt(), -z.im * mid));
            }
        }
        Ok(Self { grid: grid.to_vec(), times, weights, root: covariance_sqrt(&params.cov), real: params.cov.is_real() })
    }

    pub fn cells(&self) -> usize {
        self.times.len() - 1
    }

    /// Σ_i w_i(x)² Δt_i at grid point `p`: the discrete variance of I_j.
    pub fn discrete_variance(&self, p: usize) -> f64 {
        let n = self.cells();
        self.weights[p * n..(p + 1) * n]
            .iter()
            .zip(self.times.windows(2))
            .map(|(w, t)| w.norm_sqr() * (t[1] - t[0]))
            .sum()
    }

    pub fn sample_from(&self, bm: &BrownianGrid) -> GridSample {
        let n = self.cells();
        let values = (0..self.grid.len())
            .map(|p| {
                let w = &self.weights[p * n..(p + 1) * n];
                let i1: Complex64 = w.iter().zip(&bm.increments[0]).map(|(w, b)| w * b).sum();
                let i2: Complex64 = if self.real {
                    Complex64::new(0.0, 0.0)
                } else {
                    w.iter().zip(&bm.increments[1]).map(|(w, b)| w * b).sum()
                };
                let r = &self.root;
                // (1, i)·𝔠^{1/2}·(I₁, I₂)ᵀ with complex I_j
                (i1 * r[0][0] + i2 * r[0][1]) + Complex64::i() * (i1 * r[1][0] + i2 * r[1][1])
            })
            .collect();
        GridSample { points: self.grid.clone(), values, domain: SampleDomain::HalfPlane }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> GridSample {
        self.sample_from(&BrownianGrid::sample(self.times.clone(), rng))
    }
}

pub fn sample_gaf_integral(
    params: &KernelParams,
    grid: &[Complex64],
    rng: &mut impl Rng,
    y_max: Option<f64>,
    cells: Option<usize>,
) -> Result<GridSample> {
    Ok(IntegralSampler::new(params, grid, y_max, cells)?.sample(rng))
}

/// c_n² = (1+2α)(2+2α)⋯(n+2α)/n!.
pub fn hyperbolic_gaf_coeff_sq(alpha: f64, n: usize) -> f64 {
    let mut c = 1.0;
    for k in 1..=n {
        c *= (k as f64 + 2.0 * alpha) / k as f64;
    }
    c
}

/// Smallest number of terms whose omitted variance Σ_{n≥N} c_n² r^{2n} is below `tol`.
pub fn power_series_terms(alpha: f64, r: f64, tol: f64) -> usize {
    let r2 = r * r;
    let mut term = 1.0;
    let mut n = 0usize;
    loop {
        // ratio of consecutive terms decreases to r² once n > 0
        let ratio = r2 * (n as f64 + 1.0 + 2.0 * alpha) / (n as f64 + 1.0);
        if n > 0 && ratio < 1.0 && term / (1.0 - ratio) < tol {
            return n;
        }
        term *= ratio;
        n += 1;
    }
}

/// Coefficients c_n 𝒩_n for n < `n_terms`; 𝒩 standard complex (E|𝒩|² = 1) or standard real.
pub fn sample_power_series_gaf(
    alpha: f64,
    complex: bool,
    rng: &mut impl Rng,
    n_terms: usize,
) -> Result<Vec<Complex64>> {
    check_alpha(alpha)?;
    if n_terms == 0 {
        return Err(Error::EmptyRequest("power series needs at least one term"));
    }
    let mut c2 = 1.0;
    let mut out = Vec::with_capacity(n_terms);
    for n in 0..n_terms {
        if n > 0 {
            c2 *= (n as f64 + 2.0 * alpha) / n as f64;
        }
        let c = c2.sqrt();
        let v = if complex {
            let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
        } else {
            Complex64::new(rng.sample(StandardNormal), 0.0)
        };
        out.push(v * c);
    }
    Ok(out)
}

/// Horner evaluation of Σ a_n z^n.
pub fn eval_power_series(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// φ(z) = (1 + z)/(1 − z).
pub fn mobius(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("φ has a pole at z = 1".into()));
    }
    Ok((1.0 + z) / (1.0 - z))
}

/// φ⁻¹(w) = (w − 1)/(w + 1).
pub fn mobius_inv(w: Complex64) -> Result<Complex64> {
    if w == Complex64::new(-1.0, 0.0) {
        return Err(Error::Pole("φ⁻¹ has a pole at w = −1".into()));
    }
    Ok((w - 1.0) / (w + 1.0))
}

/// 2^α Γ(1+2α)^{−1/2} (1 − z)^{−(1+2α)}.
pub fn time_change_prefactor(alpha: f64, z: Complex64) -> Complex64 {
    (1.0 - z).powf(-(1.0 + 2.0 * alpha)) * (2f64.powf(alpha) / gamma(1.0 + 2.0 * alpha).sqrt())
}

/// Pulls a sample of I(α; ·) on φ(disk points) back to f_{α,ℂ} on the disk.
pub fn time_change_to_disk(
    params: &KernelParams,
    disk_points: &[Complex64],
    samples: &GridSample,
) -> Result<GridSample> {
    let mut values = Vec::with_capacity(disk_points.len());
    for &z in disk_points {
        let w = mobius(z)?;
        let idx = samples
            .points
            .iter()
            .position(|&p| (p - w).norm() <= 1e-12 * w.norm().max(1.0))
            .ok_or_else(|| Error::Alignment(format!("{w}")))?;
        values.push(time_change_prefactor(params.alpha, z) * samples.values[idx]);
    }
    GridSample::new(disk_points.to_vec(), values, SampleDomain::UnitDisk)
}

/// Hermitian covariance of the stationary strip process: cosh(z₁ − z̄₂)^{−(1+2α)}.
pub fn s_alpha_covariance(alpha: f64, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    check_alpha(alpha)?;
    for z in [z1, z2] {
        if !(z.im.abs() < FRAC_PI_4) || !z.re.is_finite() {
            return Err(Error::Domain(format!("{z} outside the strip |Im z| < π/4")));
        }
    }
    Ok((z1 - z2.conj()).cosh().powf(-(1.0 + 2.0 * alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_models::{keyed_rng, StreamPurpose};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(alpha: f64, s1: f64, s2: f64, rho: f64) -> KernelParams {
        KernelParams::new(alpha, CovarianceSpec::new(s1, s2, rho).unwrap()).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let iso = params(0.0, 1.0, 1.0, 0.0);
        assert_eq!(kernel_pseudo(&iso, c(0.3, 2.0), c(1.0, -1.0)).unwrap(), c(0.0, 0.0));
        let real = params(0.0, 1.0, 0.0, 0.0);
        assert_relative_eq!(kernel_pseudo(&real, c(1.0, 0.0), c(1.0, 0.0)).unwrap().re, 0.5, max_relative = 1e-15);
        let half = params(0.5, 1.0, 0.0, 0.0);
        let v = kernel_pseudo(&half, c(1.0, 1.0), c(1.0, -1.0)).unwrap();
        assert!((v - c(0.25, 0.0)).norm() < 1e-15);
        let h = params(0.0, 0.5, 0.5, 0.0);
        assert_relative_eq!(kernel_hermitian(&h, c(1.0, 0.0), c(1.0, 0.0)).unwrap().re, 0.5, max_relative = 1e-15);
        let one = params(1.0, 0.5, 0.5, 0.0);
        let v = kernel_hermitian(&one, c(2.0, 1.0), c(2.0, -1.0)).unwrap();
        let want = c(2.0, 0.0) / (c(4.0, 2.0) * c(4.0, 2.0) * c(4.0, 2.0));
        assert!((v - want).norm() < 1e-14 * want.norm());
        assert!(kernel_hermitian(&one, c(0.0, 1.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn joint_covariance_examples() {
        let m = joint_real_covariance(&params(0.0, 1.0, 0.0, 0.0), &[c(1.0, 0.0)]).unwrap();
        assert_relative_eq!(m[(0, 0)], 0.5, max_relative = 1e-15);
        assert_eq!(m[(1, 1)], 0.0);
        assert_eq!(m[(0, 1)], 0.0);
        let m = joint_real_covariance(&params(0.0, 0.5, 0.5, 0.0), &[c(1.0, 0.0)]).unwrap();
        assert_relative_eq!(m[(0, 0)], 0.25, max_relative = 1e-15);
        assert_relative_eq!(m[(1, 1)], 0.25, max_relative = 1e-15);
        assert_eq!(m[(0, 1)], 0.0);
    }

    #[test]
    fn duplicated_points_are_degenerate() {
        let p = params(0.0, 1.0, 1.0, 0.0);
        let err = CholeskySampler::new(&p, &[c(1.0, 0.0), c(2.0, 1.0), c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::DegenerateGrid(_)));
    }

    #[test]
    fn real_model_gives_real_draws() {
        let p = params(0.0, 1.0, 0.0, 0.0);
        let s = CholeskySampler::new(&p, &[c(1.0, 0.0)]).unwrap();
        let mut rng = keyed_rng(1, 0, StreamPurpose::LimitProcess);
        for _ in 0..100 {
            let v = s.sample(&mut rng).values[0];
            assert!(v.im.abs() < 1e-4, "{v}");
        }
    }

    #[test]
    fn integral_sampler_discrete_variance() {
        for &alpha in &[-0.25, 0.0, 1.0] {
            let p = params(alpha, 1.0, 0.0, 0.0);
            let x = 0.7;
            let s = IntegralSampler::new(&p, &[c(x, 0.3)], None, Some(10_000)).unwrap();
            let y_max = MIN_DECAY / x;
            let want = power_exp_integral(2.0 * alpha, 2.0 * x, 0.0, y_max);
            assert_relative_eq!(s.discrete_variance(0), want, max_relative = 1e-3);
        }
    }

    #[test]
    fn integral_sampler_preconditions() {
        let p = params(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(
            IntegralSampler::new(&p, &[c(1.0, 0.0)], Some(10.0), None),
            Err(Error::DiscretizationTooCoarse(_))
        ));
        assert!(matches!(
            IntegralSampler::new(&p, &[c(1.0, 0.0)], None, Some(999)),
            Err(Error::DiscretizationTooCoarse(_))
        ));
    }

    #[test]
    fn coefficient_recurrence() {
        assert_eq!(hyperbolic_gaf_coeff_sq(0.7, 0), 1.0);
        for n in 0..50 {
            assert_eq!(hyperbolic_gaf_coeff_sq(0.0, n), 1.0);
        }
        assert_relative_eq!(hyperbolic_gaf_coeff_sq(0.5, 3), 4.0, max_relative = 1e-15);
    }

    #[test]
    fn power_series_variance_identity() {
        for &alpha in &[-0.25, 0.0, 1.0] {
            for &r in &[0.3, 0.6] {
                let n = power_series_terms(alpha, r, 1e-12);
                let partial: f64 = (0..n).map(|k| hyperbolic_gaf_coeff_sq(alpha, k) * r.powi(2 * k as i32)).sum();
                let want = (1.0 - r * r).powf(-(1.0 + 2.0 * alpha));
                assert!((partial - want).abs() < 1e-10, "α={alpha} r={r}");
            }
        }
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert!((mobius(c(-0.5, 0.0)).unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(matches!(mobius(c(1.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(mobius_inv(c(-1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn prefactor_examples() {
        let v = time_change_prefactor(0.5, c(0.5, 0.0));
        assert!((v - c(4.0 * 2f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!((time_change_prefactor(0.0, c(0.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn strip_covariance() {
        assert_relative_eq!(s_alpha_covariance(0.3, c(0.4, 0.0), c(0.4, 0.0)).unwrap().re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            s_alpha_covariance(0.0, c(0.1, 0.0), c(0.0, 0.0)).unwrap().re,
            1.0 / 0.1f64.cosh(),
            max_relative = 1e-15
        );
        assert!(matches!(s_alpha_covariance(0.0, c(0.0, 0.8), c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn time_change_alignment() {
        let p = params(0.0, 1.0, 1.0, 0.0);
        let sample = GridSample::new(vec![c(1.0, 0.0)], vec![c(0.5, 0.5)], SampleDomain::HalfPlane).unwrap();
        let out = time_change_to_disk(&p, &[c(0.0, 0.0)], &sample).unwrap();
        assert!((out.values[0] - c(0.5, 0.5)).norm() < 1e-15);
        assert!(matches!(time_change_to_disk(&p, &[c(0.2, 0.0)], &sample), Err(Error::Alignment(_))));
    }
}
