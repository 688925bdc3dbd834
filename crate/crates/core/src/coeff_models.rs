//! Coefficient laws for the pair (η, θ), their covariance matrix and
//! reproducible sampling streams.
//!
//! Streams are counter-based: the `k`-th pair of replicate `j` is read from a
//! ChaCha8 keystream keyed by `(master_seed, j)` at word offset `4k`, so any
//! draw can be regenerated without touching its predecessors. Every pair
//! consumes exactly two 64-bit words regardless of the model.

use crate::error::{Error, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Covariance matrix of (η, θ): `[[σ₁², ρ], [ρ, σ₂²]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceSpec {
    sigma1_sq: f64,
    sigma2_sq: f64,
    rho: f64,
}

impl CovarianceSpec {
    pub fn new(sigma1_sq: f64, sigma2_sq: f64, rho: f64) -> Result<Self> {
        if !(sigma1_sq.is_finite() && sigma2_sq.is_finite() && rho.is_finite()) {
            return Err(Error::InvalidArgument("covariance entries must be finite".into()));
        }
        if sigma1_sq < 0.0 || sigma2_sq < 0.0 {
            return Err(Error::InvalidArgument("variances must be nonnegative".into()));
        }
        if sigma1_sq + sigma2_sq <= 0.0 {
            return Err(Error::InvalidArgument("Var η + Var θ must be positive".into()));
        }
        let det_slack = 1e-12 * (sigma1_sq * sigma2_sq).max(f64::MIN_POSITIVE);
        if rho * rho > sigma1_sq * sigma2_sq + det_slack {
            return Err(Error::InvalidArgument(format!(
                "rho² = {} exceeds σ₁²σ₂² = {}",
                rho * rho,
                sigma1_sq * sigma2_sq
            )));
        }
        Ok(Self { sigma1_sq, sigma2_sq, rho })
    }

    /// 𝔠 = I, the matrix whose limit process is driven by B₁ + iB₂.
    pub fn identity() -> Self {
        Self { sigma1_sq: 1.0, sigma2_sq: 1.0, rho: 0.0 }
    }

    pub fn sigma1_sq(&self) -> f64 {
        self.sigma1_sq
    }
    pub fn sigma2_sq(&self) -> f64 {
        self.sigma2_sq
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// E(η² + θ²).
    pub fn second_moment(&self) -> f64 {
        self.sigma1_sq + self.sigma2_sq
    }

    pub fn is_isotropic(&self) -> bool {
        self.sigma1_sq == self.sigma2_sq && self.rho == 0.0
    }

    pub fn is_real(&self) -> bool {
        self.sigma2_sq == 0.0 && self.rho == 0.0
    }

    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.sigma1_sq, self.rho], [self.rho, self.sigma2_sq]]
    }
}

/// Symmetric positive semidefinite square root of 𝔠.
///
/// Uses the 2×2 identity √A = (A + √det·I) / √(tr A + 2√det).
pub fn covariance_sqrt(spec: &CovarianceSpec) -> [[f64; 2]; 2] {
    let det = (spec.sigma1_sq * spec.sigma2_sq - spec.rho * spec.rho).max(0.0);
    let sd = det.sqrt();
    let t = (spec.sigma1_sq + spec.sigma2_sq + 2.0 * sd).sqrt();
    [[(spec.sigma1_sq + sd) / t, spec.rho / t], [spec.rho / t, (spec.sigma2_sq + sd) / t]]
}

/// Law of the pair (η, θ). Every variant is centered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientModel {
    /// η = ±1 with probability ½, θ = 0.
    RademacherReal,
    /// η ~ Normal(0, variance), θ = 0.
    GaussianReal { variance: f64 },
    /// η + iθ standard complex normal: η, θ independent Normal(0, ½).
    GaussianComplexIsotropic,
    /// η + iθ = e^{iU}, U uniform on [0, 2π).
    UniformUnitCircle,
    /// η + iθ = w with probability p, and −p·w/(1−p) otherwise.
    TwoPointComplex { w_re: f64, w_im: f64, p: f64 },
}

impl CoefficientModel {
    pub fn gaussian_real(variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidArgument("gauss-real variance must be positive".into()));
        }
        Ok(Self::GaussianReal { variance })
    }

    pub fn two_point(w_re: f64, w_im: f64, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument("two-point p must lie in (0, 1)".into()));
        }
        if !(w_re.is_finite() && w_im.is_finite()) || (w_re == 0.0 && w_im == 0.0) {
            return Err(Error::InvalidArgument("two-point atom must be finite and nonzero".into()));
        }
        Ok(Self::TwoPointComplex { w_re, w_im, p })
    }

    /// Configuration name of the model kind.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::RademacherReal => "rademacher",
            Self::GaussianReal { .. } => "gauss-real",
            Self::GaussianComplexIsotropic => "gauss-complex",
            Self::UniformUnitCircle => "circle",
            Self::TwoPointComplex { .. } => "two-point",
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Self::RademacherReal | Self::GaussianReal { .. })
    }

    // Maps two uniform 64-bit words to one pair. Fixed word budget per pair.
    fn pair_from_words(&self, a: u64, b: u64) -> (f64, f64) {
        match *self {
            Self::RademacherReal => (if a >> 63 == 0 { 1.0 } else { -1.0 }, 0.0),
            Self::GaussianReal { variance } => {
                let (g, _) = box_muller(a, b);
                (variance.sqrt() * g, 0.0)
            }
            Self::GaussianComplexIsotropic => {
                let (g1, g2) = box_muller(a, b);
                (g1 * std::f64::consts::FRAC_1_SQRT_2, g2 * std::f64::consts::FRAC_1_SQRT_2)
            }
            Self::UniformUnitCircle => {
                let (s, c) = (2.0 * PI * unit_open_closed(a)).sin_cos();
                (c, s)
            }
            Self::TwoPointComplex { w_re, w_im, p } => {
                if unit_open_closed(a) <= p {
                    (w_re, w_im)
                } else {
                    let f = -p / (1.0 - p);
                    (f * w_re, f * w_im)
                }
            }
        }
    }
}

/// Exact covariance matrix of a model's law.
pub fn implied_covariance(model: &CoefficientModel) -> CovarianceSpec {
    let (s1, s2, rho) = match *model {
        CoefficientModel::RademacherReal => (1.0, 0.0, 0.0),
        CoefficientModel::GaussianReal { variance } => (variance, 0.0, 0.0),
        CoefficientModel::GaussianComplexIsotropic => (0.5, 0.5, 0.0),
        CoefficientModel::UniformUnitCircle => (0.5, 0.5, 0.0),
        CoefficientModel::TwoPointComplex { w_re, w_im, p } => {
            let k = p / (1.0 - p);
            (k * w_re * w_re, k * w_im * w_im, k * w_re * w_im)
        }
    };
    CovarianceSpec { sigma1_sq: s1, sigma2_sq: s2, rho }
}

fn unit_open_closed(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn box_muller(a: u64, b: u64) -> (f64, f64) {
    let r = (-2.0 * unit_open_closed(a).ln()).sqrt();
    let (s, c) = (2.0 * PI * unit_open_closed(b)).sin_cos();
    (r * c, r * s)
}

/// Purpose tags select independent ChaCha streams under one key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    Coefficients = 0,
    GaussianTail = 1,
    LimitProcess = 2,
    PowerSeries = 3,
    Auxiliary = 4,
}

/// Builds the keystream for `(master_seed, replicate_id, purpose)`.
pub fn keyed_rng(master_seed: u64, replicate_id: u64, purpose: StreamPurpose) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&replicate_id.to_le_bytes());
    key[16..24].copy_from_slice(b"rdseries");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(purpose as u64);
    rng
}

/// Largest number of pairs one request may materialize.
pub const MAX_DRAWS: u64 = 1 << 27;

/// Reproducible i.i.d. sequence (η_n, θ_n), n ≥ 2, for one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientStream {
    pub model: CoefficientModel,
    pub master_seed: u64,
    pub replicate_id: u64,
}

impl CoefficientStream {
    pub fn new(model: CoefficientModel, master_seed: u64, replicate_id: u64) -> Self {
        Self { model, master_seed, replicate_id }
    }

    /// Pairs (η_2, θ_2), …, (η_{count+1}, θ_{count+1}).
    pub fn sample_pairs(&self, count: usize) -> Result<Vec<(f64, f64)>> {
        self.sample_range(0, count)
    }

    /// Pairs with zero-based draw indices `offset .. offset + count`; draw
    /// index `k` is the coefficient of n = k + 2.
    pub fn sample_range(&self, offset: u64, count: usize) -> Result<Vec<(f64, f64)>> {
        if count == 0 {
            return Err(Error::EmptyRequest("sample_pairs needs count ≥ 1"));
        }
        if count as u64 > MAX_DRAWS {
            return Err(Error::ResourceCap { cap: MAX_DRAWS });
        }
        let mut rng = keyed_rng(self.master_seed, self.replicate_id, StreamPurpose::Coefficients);
        rng.set_word_pos(4 * offset as u128);
        Ok((0..count)
            .map(|_| {
                let a = rng.next_u64();
                let b = rng.next_u64();
                self.model.pair_from_words(a, b)
            })
            .collect())
    }
}

/// Free-function form of [`CoefficientStream::sample_pairs`].
pub fn sample_pairs(stream: &CoefficientStream, count: usize) -> Result<Vec<(f64, f64)>> {
    stream.sample_pairs(count)
}

/// Parses a model from its configuration name plus a parameter lookup
/// (`variance`, `re`, `im`, `p`).
pub fn model_from_config(kind: &str, param: impl Fn(&str) -> Option<f64>) -> Result<CoefficientModel> {
    match kind {
        "rademacher" => Ok(CoefficientModel::RademacherReal),
        "gauss-real" => CoefficientModel::gaussian_real(param("variance").unwrap_or(1.0)),
        "gauss-complex" => Ok(CoefficientModel::GaussianComplexIsotropic),
        "circle" => Ok(CoefficientModel::UniformUnitCircle),
        "two-point" => CoefficientModel::two_point(
            param("re").unwrap_or(1.0),
            param("im").unwrap_or(1.0),
            param("p").unwrap_or(0.5),
        ),
        other => Err(Error::InvalidArgument(format!("unknown coefficient kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix2, SymmetricEigen};

    #[test]
    fn implied_covariances_of_named_models() {
        assert_eq!(implied_covariance(&CoefficientModel::RademacherReal).as_matrix(), [[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(
            implied_covariance(&CoefficientModel::GaussianComplexIsotropic).as_matrix(),
            [[0.5, 0.0], [0.0, 0.5]]
        );
    }

    #[test]
    fn circle_covariance_matches_direct_integration() {
        // midpoint rule on cos², sin², cos·sin over one period
        let n = 100_000;
        let (mut cc, mut ss, mut cs) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let u = 2.0 * PI * (i as f64 + 0.5) / n as f64;
            cc += u.cos().powi(2);
            ss += u.sin().powi(2);
            cs += u.cos() * u.sin();
        }
        let c = implied_covariance(&CoefficientModel::UniformUnitCircle);
        assert_relative_eq!(c.sigma1_sq(), cc / n as f64, epsilon = 1e-12);
        assert_relative_eq!(c.sigma2_sq(), ss / n as f64, epsilon = 1e-12);
        assert_relative_eq!(c.rho(), cs / n as f64, epsilon = 1e-12);
    }

    #[test]
    fn two_point_is_centered_with_rank_one_covariance() {
        let m = CoefficientModel::two_point(1.0, 0.5, 0.3).unwrap();
        let c = implied_covariance(&m);
        assert_relative_eq!(c.rho() * c.rho(), c.sigma1_sq() * c.sigma2_sq(), max_relative = 1e-14);
        CovarianceSpec::new(c.sigma1_sq(), c.sigma2_sq(), c.rho()).unwrap();
        let pairs = CoefficientStream::new(m, 3, 0).sample_pairs(200_000).unwrap();
        let mean: f64 = pairs.iter().map(|p| p.0).sum::<f64>() / pairs.len() as f64;
        assert!(mean.abs() < 0.01);
    }

    #[test]
    fn covariance_spec_rejects_invalid() {
        assert!(CovarianceSpec::new(-1.0, 1.0, 0.0).is_err());
        assert!(CovarianceSpec::new(0.0, 0.0, 0.0).is_err());
        assert!(CovarianceSpec::new(1.0, 1.0, 1.5).is_err());
        assert!(CovarianceSpec::new(1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn sqrt_examples() {
        let id = covariance_sqrt(&CovarianceSpec::identity());
        assert_eq!(id, [[1.0, 0.0], [0.0, 1.0]]);
        let d = covariance_sqrt(&CovarianceSpec::new(4.0, 1.0, 0.0).unwrap());
        assert_relative_eq!(d[0][0], 2.0, max_relative = 1e-15);
        assert_relative_eq!(d[1][1], 1.0, max_relative = 1e-15);
        assert_eq!(d[0][1], 0.0);
    }

    #[test]
    fn sqrt_reconstructs_against_eigen_oracle() {
        let spec = CovarianceSpec::new(1.0, 1.0, 0.5).unwrap();
        let m = covariance_sqrt(&spec);
        // oracle: V·diag(√λ)·Vᵀ
        let eig = SymmetricEigen::new(Matrix2::new(1.0, 0.5, 0.5, 1.0));
        let root =
            eig.eigenvectors * Matrix2::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(m[i][j], root[(i, j)], max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn empty_request_is_an_error() {
        let s = CoefficientStream::new(CoefficientModel::RademacherReal, 1, 0);
        assert_eq!(s.sample_pairs(0), Err(Error::EmptyRequest("sample_pairs needs count ≥ 1")));
    }

    #[test]
    fn streams_are_deterministic_and_seekable() {
        let s = CoefficientStream::new(CoefficientModel::GaussianComplexIsotropic, 99, 7);
        let a = s.sample_pairs(1000).unwrap();
        let b = s.sample_pairs(1000).unwrap();
        assert_eq!(a, b);
        let head = s.sample_range(0, 500).unwrap();
        let tail = s.sample_range(500, 500).unwrap();
        assert_eq!([head, tail].concat(), a);
        let other = CoefficientStream::new(s.model, 99, 8).sample_pairs(10).unwrap();
        assert_ne!(other, a[..10].to_vec());
    }

    #[test]
    fn rademacher_mean_is_small() {
        let s = CoefficientStream::new(CoefficientModel::RademacherReal, 42, 0);
        let xs = s.sample_pairs(1_000_000).unwrap();
        let mean = xs.iter().map(|p| p.0).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.004, "mean {mean}");
        assert!(xs.iter().all(|p| p.0.abs() == 1.0 && p.1 == 0.0));
    }

    #[test]
    fn oversized_request_hits_the_cap() {
        let s = CoefficientStream::new(CoefficientModel::RademacherReal, 0, 0);
        assert!(matches!(s.sample_pairs(MAX_DRAWS as usize + 1), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn circle_draws_lie_on_the_circle() {
        let s = CoefficientStream::new(CoefficientModel::UniformUnitCircle, 5, 0);
        for (x, y) in s.sample_pairs(1_000_000).unwrap() {
            assert!((x * x + y * y - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn config_names_round_trip() {
        for name in ["rademacher", "gauss-real", "gauss-complex", "circle", "two-point"] {
            let m = model_from_config(name, |_| None).unwrap();
            assert_eq!(m.kind_name(), name);
        }
        assert!(model_from_config("cauchy", |_| None).is_err());
    }
}
