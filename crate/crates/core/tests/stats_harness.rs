mod common;

use common::{c, cnum, load_json, max_z, mean_se, num, rel_err, rng};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rdseries::coeff_models::{CoefficientModel, CoefficientStream};
use rdseries::special::gamma;
use rdseries::stats_harness::{
    clt_normality_check, complex_covariance, geometric_grid, ks_standard_normal, lil_ratios,
    real_zero_process_comparison, tv_distance, zero_count_pmf, zeta_limit_check, zeta_ray, zeta_scaled_sum, LilParams,
    Normalizer, SamplingOptions, Verdict, ZETA_TERMS,
};
use rdseries::synthesis::SeriesPath;

fn gauss(r: &mut impl Rng) -> f64 {
    StandardNormal.sample(r)
}

#[test]
fn complex_covariance_of_known_gaussians() {
    let mut r = rng(30);
    // X = A + iB, Y = X/2 + iC with A, B, C independent N(0, 1)
    let (xs, ys): (Vec<Complex64>, Vec<Complex64>) = (0..100_000)
        .map(|_| {
            let x = c(gauss(&mut r), gauss(&mut r));
            (x, x * 0.5 + c(0.0, gauss(&mut r)))
        })
        .unzip();
    let est = complex_covariance(&xs, &ys).unwrap();
    assert!(max_z(&est, c(0.0, 0.0), c(1.0, 0.0)) < 5.0, "{est:?}");
    let real: Vec<Complex64> = xs.iter().map(|x| c(x.re, 0.0)).collect();
    let est = complex_covariance(&real, &real).unwrap();
    assert_eq!(est.pseudo, est.hermitian);
    assert!(est.pseudo.im == 0.0 && (est.pseudo.re - 1.0).abs() < 5.0 * est.se_pseudo[0]);
    assert!(complex_covariance(&xs[..3], &ys[..4]).is_err());
}

#[test]
fn ks_null_and_alternative() {
    let mut r = rng(31);
    let xs: Vec<f64> = (0..5000).map(|_| gauss(&mut r)).collect();
    let (d, p) = ks_standard_normal(&xs).unwrap();
    assert!(p > 1e-3 && d < 0.03, "d={d} p={p}");
    let wide: Vec<f64> = xs.iter().map(|x| 1.3 * x).collect();
    assert!(ks_standard_normal(&wide).unwrap().1 < 1e-6);
}

#[test]
fn clt_scale_consistency() {
    let opts = SamplingOptions::default();
    for (alpha, s) in [(0.0, 2e-3), (0.5, 1e-2)] {
        let out = clt_normality_check(CoefficientModel::RademacherReal, alpha, s, 2000, 42, &opts, Normalizer::Exact)
            .unwrap();
        assert_eq!(out.report.verdict, Verdict::Pass, "alpha={alpha}: {:?}", out.report);
        let sq: Vec<f64> = out.values.iter().map(|v| v * v).collect();
        let (var, se) = mean_se(&sq);
        assert!((var - 1.0).abs() < 5.0 * se, "alpha={alpha}: variance {var} ± {se}");
        let control =
            clt_normality_check(CoefficientModel::RademacherReal, alpha, s, 2000, 42, &opts, Normalizer::DropTwoPower)
                .unwrap();
        assert_eq!(control.report.verdict, Verdict::Fail);
        let ratio = Normalizer::DropTwoPower.factor(alpha, s, 1.0) / Normalizer::Exact.factor(alpha, s, 1.0);
        assert!((ratio - 2f64.powf(-(1.0 + 2.0 * alpha) / 2.0)).abs() < 1e-14);
    }
    let opts = SamplingOptions::default();
    assert!(clt_normality_check(
        CoefficientModel::GaussianComplexIsotropic,
        0.0,
        1e-3,
        500,
        1,
        &opts,
        Normalizer::Exact
    )
    .is_err());
    assert!(clt_normality_check(CoefficientModel::RademacherReal, 0.0, 0.3, 500, 1, &opts, Normalizer::Exact).is_err());
}

#[test]
fn zero_count_law() {
    let oracle = load_json("zero_count_oracle.json");
    let law = zero_count_pmf(num(&oracle["r"])).unwrap();
    assert!((law.pmf[0] - num(&oracle["p_zero"])).abs() < 1e-10);
    for k in 1..10 {
        let r = k as f64 / 10.0;
        let law = zero_count_pmf(r).unwrap();
        let r2 = r * r;
        let total: f64 = law.pmf.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "r={r}");
        assert!(law.pmf.iter().all(|&p| p >= 0.0));
        assert!((law.mean() - r2 / (1.0 - r2)).abs() < 1e-10, "r={r}");
        assert!((law.variance() - r2 / (1.0 - r2 * r2)).abs() < 1e-10, "r={r}");
        for t in [-0.5, 0.3, 1.0] {
            let product: f64 = (1..=law.k_max).map(|j| 1.0 + t * r2.powi(j as i32)).product();
            assert!((law.generating(t) - product).abs() < 1e-10 * product, "r={r} t={t}");
        }
    }
    let tiny = zero_count_pmf(1e-4).unwrap();
    assert!((tiny.pmf[0] - 1.0).abs() < 2e-8 && (tiny.pmf[1] - 1e-8).abs() < 1e-12);
    assert!(zero_count_pmf(1.0).is_err() && zero_count_pmf(0.0).is_err());
    assert_eq!(tv_distance(&law.pmf, &law.pmf), 0.0);
    assert!((tv_distance(&[1.0], &[0.0, 1.0]) - 1.0).abs() < 1e-15);
}

#[test]
fn lil_ratios_flip_with_the_coefficients() {
    let coeffs = CoefficientStream::new(CoefficientModel::RademacherReal, 3, 0).sample_pairs(20_000).unwrap();
    let path = SeriesPath::from_coefficients(0.0, &coeffs).unwrap();
    let params = LilParams::new(0.0, 1.0, geometric_grid(1e-2, 1e-3, 12)).unwrap();
    let up = lil_ratios(&path, &params);
    let down = lil_ratios(&path.negated(), &params);
    assert!(up.iter().zip(&down).all(|(a, b)| a == &-b));
    let flipped: Vec<(f64, f64)> = coeffs.iter().map(|&(e, t)| (-e, -t)).collect();
    let other = lil_ratios(&SeriesPath::from_coefficients(0.0, &flipped).unwrap(), &params);
    assert!(up.iter().zip(&other).all(|(a, b)| (a + b).abs() < 1e-12 * a.abs().max(1.0)));
    assert!(LilParams::new(0.0, 1.0, vec![1e-3, 1e-2]).is_err());
    assert!(LilParams::new(0.0, 1.0, vec![0.5]).is_err());
    let grid = geometric_grid(1e-2, 1e-6, 40);
    assert_eq!((grid.len(), grid[0], grid[39]), (40, 1e-2, 1e-6));
}

#[test]
fn zeta_sums_match_oracle() {
    let oracle = load_json("zeta_oracle.json");
    for row in oracle["rows"].as_array().unwrap() {
        let (beta, z) = (num(&row["beta"]), cnum(&row["z"]));
        let got = zeta_scaled_sum(beta, z, ZETA_TERMS).unwrap();
        assert!(rel_err(got, cnum(&row["scaled_sum"])) < 1e-10, "beta={beta} z={z}: {got}");
    }
    let z = 0.01;
    let full = zeta_scaled_sum(0.0, c(z, 0.0), ZETA_TERMS).unwrap() + z;
    assert!((full.re - z * num(&oracle["zeta_1_01"])).abs() < 1e-6, "{full}");
    for beta in [0.0, 1.0, 2.0] {
        let rows = zeta_limit_check(beta, &zeta_ray(&[1e-2, 1e-3, 1e-4])).unwrap();
        assert!(rows.windows(2).all(|w| w[1].1 < w[0].1), "beta={beta}: {rows:?}");
        for (z, err) in rows {
            let ratio = err / z.norm();
            assert!(ratio < 10.0 * gamma(1.0 + beta).max(1.0), "beta={beta} z={z}: ratio {ratio}");
        }
    }
}

#[test]
fn zeta_tail_error_shrinks_with_more_terms() {
    for beta in [-0.4, 0.0, 0.5, 2.0] {
        for z in [c(0.01, 0.0), c(0.05, 0.05)] {
            let reference = zeta_scaled_sum(beta, z, 1 << 21).unwrap();
            let errs: Vec<f64> =
                (10..15).map(|k| (zeta_scaled_sum(beta, z, 1 << k).unwrap() - reference).norm()).collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "beta={beta} z={z}: {errs:?}");
            assert!(errs[4] < 1e-5, "beta={beta} z={z}: {errs:?}");
        }
    }
    assert!(zeta_scaled_sum(-1.0, c(0.01, 0.0), 100).is_err());
    assert!(zeta_scaled_sum(0.0, c(0.0, 0.5), 100).is_err());
    assert!(zeta_scaled_sum(0.0, c(0.01, 0.0), 1).is_err());
}

#[test]
fn degenerate_real_windows_are_rejected() {
    let opts = SamplingOptions::default();
    let m = CoefficientModel::RademacherReal;
    for w in [(1.0, 1.0), (2.0, 1.0), (0.0, 1.0), (0.5, f64::INFINITY)] {
        assert!(real_zero_process_comparison(m, 1e-3, w, 10, 1, &opts).is_err(), "{w:?}");
    }
    assert!(real_zero_process_comparison(CoefficientModel::UniformUnitCircle, 1e-3, (0.2, 5.0), 10, 1, &opts).is_err());
}

#[test]
fn real_zero_comparison_at_a_coarse_scale() {
    let out = real_zero_process_comparison(
        CoefficientModel::RademacherReal,
        0.3,
        (0.2, 5.0),
        100,
        11,
        &SamplingOptions::default(),
    )
    .unwrap();
    println!("s=0.3: {}", out.report.to_json());
    assert_eq!(out.series_counts.len(), 100);
    assert_eq!(out.limit_counts.len(), 100);
}
