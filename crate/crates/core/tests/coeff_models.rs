mod common;

use proptest::prelude::*;
use rayon::prelude::*;
use rdseries::coeff_models::{
    covariance_sqrt, implied_covariance, sample_pairs, CoefficientModel, CoefficientStream, CovarianceSpec,
};

fn models() -> Vec<CoefficientModel> {
    vec![
        CoefficientModel::RademacherReal,
        CoefficientModel::gaussian_real(2.5).unwrap(),
        CoefficientModel::GaussianComplexIsotropic,
        CoefficientModel::UniformUnitCircle,
        CoefficientModel::two_point(1.0, 0.5, 0.3).unwrap(),
    ]
}

#[test]
fn empirical_covariance_converges_for_every_model() {
    let count = 1_000_000;
    for (j, model) in models().into_iter().enumerate() {
        let draws = CoefficientStream::new(model, 1729, j as u64).sample_pairs(count).unwrap();
        let n = count as f64;
        let (mut se, mut st, mut see, mut stt, mut set, mut m4) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for &(e, t) in &draws {
            se += e;
            st += t;
            see += e * e;
            stt += t * t;
            set += e * t;
            m4 += (e * e + t * t).powi(2);
        }
        let (me, mt) = (se / n, st / n);
        let emp = [see / n - me * me, stt / n - mt * mt, set / n - me * mt];
        let spec = implied_covariance(&model);
        let target = [spec.sigma1_sq(), spec.sigma2_sq(), spec.rho()];
        let frob =
            ((emp[0] - target[0]).powi(2) + (emp[1] - target[1]).powi(2) + 2.0 * (emp[2] - target[2]).powi(2)).sqrt();
        let bound = 5.0 * (m4 / n).sqrt() / n.sqrt();
        assert!(frob < bound, "{}: Frobenius distance {frob} exceeds {bound}", model.kind_name());
        assert!(me.abs() < 5.0 * (target[0] / n).sqrt() + 1e-15, "{}: mean η {me}", model.kind_name());
    }
}

#[test]
fn rademacher_and_circle_examples() {
    let draws = CoefficientStream::new(CoefficientModel::RademacherReal, 42, 0).sample_pairs(1_000_000).unwrap();
    let mean = draws.iter().map(|p| p.0).sum::<f64>() / draws.len() as f64;
    assert!(mean.abs() < 0.004, "mean {mean}");
    assert!(draws.iter().all(|&(e, t)| (e == 1.0 || e == -1.0) && t == 0.0));
    let draws = CoefficientStream::new(CoefficientModel::UniformUnitCircle, 42, 0).sample_pairs(1_000_000).unwrap();
    assert!(draws.iter().all(|&(e, t)| (e * e + t * t - 1.0).abs() < 1e-14));
}

#[test]
fn split_requests_equal_one_request() {
    for model in models() {
        let stream = CoefficientStream::new(model, 31, 4);
        for k in [1usize, 7, 500] {
            let mut parts = stream.sample_range(0, k).unwrap();
            parts.extend(stream.sample_range(k as u64, k).unwrap());
            assert_eq!(parts, stream.sample_pairs(2 * k).unwrap(), "{} k={k}", model.kind_name());
        }
        assert_eq!(sample_pairs(&stream, 1000).unwrap(), stream.sample_pairs(1000).unwrap());
    }
}

#[test]
fn streams_do_not_depend_on_thread_schedule() {
    let model = CoefficientModel::GaussianComplexIsotropic;
    let serial: Vec<_> = (0..16u64).map(|r| CoefficientStream::new(model, 9, r).sample_pairs(256).unwrap()).collect();
    let parallel: Vec<_> = (0..16usize)
        .into_par_iter()
        .rev()
        .map(|r| CoefficientStream::new(model, 9, r as u64).sample_pairs(256).unwrap())
        .collect();
    let parallel: Vec<_> = parallel.into_iter().rev().collect();
    assert_eq!(serial, parallel);
    assert_ne!(serial[0], serial[1]);
}

fn valid_spec() -> impl Strategy<Value = CovarianceSpec> {
    (1e-3f64..10.0, 1e-3f64..10.0, -0.999f64..0.999, any::<bool>()).prop_map(|(a, b, corr, zero_b)| {
        let b = if zero_b { 0.0 } else { b };
        CovarianceSpec::new(a, b, corr * (a * b).sqrt()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn square_root_squares_back(spec in valid_spec()) {
        let m = covariance_sqrt(&spec);
        let target = spec.as_matrix();
        prop_assert_eq!(m[0][1], m[1][0]);
        let mut err = 0.0;
        let mut norm = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let v = m[i][0] * m[0][j] + m[i][1] * m[1][j];
                err += (v - target[i][j]).powi(2);
                norm += target[i][j].powi(2);
            }
        }
        prop_assert!(err.sqrt() <= 1e-14 * norm.sqrt(), "relative error {}", err.sqrt() / norm.sqrt());
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        prop_assert!(tr / 2.0 - disc >= -1e-14 * tr.abs().max(1.0));
    }
}
