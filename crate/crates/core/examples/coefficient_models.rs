//! Draws coefficient pairs from every model and compares the empirical
//! 2x2 covariance with the implied one.

use rdseries::coeff_models::{implied_covariance, CoefficientModel, CoefficientStream};

fn main() -> rdseries::Result<()> {
    let models = [
        CoefficientModel::RademacherReal,
        CoefficientModel::gaussian_real(2.0)?,
        CoefficientModel::GaussianComplexIsotropic,
        CoefficientModel::UniformUnitCircle,
        CoefficientModel::two_point(1.0, 0.5, 0.3)?,
    ];
    let n = 200_000;
    println!("{:<14} {:>22} {:>22}", "model", "empirical (s1, s2, rho)", "implied (s1, s2, rho)");
    for model in models {
        let draws = CoefficientStream::new(model, 1, 0).sample_pairs(n)?;
        let m = n as f64;
        let see = draws.iter().map(|p| p.0 * p.0).sum::<f64>() / m;
        let stt = draws.iter().map(|p| p.1 * p.1).sum::<f64>() / m;
        let set = draws.iter().map(|p| p.0 * p.1).sum::<f64>() / m;
        let spec = implied_covariance(&model);
        println!(
            "{:<14} ({see:.3}, {stt:.3}, {set:+.3})   ({:.3}, {:.3}, {:+.3})",
            model.kind_name(),
            spec.sigma1_sq(),
            spec.sigma2_sq(),
            spec.rho()
        );
    }
    Ok(())
}
