//! Number of zeros inside the image of a disk: the Bernoulli-sum law and a
//! small simulation against it.

use rdseries::coeff_models::CoefficientModel;
use rdseries::stats_harness::{zero_count_experiment, zero_count_pmf, ZeroSearchOptions};

fn main() -> rdseries::Result<()> {
    let law = zero_count_pmf(0.5)?;
    println!("r = 0.5: mean {:.6} variance {:.6}", law.mean(), law.variance());
    let out = zero_count_experiment(
        CoefficientModel::GaussianComplexIsotropic,
        1e-3,
        0.5,
        100,
        7,
        &ZeroSearchOptions::default(),
    )?;
    let emp = out.empirical_pmf();
    for k in 0..law.pmf.len().min(5) {
        println!("P(N = {k}): limit {:.4}  empirical {:.4}", law.pmf[k], emp.get(k).copied().unwrap_or(0.0));
    }
    println!("TV distance {:.4}", out.report.tv_distance.unwrap_or(f64::NAN));
    Ok(())
}
