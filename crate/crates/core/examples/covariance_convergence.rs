//! Scaled empirical covariances of the series approaching the limit
//! kernels as s decreases.

use num_complex::Complex64;
use rdseries::coeff_models::CoefficientModel;
use rdseries::stats_harness::{covariance_convergence, SamplingOptions};

fn main() -> rdseries::Result<()> {
    let model = CoefficientModel::two_point(1.0, 0.5, 0.3)?;
    let grid = [Complex64::new(1.0, 0.0), Complex64::new(0.7, 0.8), Complex64::new(1.5, -0.4)];
    let out = covariance_convergence(model, 0.0, &[0.3, 0.1, 0.01], &grid, 4000, 2024, &SamplingOptions::default())?;
    for (s, d) in &out.distances {
        println!("s = {s:<5} relative distance {d:.4}");
    }
    println!("{}", out.report.to_json());
    Ok(())
}
