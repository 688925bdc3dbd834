//! Real-zero counts of a Rademacher series against the real hyperbolic
//! power series on the matching interval.

use rdseries::coeff_models::CoefficientModel;
use rdseries::stats_harness::{real_zero_process_comparison, SamplingOptions};

fn main() -> rdseries::Result<()> {
    let out = real_zero_process_comparison(
        CoefficientModel::RademacherReal,
        1e-3,
        (0.2, 5.0),
        100,
        11,
        &SamplingOptions::default(),
    )?;
    print!("{}", out.to_csv());
    println!("{}", out.report.to_json());
    Ok(())
}
