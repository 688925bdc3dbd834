//! Growth of the partial sums of one coefficient path, read as an
//! abscissa of convergence.

use rdseries::coeff_models::CoefficientModel;
use rdseries::stats_harness::sigma_c_report;

fn main() -> rdseries::Result<()> {
    for alpha in [0.0, 1.0] {
        for n_max in [10_000, 1_000_000] {
            let report = sigma_c_report(CoefficientModel::RademacherReal, alpha, n_max, 5)?;
            println!("alpha {alpha}  n_max {n_max:>8}  estimate {:.4}", report.statistic);
        }
    }
    Ok(())
}
