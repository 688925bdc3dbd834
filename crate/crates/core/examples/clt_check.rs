//! Normalized real sums near the abscissa against N(0, 1), with the
//! mis-normalized control next to it.

use rdseries::coeff_models::CoefficientModel;
use rdseries::stats_harness::{clt_normality_check, Normalizer, SamplingOptions};

fn main() -> rdseries::Result<()> {
    let opts = SamplingOptions::default();
    for normalizer in [Normalizer::Exact, Normalizer::DropTwoPower] {
        let out = clt_normality_check(CoefficientModel::RademacherReal, 0.0, 2e-3, 2000, 42, &opts, normalizer)?;
        println!(
            "{normalizer:?}: KS {:.4}  p {:.3e}  {}",
            out.report.statistic,
            out.report.p_value.unwrap_or(f64::NAN),
            out.report.verdict.as_str()
        );
    }
    Ok(())
}
