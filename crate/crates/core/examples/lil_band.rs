//! Iterated-logarithm ratios of one path on a geometric grid of scales.

use rdseries::coeff_models::CoefficientModel;
use rdseries::stats_harness::{geometric_grid, lil_band_check, LilParams};

fn main() -> rdseries::Result<()> {
    let params = LilParams::new(0.0, 1.0, geometric_grid(1e-2, 1e-6, 20))?;
    let out = lil_band_check(CoefficientModel::RademacherReal, &params, 3, 1 << 18)?;
    for (s, r) in out.s_grid.iter().zip(&out.ratios) {
        println!("s = {s:.3e}  R = {r:+.4}");
    }
    println!("max {:.3}  min {:.3}  ({})", out.max_ratio(), out.min_ratio(), out.report.verdict.as_str());
    Ok(())
}
