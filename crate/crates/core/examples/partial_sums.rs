//! Partial sums of one Rademacher series, the scaled evaluation near the
//! abscissa and the truncation length the tail bound asks for.

use num_complex::Complex64;
use rdseries::coeff_models::{CoefficientModel, CoefficientStream};
use rdseries::series_eval::{
    choose_truncation, eval_partial, eval_shifted_alpha_derivative, scaled_eval, tail_std_bound, EvalRequest,
    SeriesSpec, DEFAULT_TRUNCATION_CAP,
};

fn main() -> rdseries::Result<()> {
    let (alpha, s, z) = (0.5, 0.5, Complex64::new(1.0, 0.5));
    let n = choose_truncation(alpha, s, z.re, 1e-2, 1.0, DEFAULT_TRUNCATION_CAP)?;
    println!(
        "N = {n} keeps the tail standard deviation below 1e-2 (bound {:.2e})",
        tail_std_bound(alpha, n, s, z.re, 1.0)
    );
    let coeffs = CoefficientStream::new(CoefficientModel::RademacherReal, 7, 0).sample_pairs(n as usize - 1)?;
    let spec = SeriesSpec::new(alpha, n as usize)?;
    let w = z * s + 0.5;
    println!("D(alpha; {w}) = {}", eval_partial(&coeffs, &spec, w)?);
    println!("scaled value   = {}", scaled_eval(&coeffs, &spec, &EvalRequest::new(z, s)?)?);
    println!("-d/dw          = {}", eval_shifted_alpha_derivative(&coeffs, &spec, w)?);
    for k in [6, 9, 12, 15] {
        let spec = SeriesSpec::new(alpha, 1 << k)?;
        println!("N = 2^{k:<2}  D = {:.6}", eval_partial(&coeffs[..(1 << k) - 1], &spec, w)?);
    }
    Ok(())
}
