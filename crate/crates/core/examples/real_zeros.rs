//! Sign-change scan for the real zeros of a real-coefficient series on a
//! window of the real axis.

use rdseries::coeff_models::{CoefficientModel, CoefficientStream};
use rdseries::stats_harness::SamplingOptions;
use rdseries::synthesis::PathSampler;
use rdseries::zero_finder::real_zeros;

fn main() -> rdseries::Result<()> {
    let (s, a, b) = (1e-3, 0.2, 5.0);
    let plan = SamplingOptions::default().plan(0.0, s, a, 1.0)?;
    let path =
        PathSampler::new(0.0, &plan)?.sample(&CoefficientStream::new(CoefficientModel::RademacherReal, 11, 0))?;
    let scaled = path.scaled(s);
    let zeros = real_zeros(&|x| scaled.eval_real(x), a, b, None, 1e-10)?;
    println!("{} real zeros of x -> D(0; 1/2 + {s} x) on ({a}, {b})", zeros.count());
    for x in &zeros.locations {
        println!("  {x:.10}");
    }
    Ok(())
}
