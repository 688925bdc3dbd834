//! Covariance kernels of the limit process and one Cholesky draw on a
//! small grid, side by side with the Brownian-integral sampler.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rdseries::coeff_models::CovarianceSpec;
use rdseries::limit_gaf::{kernel_hermitian, kernel_pseudo, CholeskySampler, IntegralSampler, KernelParams};

fn main() -> rdseries::Result<()> {
    let params = KernelParams::new(0.5, CovarianceSpec::new(1.0, 0.5, 0.3)?)?;
    let grid = [Complex64::new(1.0, 0.0), Complex64::new(0.7, 0.8), Complex64::new(1.5, -0.4)];
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i..] {
            println!(
                "K({a}, {b}): pseudo {:.5}  hermitian {:.5}",
                kernel_pseudo(&params, a, b)?,
                kernel_hermitian(&params, a, b)?
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chol = CholeskySampler::new(&params, &grid)?.sample(&mut rng);
    let integral = IntegralSampler::new(&params, &grid, None, None)?.sample(&mut rng);
    for (p, (a, b)) in grid.iter().zip(chol.values.iter().zip(&integral.values)) {
        println!("I({p}): cholesky {a:.4}  integral {b:.4}");
    }
    Ok(())
}
