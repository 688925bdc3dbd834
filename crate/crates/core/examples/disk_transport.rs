//! The hyperbolic power series on the unit disk, carried to the half-plane
//! by the Mobius map, against the half-plane kernel.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rdseries::limit_gaf::{
    eval_power_series, mobius, power_series_terms, s_alpha_covariance, sample_power_series_gaf, time_change_prefactor,
};

fn main() -> rdseries::Result<()> {
    let alpha = 0.0;
    let n = power_series_terms(alpha, 0.6, 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let coeffs = sample_power_series_gaf(alpha, true, &mut rng, n)?;
    println!("{n} terms reach 1e-14 at |z| = 0.6");
    for z in [Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.2), Complex64::new(-0.5, 0.1)] {
        let w = mobius(z)?;
        println!(
            "z = {z:.2}  phi(z) = {w:.4}  F(z) = {:.4}  prefactor {:.4}",
            eval_power_series(&coeffs, z),
            time_change_prefactor(alpha, z)
        );
    }
    for t in [0.0, 0.5, 1.0, 2.0] {
        println!(
            "stationary strip covariance at lag {t}: {:.6}",
            s_alpha_covariance(alpha, Complex64::new(t, 0.0), Complex64::new(0.0, 0.0))?.re
        );
    }
    Ok(())
}
