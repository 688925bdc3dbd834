//! z^(1+beta) times the log-weighted zeta sum, approaching Gamma(1+beta)
//! along the ray arg z = pi/4.

use rdseries::stats_harness::{zeta_limit_check, zeta_ray};

fn main() -> rdseries::Result<()> {
    for beta in [-0.4, 0.0, 0.5, 2.0] {
        for (z, err) in zeta_limit_check(beta, &zeta_ray(&[1e-2, 1e-3, 1e-4]))? {
            println!("beta {beta:<4} |z| {:.0e}  error {err:.3e}", z.norm());
        }
    }
    Ok(())
}
