//! Zeros of a polynomial with a double root, located by winding numbers
//! and quadtree subdivision.

use num_complex::Complex64;
use rdseries::zero_finder::{locate_zeros, winding_count, DomainTag, Region};

fn main() -> rdseries::Result<()> {
    let (a, b, c) = (Complex64::new(0.3, -0.2), Complex64::new(-0.5, 0.6), Complex64::new(0.1, 0.7));
    let f = |z: Complex64| (z - a).powu(2) * (z - b) * (z - c);
    let square = Region::rectangle(Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0), DomainTag::Plane)?;
    println!("winding number around the square: {}", winding_count(&f, &square, None)?);
    let zeros = locate_zeros(&f, &square, 1e-8, None)?;
    for (z, m) in &zeros.atoms {
        println!("zero {z:.10} multiplicity {m}");
    }
    Ok(())
}
