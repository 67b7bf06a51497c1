//! Bessel and Hankel values, the small-argument Hankel remainder, and the
//! resolvent kernel coefficients.
//!
//! cargo run --example special_functions

use num_complex::Complex64;
use planar_ssf::specfun::{
    bessel_i0, bessel_j, bessel_y, gamma_derivs_at_one, hankel0_first, hankel_remainder_b, kernel_coefficients,
};

fn main() -> planar_ssf::Result<()> {
    println!("{:>6} {:>20} {:>20} {:>20}", "x", "J0", "Y0", "I0");
    for x in [0.1, 1.0, 5.0, 11.5, 12.5, 40.0] {
        println!("{x:>6} {:>20.15} {:>20.15} {:>20.12e}", bessel_j(0, x)?, bessel_y(0, x)?, bessel_i0(x));
    }

    println!("\nJ_n(10), Y_n(10)");
    for n in [0, 1, 5, 10, 20] {
        println!("  n = {n:2}  {:+.15e}  {:+.15e}", bessel_j(n, 10.0)?, bessel_y(n, 10.0)?);
    }

    // off the real axis the series and asymptotic branches must agree too
    let z = Complex64::new(3.0, 1.0);
    println!("\nH0(1)({z}) = {}", hankel0_first(z)?);

    println!("\n|b(z)| / (|z|^2 (-log|z|)) along the real axis");
    for x in [1e-4, 1e-2, 0.1, 0.5] {
        let b = hankel_remainder_b(Complex64::new(x, 0.0))?;
        println!("  |z| = {x:<6}  {:.4}", b.norm() / (x * x * -f64::ln(x)));
    }

    println!("\nkernel coefficients");
    for j in 0..4 {
        let k = kernel_coefficients(j);
        println!("  j = {j}  a = {:+.6e}  b = {:+.6e}  c = {:+.6e}", k.a, k.b, k.c);
    }
    println!("\nGamma^(r)(1), r = 0..4: {:?}", gamma_derivs_at_one(4)?);
    Ok(())
}
