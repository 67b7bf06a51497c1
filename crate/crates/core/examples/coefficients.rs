//! Low-energy coefficients from a capacity constant, the trace route that
//! reproduces them, and the sausage coefficients derived from them.
//!
//! cargo run --example coefficients -- [C]

use std::f64::consts::PI;

use planar_ssf::coeffs::{beta_coefficients, gamma_coefficients, theta_radius, xi_coefficients, xi_via_traces};

fn main() -> planar_ssf::Result<()> {
    let c: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let robin = -c / (4.0 * PI);

    let xi = xi_coefficients(c);
    let traced = xi_via_traces(robin)?;
    println!("C = {c}, R = {robin:.12}, theta radius = {:.6}", theta_radius(robin));
    println!("{:>6} {:>22} {:>22}", "order", "closed form", "via traces");
    for k in -3..=-1 {
        println!("{k:>6} {:>22.15} {:>22.15}", xi.get(k).unwrap(), traced.get(k).unwrap());
    }
    println!("\nxi    {xi}");
    println!("gamma {}", gamma_coefficients(&xi, 3)?);
    println!("beta  {}", beta_coefficients(c));

    let l = 20.0;
    println!("\nat -log(lambda) = {l}: truncations {:.8} {:.8} {:.8}", xi.truncated(1).eval(l), xi.truncated(2).eval(l), xi.eval(l));
    Ok(())
}
