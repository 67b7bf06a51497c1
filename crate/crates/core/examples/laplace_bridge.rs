//! From spectral shift to heat trace: the Laplace transform of the disc's
//! exact spectral shift against the three-term series for gamma(t), and the
//! log-moment expansion underneath it.
//!
//! cargo run --example laplace_bridge

use planar_ssf::coeffs::{gamma_coefficients, xi_coefficients};
use planar_ssf::scatter::{disc_ssf_exact, gamma_series_eval, gamma_via_laplace, laplace_log_moment};

fn main() -> planar_ssf::Result<()> {
    let series = gamma_coefficients(&xi_coefficients(0.0), 3)?;
    println!("{:>8} {:>16} {:>16} {:>8}", "t", "laplace", "series", "ratio");
    for t in [20.0, 1e2, 1e3, 1e4] {
        let exact = gamma_via_laplace(|l| disc_ssf_exact(l, 1.0), t)?;
        let approx = gamma_series_eval(&series, t)?;
        println!("{t:>8.0e} {exact:>16.6} {approx:>16.6} {:>8.5}", approx / exact);
    }

    println!("\nlog moments: numeric / series");
    for k in [-1, -2, -3] {
        let ratios: Vec<String> = [1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&t| laplace_log_moment(k, t, 0.5).map(|m| format!("{:.6}", m.ratio())))
            .collect::<Result<_, _>>()?;
        println!("  k = {k}: {}", ratios.join("  "));
    }
    Ok(())
}
