//! Partial-wave spectral shift of the Dirichlet disc against the three-term
//! low-energy series.
//!
//! cargo run --example disc_phase_shifts

use planar_ssf::coeffs::xi_coefficients_to;
use planar_ssf::scatter::{disc_ssf_exact, phase_shift_table, remainder_order_probe, ssf_series_eval};

fn main() -> planar_ssf::Result<()> {
    let table = phase_shift_table(2.0, 1.0)?;
    println!("phase shifts at k = 2, a = 1 (n_max = {})", table.n_max());
    for n in 0..=6 {
        println!("  delta_{n} = {:+.12}", table.entries[&n]);
    }

    println!("\n{:>8} {:>14} {:>12} {:>12} {:>12}", "lambda", "xi", "r1*L^2", "r2*L^3", "r3*L^4");
    let series: Vec<_> = (1..=3).map(|l| xi_coefficients_to(0.0, l)).collect::<Result<_, _>>()?;
    for e in (4..=14).step_by(2) {
        let lambda = 10f64.powi(-e);
        let l = -lambda.ln();
        let xi = disc_ssf_exact(lambda, 1.0)?;
        let mut scaled = Vec::new();
        for (i, s) in series.iter().enumerate() {
            let r = xi - ssf_series_eval(s, lambda)?;
            scaled.push(r * l.powi(i as i32 + 2));
        }
        println!(
            "{lambda:>8.0e} {xi:>14.10} {:>12.6} {:>12.6} {:>12.6}",
            scaled[0], scaled[1], scaled[2]
        );
    }

    let grid: Vec<f64> = (0..=20).map(|i| 10f64.powf(-6.0 - 0.3 * i as f64)).collect();
    for a in [1.0, 2.0 * (-planar_ssf::specfun::EULER_GAMMA).exp()] {
        for l in 1..=3 {
            let report = remainder_order_probe(a, l, &grid)?;
            println!(
                "a = {a:.6}, l = {l}: sup |r_l| L^(l+1) = {:.6} (upper half {:.6}, lower half {:.6}) {}",
                report.sup,
                report.sup_high,
                report.sup_low,
                if report.passes { "ok" } else { "growing" }
            );
        }
    }
    Ok(())
}
