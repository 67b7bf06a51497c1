//! Calibrating the random walk: the Laplace transform of the exit time from a
//! disc, E[exp(-T_r)] = 1/I0(r), and the variance of the loop midpoint.
//!
//! cargo run --release --example exit_time

use planar_ssf::sausage::{bridge_midpoint_check, exit_time_check};

fn main() -> planar_ssf::Result<()> {
    for r in [0.5, 1.0, 2.0] {
        let res = exit_time_check(r, 20_000, 2e-3, 99)?;
        println!("r = {r}: target {:.6}", res.target);
        for (dt, m, se) in &res.levels {
            println!("  dt = {dt:.2e}: {m:.6} +- {se:.6}");
        }
        println!("  converged: {}, steps: {}", res.converged, res.steps);
    }
    let mid = bridge_midpoint_check(8.0, 100_000, 1)?;
    println!(
        "loop of duration 8: midpoint variance {:.4} / {:.4} (target {})",
        mid.variance[0], mid.variance[1], mid.target
    );
    Ok(())
}
