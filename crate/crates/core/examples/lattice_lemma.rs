//! Lattice points in a slab of the hyperplane sum(x) = k, counted exactly and
//! compared with the surface-area bound.
//!
//! cargo run --example lattice_lemma

use planar_ssf::lattice::{hyperplane_area, lattice_count, simplex_area};

fn main() -> planar_ssf::Result<()> {
    println!("{:>2} {:>4} {:>14} {:>16} {:>8}", "n", "k", "exact", "bound", "ratio");
    for n in 1..=6 {
        for k in [-1, -5, -20, -40] {
            let c = lattice_count(n, k)?;
            println!("{n:>2} {k:>4} {:>14} {:>16.3} {:>8.4}", c.exact, c.bound, c.ratio());
        }
    }
    let (n, r) = (4, -2.5);
    println!(
        "\nh({n}, {r}) = {:.6}, s({n}, {}) = {:.6}",
        hyperplane_area(n, r)?,
        -r + 1.5 * n as f64,
        simplex_area(n, -r + 1.5 * n as f64)?
    );
    Ok(())
}
