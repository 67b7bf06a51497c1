//! Expected area swept by the unit disc along Brownian loops and free paths,
//! against the exact heat-trace value from the disc's spectral shift.
//!
//! cargo run --release --example wiener_sausage [replicas]

use planar_ssf::scatter::{disc_ssf_exact, gamma_via_laplace};
use planar_ssf::sausage::{estimate_beta, estimate_gamma};
use planar_ssf::shape::{ObstacleShape, Vec2};

fn main() -> planar_ssf::Result<()> {
    let replicas: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let disc = ObstacleShape::disc(Vec2::ZERO, 1.0)?;
    let t = 20.0;
    let started = std::time::Instant::now();
    let gamma = estimate_gamma(t, &disc, 20_000, 0.02, replicas, 2024)?;
    let elapsed = started.elapsed();
    let exact = gamma_via_laplace(|l| disc_ssf_exact(l, 1.0), t)?;
    println!(
        "loop, t = {t}: {:.4} +- {:.4} (max excursion {:.2}); heat trace {exact:.4}; {replicas} replicas in {:.1?}",
        gamma.mean_area, gamma.std_error, gamma.max_excursion, elapsed
    );
    let beta = estimate_beta(t, &disc, 20_000, 0.02, replicas, 2024)?;
    println!("free path, t = {t}: {:.4} +- {:.4}", beta.mean_area, beta.std_error);

    let square = ObstacleShape::square(1.0)?;
    for t in [1.0, 5.0, 20.0] {
        let e = estimate_gamma(t, &square, 4_000, 0.02, replicas.min(100), 7)?;
        println!("unit square loop, t = {t}: {:.4} +- {:.4}", e.mean_area, e.std_error);
    }
    Ok(())
}
