//! Robin constant and C(K) for a few obstacles, with an N-doubling study.
//!
//! cargo run --example capacity

use planar_ssf::potential::equilibrium_solve;
use planar_ssf::shape::{ObstacleShape, Vec2};

fn main() -> planar_ssf::Result<()> {
    let shapes = [
        ("unit disc", ObstacleShape::disc(Vec2::ZERO, 1.0)?),
        ("unit square", ObstacleShape::square(1.0)?),
        ("segment of length 4", ObstacleShape::segment(Vec2::new(-2.0, 0.0), Vec2::new(2.0, 0.0))?),
        (
            "two unit discs 3 apart",
            ObstacleShape::union(vec![
                ObstacleShape::disc(Vec2::new(-1.5, 0.0), 1.0)?,
                ObstacleShape::disc(Vec2::new(1.5, 0.0), 1.0)?,
            ])?,
        ),
    ];
    for (name, shape) in &shapes {
        println!("{name}");
        let mut previous: Option<f64> = None;
        for n in [64, 128, 256, 512, 1024] {
            let sol = equilibrium_solve(shape, n)?;
            let change = previous.map(|p| (sol.robin - p).abs());
            println!(
                "  N = {n:5}  R = {:+.12}  C = {:+.12}  min weight = {:.3e}  |R_N - R_N/2| = {}",
                sol.robin,
                sol.capacity_const,
                sol.min_weight,
                change.map_or("-".to_string(), |c| format!("{c:.3e}"))
            );
            previous = Some(sol.robin);
        }
    }
    Ok(())
}
