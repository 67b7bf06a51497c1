//! Monte-Carlo estimates of the expected area of the Wiener sausage swept by
//! an obstacle carried along a Brownian loop (`γ(t)`) or a free Brownian path
//! (`β(t)`).
//!
//! The motion has generator `Δ`: each coordinate of a free increment over
//! time `s` has variance `2s` ([`DIFFUSION`]). Transition density
//! `p(t, x) = (4πt)^{-1} exp(-|x|²/4t)`.
//!
//! Replica `i` draws from a ChaCha stream keyed by `(seed, i)`, and replica
//! areas are reduced in index order, so results do not depend on how the
//! replicas are scheduled.

mod exit;
mod raster;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::shape::{ObstacleShape, Vec2};

pub use exit::{bridge_midpoint_check, exit_time_check, ExitTimeResult, MidpointCheck, DEFAULT_STEP_BUDGET};
pub use raster::{polyline_sausage_area, DEFAULT_MAX_CELLS};

/// Variance per coordinate per unit time.
pub const DIFFUSION: f64 = 2.0;

/// Random stream for replica `index` of a run seeded with `seed`.
pub fn replica_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal_pair(rng: &mut ChaCha8Rng) -> Vec2 {
    Vec2::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// A Brownian loop of duration `t` sampled on a uniform grid, pinned at the
/// origin at both ends.
#[derive(Debug, Clone, Serialize)]
pub struct BridgePath {
    pub t: f64,
    pub times: Vec<f64>,
    pub positions: Vec<Vec2>,
}

impl BridgePath {
    pub fn steps(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn max_excursion(&self) -> f64 {
        max_norm(&self.positions)
    }
}

fn max_norm(points: &[Vec2]) -> f64 {
    points.iter().map(|p| p.norm()).fold(0.0, f64::max)
}

fn check_grid(t: f64, m: usize) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("duration must be positive, got {t}")));
    }
    if m < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 steps, got {m}")));
    }
    Ok(())
}

/// Exact bridge law on `M` equal steps, by sequential conditioning on the
/// return to the origin at time `t`.
pub fn sample_bridge(t: f64, m: usize, rng: &mut ChaCha8Rng) -> Result<BridgePath> {
    check_grid(t, m)?;
    let h = t / m as f64;
    let mut positions = Vec::with_capacity(m + 1);
    let mut x = Vec2::ZERO;
    positions.push(x);
    for i in 0..m - 1 {
        let remaining = t - i as f64 * h;
        let shrink = (remaining - h) / remaining;
        let sd = (DIFFUSION * h * shrink).sqrt();
        x = x * shrink + normal_pair(rng) * sd;
        positions.push(x);
    }
    positions.push(Vec2::ZERO);
    let times = (0..=m).map(|i| if i == m { t } else { i as f64 * h }).collect();
    Ok(BridgePath { t, times, positions })
}

/// Free path from the origin with `M` independent increments.
pub fn sample_free_path(t: f64, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec2>> {
    check_grid(t, m)?;
    let sd = (DIFFUSION * t / m as f64).sqrt();
    let mut x = Vec2::ZERO;
    let mut out = Vec::with_capacity(m + 1);
    out.push(x);
    for _ in 0..m {
        x = x + normal_pair(rng) * sd;
        out.push(x);
    }
    Ok(out)
}

/// Area of `∪_s (ω(s) + K)` rasterised with pitch `h`.
pub fn sausage_area(path: &BridgePath, shape: &ObstacleShape, h: f64) -> Result<f64> {
    polyline_sausage_area(&path.positions, shape, h, DEFAULT_MAX_CELLS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// Brownian loop pinned at the origin: estimates `γ(t)`.
    Bridge,
    /// Free Brownian path from the origin: estimates `β(t)`.
    Free,
}

#[derive(Debug, Clone, Serialize)]
pub struct SausageParams {
    pub t: f64,
    pub steps: usize,
    pub h: f64,
    pub replicas: usize,
    pub seed: u64,
    pub max_cells: usize,
}

impl SausageParams {
    pub fn new(t: f64, steps: usize, h: f64, replicas: usize, seed: u64) -> Self {
        Self {
            t,
            steps,
            h,
            replicas,
            seed,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }

    /// Default step count `max(10⁴, 100 t)`.
    pub fn default_steps(t: f64) -> usize {
        (100.0 * t).ceil().max(1e4) as usize
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SausageEstimate {
    pub kind: PathKind,
    pub t: f64,
    pub shape: ObstacleShape,
    pub mean_area: f64,
    pub std_error: f64,
    pub replicas: usize,
    pub steps: usize,
    pub h: f64,
    pub seed: u64,
    /// Largest `|ω(s)|` seen over all replicas.
    pub max_excursion: f64,
    pub min_area: f64,
    pub max_area: f64,
}

/// Mean swept area over independent replicas.
pub fn estimate(kind: PathKind, shape: &ObstacleShape, p: &SausageParams) -> Result<SausageEstimate> {
    if p.replicas < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 replicas, got {}", p.replicas)));
    }
    check_grid(p.t, p.steps)?;
    let samples = (0..p.replicas as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_stream(p.seed, i);
            let points = match kind {
                PathKind::Bridge => sample_bridge(p.t, p.steps, &mut rng)?.positions,
                PathKind::Free => sample_free_path(p.t, p.steps, &mut rng)?,
            };
            let area = polyline_sausage_area(&points, shape, p.h, p.max_cells)?;
            Ok((area, max_norm(&points)))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let var = samples.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(SausageEstimate {
        kind,
        t: p.t,
        shape: shape.clone(),
        mean_area: mean,
        std_error: (var / n).sqrt(),
        replicas: p.replicas,
        steps: p.steps,
        h: p.h,
        seed: p.seed,
        max_excursion: samples.iter().map(|s| s.1).fold(0.0, f64::max),
        min_area: samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
        max_area: samples.iter().map(|s| s.0).fold(0.0, f64::max),
    })
}

/// Monte-Carlo `γ(t)`: expected area swept along a Brownian loop.
pub fn estimate_gamma(t: f64, shape: &ObstacleShape, m: usize, h: f64, replicas: usize, seed: u64) -> Result<SausageEstimate> {
    estimate(PathKind::Bridge, shape, &SausageParams::new(t, m, h, replicas, seed))
}

/// Monte-Carlo `β(t)`: expected area swept along a free Brownian path.
pub fn estimate_beta(t: f64, shape: &ObstacleShape, m: usize, h: f64, replicas: usize, seed: u64) -> Result<SausageEstimate> {
    estimate(PathKind::Free, shape, &SausageParams::new(t, m, h, replicas, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridge_is_pinned() {
        let mut rng = replica_stream(7, 0);
        let p = sample_bridge(3.0, 50, &mut rng).unwrap();
        assert_eq!(p.positions[0], Vec2::ZERO);
        assert_eq!(p.positions[50], Vec2::ZERO);
        assert_eq!(p.times[50], 3.0);
        assert!(p.times.windows(2).all(|w| w[0] < w[1]));
        assert!(sample_bridge(3.0, 1, &mut rng).is_err());
    }

    #[test]
    fn two_step_midpoint_variance_uses_shared_constant() {
        // with M = 2 the only random point has variance DIFFUSION·(t/2)(t/2)/t
        let t = 4.0;
        let n = 20_000;
        let mut s2 = 0.0;
        for i in 0..n {
            let p = sample_bridge(t, 2, &mut replica_stream(11, i)).unwrap();
            s2 += p.positions[1].x.powi(2);
        }
        let var = s2 / n as f64;
        let expected = DIFFUSION * (t / 2.0) * (t / 2.0) / t;
        assert!((var - expected).abs() < 4.0 * expected * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn free_path_variance() {
        let n = 20_000;
        let t = 3.0;
        let s2: f64 = (0..n)
            .map(|i| sample_free_path(t, 3, &mut replica_stream(5, i)).unwrap()[3].y.powi(2))
            .sum();
        let var = s2 / n as f64;
        assert!((var - DIFFUSION * t).abs() < 4.0 * DIFFUSION * t * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<u64> = (0..4).map(|i| rand::Rng::random::<u64>(&mut replica_stream(1, i))).collect();
        let b: Vec<u64> = (0..4).rev().map(|i| rand::Rng::random::<u64>(&mut replica_stream(1, i))).collect();
        assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn estimate_is_reproducible_and_bounded() {
        let k = ObstacleShape::disc(Vec2::ZERO, 1.0).unwrap();
        let e1 = estimate_gamma(1.0, &k, 200, 0.05, 16, 3).unwrap();
        let e2 = estimate_gamma(1.0, &k, 200, 0.05, 16, 3).unwrap();
        assert_eq!(serde_json::to_string(&e1).unwrap(), serde_json::to_string(&e2).unwrap());
        assert!(e1.std_error >= 0.0);
        assert!(e1.min_area >= k.area() * 0.98);
        let r = k.bounding_radius() + e1.max_excursion;
        assert!(e1.mean_area <= std::f64::consts::PI * r * r);
        assert!(estimate_gamma(1.0, &k, 200, 0.05, 1, 3).is_err());
    }

    #[test]
    fn short_loops_cover_little_more_than_k() {
        let k = ObstacleShape::square(1.0).unwrap();
        let e = estimate_gamma(1e-4, &k, 20, 0.02, 8, 9).unwrap();
        assert!((e.mean_area - 1.0).abs() < 0.06, "{}", e.mean_area);
    }
}
