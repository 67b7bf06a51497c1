//! Sampler calibration: `E_0[e^{-T_r}] = 1/I_0(r)` for the exit time `T_r`
//! of the disc of radius `r`, and the midpoint variance of the bridge.

use rayon::prelude::*;
use serde::Serialize;

use super::{normal_pair, replica_stream, sample_bridge, DIFFUSION};
use crate::error::{Error, Result};
use crate::shape::Vec2;
use crate::specfun::bessel_i0;

/// Default cap on the total number of time steps over all halvings.
pub const DEFAULT_STEP_BUDGET: u64 = 4_000_000_000;
/// Paths still inside after this time contribute `e^{-T} < 5e-18`; dropped.
const MAX_TIME: f64 = 40.0;
const MAX_HALVINGS: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct ExitTimeResult {
    pub r: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// `1/I_0(r)`.
    pub target: f64,
    /// Step size of the reported estimate.
    pub dt: f64,
    /// Estimates at `dt0, dt0/2, ...`.
    pub levels: Vec<(f64, f64, f64)>,
    /// The last halving moved the estimate by less than one standard error.
    pub converged: bool,
    pub steps: u64,
}

/// One replica: `(e^{-T}, steps)`. A step between two interior points is
/// treated as an exit with the Brownian-bridge crossing probability of the
/// nearest tangent line, `exp(-2 d0 d1 / (DIFFUSION dt))`.
fn exit_sample(r: f64, dt: f64, seed: u64, stream: u64) -> (f64, u64) {
    let mut rng = replica_stream(seed, stream);
    let sd = (DIFFUSION * dt).sqrt();
    let mut x = Vec2::ZERO;
    let mut time = 0.0;
    let mut steps = 0u64;
    loop {
        let next = x + normal_pair(&mut rng) * sd;
        steps += 1;
        let d0 = r - x.norm();
        let d1 = r - next.norm();
        if d1 <= 0.0 {
            let frac = d0 / (d0 - d1);
            return ((-(time + frac * dt)).exp(), steps);
        }
        let cross = (-2.0 * d0 * d1 / (DIFFUSION * dt)).exp();
        let u: f64 = rand::Rng::random(&mut rng);
        if u < cross {
            return ((-(time + 0.5 * dt)).exp(), steps);
        }
        time += dt;
        x = next;
        if time > MAX_TIME {
            return (0.0, steps);
        }
    }
}

fn exit_level(r: f64, replicas: usize, dt: f64, seed: u64, level: u64) -> (f64, f64, u64) {
    let samples: Vec<(f64, u64)> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| exit_sample(r, dt, seed, (level << 40) | i))
        .collect();
    let n = replicas as f64;
    let mean = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let var = samples.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt(), samples.iter().map(|s| s.1).sum())
}

/// Estimates `E_0[e^{-T_r}]`, halving `dt` until the estimate moves by less
/// than one combined standard error.
pub fn exit_time_check(r: f64, replicas: usize, dt: f64, seed: u64) -> Result<ExitTimeResult> {
    exit_time_check_with_budget(r, replicas, dt, seed, DEFAULT_STEP_BUDGET)
}

pub fn exit_time_check_with_budget(r: f64, replicas: usize, dt: f64, seed: u64, budget: u64) -> Result<ExitTimeResult> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    if replicas < 2 || !(dt > 0.0) {
        return Err(Error::InvalidInput("need replicas >= 2 and dt > 0".into()));
    }
    let mut levels = Vec::new();
    let mut steps = 0u64;
    let mut step = dt;
    let mut converged = false;
    for level in 0..MAX_HALVINGS as u64 {
        let (mean, se, used) = exit_level(r, replicas, step, seed, level);
        steps += used;
        if steps > budget {
            return Err(Error::StepBudget(budget));
        }
        levels.push((step, mean, se));
        if let [.., (_, m0, s0), (_, m1, s1)] = levels[..] {
            if (m1 - m0).abs() < (s0 * s0 + s1 * s1).sqrt() {
                converged = true;
                break;
            }
        }
        step *= 0.5;
    }
    let &(dt_final, estimate, std_error) = levels.last().expect("at least one level");
    Ok(ExitTimeResult {
        r,
        estimate,
        std_error,
        target: 1.0 / bessel_i0(r),
        dt: dt_final,
        levels,
        converged,
        steps,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MidpointCheck {
    pub t: f64,
    /// Sample variance of each coordinate of `ω(t/2)`.
    pub variance: [f64; 2],
    pub std_error: [f64; 2],
    /// `DIFFUSION · (t/2)(t/2)/t = t/2`.
    pub target: f64,
}

/// Variance of the bridge midpoint per coordinate over `replicas` loops.
pub fn bridge_midpoint_check(t: f64, replicas: usize, seed: u64) -> Result<MidpointCheck> {
    if replicas < 2 {
        return Err(Error::InvalidInput("need at least 2 replicas".into()));
    }
    let mids = (0..replicas as u64)
        .into_par_iter()
        .map(|i| Ok(sample_bridge(t, 2, &mut replica_stream(seed, i))?.positions[1]))
        .collect::<Result<Vec<Vec2>>>()?;
    let n = replicas as f64;
    let stats = |f: fn(&Vec2) -> f64| {
        let sq: Vec<f64> = mids.iter().map(|p| f(p).powi(2)).collect();
        let mean = sq.iter().sum::<f64>() / n;
        let var = sq.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    };
    let (vx, sx) = stats(|p| p.x);
    let (vy, sy) = stats(|p| p.y);
    Ok(MidpointCheck {
        t,
        variance: [vx, vy],
        std_error: [sx, sy],
        target: DIFFUSION * (t / 2.0) * (t / 2.0) / t,
    })
}
