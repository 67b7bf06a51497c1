//! Acceptance checks A1 to A9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Runs with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use planar_ssf::coeffs::{gamma_coefficients, xi_coefficients, xi_via_traces};
use planar_ssf::lattice::{count_exact, hyperplane_area, lattice_count, simplex_area};
use planar_ssf::potential::equilibrium_solve;
use planar_ssf::sausage::{bridge_midpoint_check, estimate_gamma, exit_time_check};
use planar_ssf::scatter::{
    disc_ssf_exact, gamma_series_eval, gamma_via_laplace, laplace_log_moment, remainder_order_probe,
};
use planar_ssf::shape::{ObstacleShape, Vec2};

const EULER: f64 = 0.577_215_664_901_532_9;
/// Frozen bounds on `|r_l| L^{l+1}` for the unit disc, `l = 1, 2, 3`.
const REMAINDER_BOUNDS: [f64; 3] = [0.5, 3.5, 4.0];

type Check = Result<String, String>;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn a1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g1 = -EULER;
    let g2 = EULER * EULER + PI * PI / 6.0;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let c: f64 = rng.random_range(-10.0..=10.0);
        let xi = xi_coefficients(c);
        let x1 = xi.get(-1).unwrap();
        let x2 = xi.get(-2).unwrap();
        let x3 = xi.get(-3).unwrap();
        let want3 = x2 * x2 - PI * PI / 3.0;
        if !close(x3, want3, 1e-12) {
            return Err(format!("xi_0^-3 = {x3} vs {want3} at C = {c}"));
        }
        let gamma = gamma_coefficients(&xi, 3).map_err(|e| e.to_string())?;
        let want = [4.0 * PI * x1, 4.0 * PI * (x1 * g1 + x2), 4.0 * PI * (x1 * g2 + 2.0 * x2 * g1 + x3)];
        for (i, w) in want.iter().enumerate() {
            let got = gamma.get(-(i as i32) - 1).unwrap();
            if !close(got, *w, 1e-12) {
                return Err(format!("gamma_0^{} = {got} vs {w} at C = {c}", -(i as i32) - 1));
            }
            worst = worst.max((got - w).abs() / w.abs().max(1.0));
        }
    }
    Ok(format!("100 draws, worst relative gap {worst:.1e}"))
}

fn a2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r: f64 = rng.random_range(-0.8..=0.8);
        let traced = xi_via_traces(r).map_err(|e| e.to_string())?;
        let direct = xi_coefficients(-4.0 * PI * r);
        for k in -3..=-1 {
            let (a, b) = (traced.get(k).unwrap(), direct.get(k).unwrap());
            if !close(a, b, 1e-12) {
                return Err(format!("order {k}: {a} vs {b} at R = {r}"));
            }
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    Ok(format!("100 draws, worst relative gap {worst:.1e}"))
}

fn a3() -> Check {
    let grid = [1e-6, 1e-8, 1e-10, 1e-12];
    let mut sups = Vec::new();
    let mut last = Vec::new();
    for l in 1..=3 {
        let rep = remainder_order_probe(1.0, l, &grid).map_err(|e| e.to_string())?;
        if rep.sup > REMAINDER_BOUNDS[l - 1] {
            return Err(format!("l = {l}: sup |r| L^{} = {} > {}", l + 1, rep.sup, REMAINDER_BOUNDS[l - 1]));
        }
        sups.push(rep.sup);
        let p = rep.points.iter().find(|p| p.lambda == 1e-12).expect("grid point");
        last.push(p.remainder.abs());
    }
    if !(last[2] < last[1] && last[1] < last[0]) {
        return Err(format!("residuals at 1e-12 not ordered: {last:?}"));
    }
    let lam = 1e-12;
    let big_l = -f64::ln(lam);
    let x2 = xi_coefficients(0.0).get(-2).unwrap().abs();
    let lxi = big_l * disc_ssf_exact(lam, 1.0).map_err(|e| e.to_string())?;
    if (lxi - 1.0).abs() > 2.0 * x2 / big_l {
        return Err(format!("L xi = {lxi} outside 1 ± {}", 2.0 * x2 / big_l));
    }
    Ok(format!(
        "sup = {:.3}/{:.3}/{:.3}, |r_l(1e-12)| = {:.2e}/{:.2e}/{:.2e}, L xi = {lxi:.5}",
        sups[0], sups[1], sups[2], last[0], last[1], last[2]
    ))
}

fn robin(shape: &ObstacleShape) -> Result<f64, String> {
    Ok(equilibrium_solve(shape, 512).map_err(|e| e.to_string())?.robin)
}

fn a4() -> Check {
    let log2 = 2f64.ln() / (2.0 * PI);
    let disc = ObstacleShape::disc(Vec2::ZERO, 2.0).map_err(|e| e.to_string())?;
    let r_disc = robin(&disc)?;
    if (r_disc + log2).abs() > 1e-4 {
        return Err(format!("disc radius 2: R = {r_disc}"));
    }
    let seg = ObstacleShape::segment(Vec2::new(-2.0, 0.0), Vec2::new(2.0, 0.0)).map_err(|e| e.to_string())?;
    let r_seg = robin(&seg)?;
    if r_seg.abs() > 1e-3 {
        return Err(format!("segment length 4: R = {r_seg}"));
    }
    let mut gaps = Vec::new();
    for (small, big) in [
        (ObstacleShape::disc(Vec2::ZERO, 1.0), ObstacleShape::disc(Vec2::ZERO, 2.0)),
        (ObstacleShape::square(1.0), ObstacleShape::square(2.0)),
    ] {
        let (small, big) = (small.map_err(|e| e.to_string())?, big.map_err(|e| e.to_string())?);
        let gap = (robin(&big)? - robin(&small)? + log2).abs();
        if gap > 2e-4 {
            return Err(format!("scaling gap {gap}"));
        }
        gaps.push(gap);
    }
    Ok(format!(
        "disc gap {:.1e}, segment R {r_seg:.1e}, scaling gaps {:.1e}/{:.1e}",
        (r_disc + log2).abs(),
        gaps[0],
        gaps[1]
    ))
}

fn a5() -> Check {
    let mut cases = 0;
    for n in 1..=6u32 {
        for k in -40..=-1i64 {
            // lattice_count itself compares enumeration with the closed form
            let c = lattice_count(n, k).map_err(|e| e.to_string())?;
            if c.ratio() < 1.0 - 1e-12 {
                return Err(format!("bound {} below count {} at n = {n}, k = {k}", c.bound, c.exact));
            }
            cases += 1;
        }
    }
    if count_exact(2, -1).map_err(|e| e.to_string())? != BigUint::from(4u32) {
        return Err("a(2, -1) != 4".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let n = rng.random_range(2..=10u32);
        let r: f64 = rng.random_range(-100.0..-1e-3);
        let h = hyperplane_area(n, r).map_err(|e| e.to_string())?;
        let s = simplex_area(n, -r + 1.5 * f64::from(n)).map_err(|e| e.to_string())?;
        if !close(h, s, 1e-12) {
            return Err(format!("h({n}, {r}) = {h} vs s = {s}"));
        }
    }
    Ok(format!("{cases} (n, k) pairs, 100 area draws"))
}

fn a6() -> Check {
    let exit = exit_time_check(1.0, 100_000, 1e-3, 6).map_err(|e| e.to_string())?;
    let bias = exit.estimate - exit.target;
    if bias.abs() > 3.0 * exit.std_error || bias.abs() > 0.005 {
        return Err(format!("E[e^-T] = {} ± {} vs {}", exit.estimate, exit.std_error, exit.target));
    }
    let t = 2.0;
    let mid = bridge_midpoint_check(t, 100_000, 6).map_err(|e| e.to_string())?;
    for c in 0..2 {
        if (mid.variance[c] - t / 2.0).abs() > 3.0 * mid.std_error[c] {
            return Err(format!("midpoint variance {} ± {} vs {}", mid.variance[c], mid.std_error[c], t / 2.0));
        }
    }
    Ok(format!(
        "E[e^-T] = {:.5} ± {:.5} (target {:.5}, dt {}), midpoint variance {:.4}/{:.4}",
        exit.estimate, exit.std_error, exit.target, exit.dt, mid.variance[0], mid.variance[1]
    ))
}

fn a7() -> Check {
    let t = 20.0;
    let disc = ObstacleShape::disc(Vec2::ZERO, 1.0).map_err(|e| e.to_string())?;
    let exact = gamma_via_laplace(|l| disc_ssf_exact(l, 1.0), t).map_err(|e| e.to_string())?;
    let mc = estimate_gamma(t, &disc, 20_000, 0.02, 2000, 7).map_err(|e| e.to_string())?;
    let gap = (mc.mean_area - exact).abs();
    let allowed = 3.0 * mc.std_error + 0.02 * exact;
    let detail = format!("MC {:.3} ± {:.3} vs heat trace {exact:.4} (gap {gap:.3}, allowed {allowed:.3})", mc.mean_area, mc.std_error);
    if gap <= allowed {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn a8() -> Check {
    let ts = [1e3, 1e4, 1e5, 1e6];
    let mut finals = Vec::new();
    for k in [-1, -2, -3] {
        let gaps = ts
            .iter()
            .map(|&t| laplace_log_moment(k, t, 0.5).map(|m| (m.ratio() - 1.0).abs()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        if !gaps.windows(2).all(|w| w[1] < w[0]) {
            return Err(format!("k = {k}: discrepancies not decreasing {gaps:?}"));
        }
        if gaps[3] > 0.01 {
            return Err(format!("k = {k}: ratio off by {} at t = 1e6", gaps[3]));
        }
        finals.push(gaps[3]);
    }
    Ok(format!("|ratio - 1| at 1e6: {:.1e}/{:.1e}/{:.1e}", finals[0], finals[1], finals[2]))
}

fn a9() -> Check {
    let series = gamma_coefficients(&xi_coefficients(0.0), 3).map_err(|e| e.to_string())?;
    let mut ratios = Vec::new();
    for t in [1e2, 1e3, 1e4] {
        let s = gamma_series_eval(&series, t).map_err(|e| e.to_string())?;
        let g = gamma_via_laplace(|l| disc_ssf_exact(l, 1.0), t).map_err(|e| e.to_string())?;
        ratios.push(s / g);
    }
    let detail = format!("series/heat trace at 1e2, 1e3, 1e4: {:.5}, {:.5}, {:.5}", ratios[0], ratios[1], ratios[2]);
    let in_band = (0.85..=1.15).contains(&ratios[1]);
    let trending = (ratios[2] - 1.0).abs() < (ratios[1] - 1.0).abs() && (ratios[1] - 1.0).abs() < (ratios[0] - 1.0).abs();
    if in_band && trending {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let checks: [(&str, fn() -> Check); 9] = [
        ("A1", a1),
        ("A2", a2),
        ("A3", a3),
        ("A4", a4),
        ("A5", a5),
        ("A6", a6),
        ("A7", a7),
        ("A8", a8),
        ("A9", a9),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("{name} PASS ({secs:.1} s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{name} FAIL ({secs:.1} s) {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
