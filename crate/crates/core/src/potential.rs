//! Equilibrium measure and Robin constant of a compact planar set.
//!
//! The boundary is cut into panels carrying constant density. Row `i` of the
//! dense system states that the potential of the panel masses, evaluated at
//! the midpoint of panel `i`, equals the Robin constant `R`; a final row fixes
//! the total mass to one. Matrix entries are exact panel means of the kernel
//! `(1/2π) log(1/|x|)`: closed form for straight panels, adaptive
//! Gauss-Legendre with the logarithm split off analytically for arcs.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::shape::{ObstacleShape, ShapeKind, Vec2};

pub const MIN_PANELS: usize = 16;
pub const DEFAULT_PANELS: usize = 512;
/// Weights below this flag the mesh as too coarse.
pub const COARSE_WEIGHT: f64 = -1e-6;
const GRADING_EXPONENT: i32 = 3;

// 16-point Gauss-Legendre on [-1, 1], positive half.
const GL_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];
const GL_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_081,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

fn gauss_legendre(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL_X.iter().zip(GL_W) {
        s += w * (f(c - h * x) + f(c + h * x));
    }
    s * h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Panel {
    Line { start: Vec2, end: Vec2 },
    Arc { center: Vec2, radius: f64, from: f64, to: f64 },
}

impl Panel {
    pub fn length(&self) -> f64 {
        match *self {
            Panel::Line { start, end } => (end - start).norm(),
            Panel::Arc { radius, from, to, .. } => radius * (to - from),
        }
    }

    pub fn midpoint(&self) -> Vec2 {
        match *self {
            Panel::Line { start, end } => (start + end) * 0.5,
            Panel::Arc { .. } => self.point_at(0.5),
        }
    }

    pub fn start(&self) -> Vec2 {
        match *self {
            Panel::Line { start, .. } => start,
            Panel::Arc { .. } => self.point_at(0.0),
        }
    }

    /// Point at fraction `s` of the arclength.
    pub fn point_at(&self, s: f64) -> Vec2 {
        match *self {
            Panel::Line { start, end } => start + (end - start) * s,
            Panel::Arc { center, radius, from, to } => {
                let phi = from + s * (to - from);
                center + Vec2::new(phi.cos(), phi.sin()) * radius
            }
        }
    }

    /// `∫ log|x - y| ds(y)` over the panel.
    pub fn log_integral(&self, x: Vec2) -> f64 {
        match *self {
            Panel::Line { start, end } => line_log_integral(start, end, x),
            Panel::Arc { center, radius, from, to } => arc_log_integral(center, radius, from, to, x),
        }
    }

    /// Mean of the kernel `(1/2π) log(1/|x - y|)` over the panel.
    pub fn mean_kernel(&self, x: Vec2) -> f64 {
        -self.log_integral(x) / (2.0 * PI * self.length())
    }
}

fn line_log_integral(a: Vec2, b: Vec2, x: Vec2) -> f64 {
    let len = (b - a).norm();
    let t = (b - a) * (1.0 / len);
    let dist = point_distance_to_line_segment(x, a, b);
    if dist > 4.0 * len {
        let mut s = 0.0;
        let c = (a + b) * 0.5;
        for (g, w) in GL_X.iter().zip(GL_W) {
            s += w * ((x - (c + t * (0.5 * len * g))).norm().ln() + (x - (c - t * (0.5 * len * g))).norm().ln());
        }
        return 0.5 * len * s;
    }
    let u1 = (a - x).dot(t);
    let u2 = (b - x).dot(t);
    let d = (x - a).cross(t).abs();
    let prim = |u: f64| -> f64 {
        if d == 0.0 {
            if u == 0.0 {
                0.0
            } else {
                u * u.abs().ln() - u
            }
        } else {
            0.5 * u * (u * u + d * d).ln() - u + d * (u / d).atan()
        }
    };
    prim(u2) - prim(u1)
}

fn point_distance_to_line_segment(x: Vec2, a: Vec2, b: Vec2) -> f64 {
    crate::shape::point_segment_distance(x, a, b)
}

fn arc_log_integral(c: Vec2, rho: f64, from: f64, to: f64, x: Vec2) -> f64 {
    let rel = x - c;
    let r = rel.norm();
    if (r - rho).abs() <= 1e-13 * rho {
        // x on the circle: split at its angle if it falls inside the arc
        let mut psi = rel.y.atan2(rel.x);
        while psi < from {
            psi += 2.0 * PI;
        }
        while psi > from + 2.0 * PI {
            psi -= 2.0 * PI;
        }
        if psi <= to {
            return on_circle_piece(rho, psi - from) + on_circle_piece(rho, to - psi);
        }
    }
    arc_adaptive(c, rho, from, to, x, 0)
}

/// `∫_0^h log(2ρ sin(s/2)) ρ ds`, the log distance from a point on a circle
/// along an arc of angle `h` starting at that point.
fn on_circle_piece(rho: f64, h: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    let singular = h * (rho * h).ln() - h;
    let smooth = gauss_legendre(0.0, h, |s| {
        let half = 0.5 * s;
        if half == 0.0 {
            0.0
        } else {
            (half.sin() / half).ln()
        }
    });
    rho * (singular + smooth)
}

fn arc_adaptive(c: Vec2, rho: f64, from: f64, to: f64, x: Vec2, depth: u32) -> f64 {
    let mid = 0.5 * (from + to);
    let pm = c + Vec2::new(mid.cos(), mid.sin()) * rho;
    let len = rho * (to - from);
    if len < 0.5 * (x - pm).norm() || depth >= 48 {
        return rho * gauss_legendre(from, to, |phi| (x - c - Vec2::new(phi.cos(), phi.sin()) * rho).norm().ln());
    }
    arc_adaptive(c, rho, from, mid, x, depth + 1) + arc_adaptive(c, rho, mid, to, x, depth + 1)
}

fn graded(u: f64) -> f64 {
    if u <= 0.5 {
        (2.0 * u).powi(GRADING_EXPONENT) / 2.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powi(GRADING_EXPONENT) / 2.0
    }
}

/// Splits `total` into parts proportional to `sizes`, each at least `floor`.
fn apportion(total: usize, sizes: &[f64], floor: usize) -> Vec<usize> {
    let sum: f64 = sizes.iter().sum();
    let spare = total.saturating_sub(floor * sizes.len()) as f64;
    let exact: Vec<f64> = sizes.iter().map(|s| spare * s / sum).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| floor + e.floor() as usize).collect();
    let mut assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&i, &j| (exact[j] - exact[j].floor()).total_cmp(&(exact[i] - exact[i].floor())).then(i.cmp(&j)));
    for &i in order.iter().cycle() {
        if assigned >= total {
            break;
        }
        counts[i] += 1;
        assigned += 1;
    }
    counts
}

fn member_size(kind: &ShapeKind) -> f64 {
    match kind {
        ShapeKind::Disc { radius, .. } => 2.0 * PI * radius,
        ShapeKind::Polygon { vertices } => {
            let n = vertices.len();
            (0..n).map(|i| (vertices[(i + 1) % n] - vertices[i]).norm()).sum()
        }
        ShapeKind::Segment { endpoints } => (endpoints[1] - endpoints[0]).norm(),
        ShapeKind::Union { .. } => unreachable!("flattened"),
    }
}

fn discretize_member(kind: &ShapeKind, n: usize, out: &mut Vec<Panel>) {
    match kind {
        ShapeKind::Disc { center, radius } => {
            let step = 2.0 * PI / n as f64;
            for j in 0..n {
                out.push(Panel::Arc {
                    center: *center,
                    radius: *radius,
                    from: j as f64 * step,
                    to: (j + 1) as f64 * step,
                });
            }
        }
        ShapeKind::Polygon { vertices } => {
            let m = vertices.len();
            let lengths: Vec<f64> = (0..m).map(|i| (vertices[(i + 1) % m] - vertices[i]).norm()).collect();
            let counts = apportion(n, &lengths, 2);
            for i in 0..m {
                let (a, b) = (vertices[i], vertices[(i + 1) % m]);
                let k = counts[i];
                for j in 0..k {
                    let s0 = graded(j as f64 / k as f64);
                    let s1 = graded((j + 1) as f64 / k as f64);
                    out.push(Panel::Line {
                        start: a + (b - a) * s0,
                        end: a + (b - a) * s1,
                    });
                }
            }
        }
        ShapeKind::Segment { endpoints } => {
            let [a, b] = *endpoints;
            let c = (a + b) * 0.5;
            let half = (b - a) * 0.5;
            // x_j = c + (L/2) cos(jπ/n) along the segment, from b towards a
            let node = |j: usize| c + half * (j as f64 * PI / n as f64).cos();
            for j in 0..n {
                out.push(Panel::Line {
                    start: node(j),
                    end: node(j + 1),
                });
            }
        }
        ShapeKind::Union { .. } => unreachable!("flattened"),
    }
}

/// Cuts the boundary of `shape` into `n` panels.
pub fn discretize(shape: &ObstacleShape, n: usize) -> Result<Vec<Panel>> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 panels, got {n}")));
    }
    let members = shape.members();
    let floor = match members.len() {
        1 => n,
        _ => 4,
    };
    let sizes: Vec<f64> = members.iter().map(member_size).collect();
    let counts = if members.len() == 1 { vec![n] } else { apportion(n, &sizes, floor) };
    let mut panels = Vec::with_capacity(n);
    for (m, k) in members.iter().zip(counts) {
        let min_sides = match m {
            ShapeKind::Polygon { vertices } => 2 * vertices.len(),
            _ => 1,
        };
        discretize_member(m, k.max(min_sides), &mut panels);
    }
    if panels.iter().any(|p| !(p.length() > 0.0)) {
        return Err(Error::DegenerateGeometry("zero-length panel".into()));
    }
    Ok(panels)
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSolution {
    pub nodes: Vec<Vec2>,
    pub weights: Vec<f64>,
    /// Robin constant `R(K)`.
    pub robin: f64,
    /// `C(K) = -4π R(K)`.
    pub capacity_const: f64,
    pub min_weight: f64,
    /// Set when some weight falls below [`COARSE_WEIGHT`].
    pub coarse_mesh: bool,
    #[serde(skip)]
    pub panels: Vec<Panel>,
}

impl EquilibriumSolution {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "R": self.robin,
            "C": self.capacity_const,
            "N": self.len(),
            "min_weight": self.min_weight,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("node_x,node_y,weight\n");
        for (p, w) in self.nodes.iter().zip(&self.weights) {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p.x, p.y, w));
        }
        s
    }
}

/// Solves for the equilibrium measure with `n` boundary panels.
pub fn equilibrium_solve(shape: &ObstacleShape, n: usize) -> Result<EquilibriumSolution> {
    if n < MIN_PANELS {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_PANELS} panels, got {n}"
        )));
    }
    let panels = discretize(shape, n)?;
    let m = panels.len();
    let nodes: Vec<Vec2> = panels.iter().map(Panel::midpoint).collect();
    let rows: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|&x| panels.iter().map(|p| p.mean_kernel(x)).collect())
        .collect();
    let system = DMatrix::from_fn(m + 1, m + 1, |i, j| match (i < m, j < m) {
        (true, true) => rows[i][j],
        (true, false) => -1.0,
        (false, true) => 1.0,
        (false, false) => 0.0,
    });
    let mut rhs = DVector::zeros(m + 1);
    rhs[m] = 1.0;
    let sol = system.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let weights: Vec<f64> = sol.iter().take(m).copied().collect();
    let robin = sol[m];
    let min_weight = weights.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EquilibriumSolution {
        nodes,
        weights,
        robin,
        capacity_const: -4.0 * PI * robin,
        min_weight,
        coarse_mesh: min_weight < COARSE_WEIGHT,
        panels,
    })
}

/// `C(K) = -4π R(K)` with the default panel count.
pub fn capacity_const(shape: &ObstacleShape) -> Result<f64> {
    Ok(equilibrium_solve(shape, DEFAULT_PANELS)?.capacity_const)
}

/// Potential of the node masses, `Σ w_j (1/2π) log(1/|x - node_j|)`.
pub fn potential_eval(sol: &EquilibriumSolution, x: Vec2) -> Result<f64> {
    let mut s = 0.0;
    for (j, (p, w)) in sol.nodes.iter().zip(&sol.weights).enumerate() {
        let r = (x - *p).norm();
        if r == 0.0 {
            return Err(Error::NodeCollision(j));
        }
        s -= w * r.ln();
    }
    Ok(s / (2.0 * PI))
}

/// Potential of the piecewise-constant panel density; finite everywhere,
/// including on the boundary.
pub fn potential_eval_panels(sol: &EquilibriumSolution, x: Vec2) -> f64 {
    sol.panels
        .iter()
        .zip(&sol.weights)
        .map(|(p, w)| w * p.mean_kernel(x))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_disc() -> ObstacleShape {
        ObstacleShape::disc(Vec2::ZERO, 1.0).unwrap()
    }

    #[test]
    fn straight_self_mean_matches_closed_form() {
        let p = Panel::Line {
            start: Vec2::new(0.0, 0.0),
            end: Vec2::new(0.3, 0.4),
        };
        let l = 0.5;
        let expected = ((2.0 / l as f64).ln() + 1.0) / (2.0 * PI);
        assert!((p.mean_kernel(p.midpoint()) - expected).abs() < 1e-15);
    }

    #[test]
    fn line_integral_against_quadrature() {
        let (a, b) = (Vec2::new(-0.2, 0.1), Vec2::new(0.7, -0.3));
        for x in [Vec2::new(0.1, 0.05), Vec2::new(3.0, 2.0), Vec2::new(0.0, -1.0)] {
            let reference = crate::quad::integrate(
                |s| Ok((x - (a + (b - a) * s)).norm().ln()),
                0.0,
                1.0,
                1e-14,
                1e-14,
            )
            .unwrap()
                * (b - a).norm();
            assert!((line_log_integral(a, b, x) - reference).abs() < 1e-12);
        }
    }

    #[test]
    fn arc_integral_against_quadrature() {
        let (c, rho, from, to) = (Vec2::new(0.5, -0.5), 2.0, 0.3, 0.9);
        let on = c + Vec2::new(0.5f64.cos(), 0.5f64.sin()) * rho;
        for x in [on, Vec2::new(0.0, 0.0), c + Vec2::new(0.6f64.cos(), 0.6f64.sin()) * (rho + 1e-3)] {
            let f = |phi: f64| Ok((x - c - Vec2::new(phi.cos(), phi.sin()) * rho).norm().ln());
            let reference = if x == on {
                crate::quad::integrate(f, from, 0.5, 1e-14, 1e-14).unwrap()
                    + crate::quad::integrate(f, 0.5, to, 1e-14, 1e-14).unwrap()
            } else {
                crate::quad::integrate(f, from, to, 1e-14, 1e-14).unwrap()
            };
            let got = arc_log_integral(c, rho, from, to, x);
            assert!((got - rho * reference).abs() < 1e-11, "{got} vs {}", rho * reference);
        }
    }

    #[test]
    fn discretization_examples() {
        let arcs = discretize(&unit_disc(), 4).unwrap();
        assert_eq!(arcs.len(), 4);
        for p in &arcs {
            assert!((p.length() - PI / 2.0).abs() < 1e-15);
        }
        let seg = ObstacleShape::segment(Vec2::new(-2.0, 0.0), Vec2::new(2.0, 0.0)).unwrap();
        let panels = discretize(&seg, 8).unwrap();
        for (j, p) in panels.iter().enumerate() {
            assert!((p.start().x - 2.0 * (j as f64 * PI / 8.0).cos()).abs() < 1e-15);
        }
        let sq = ObstacleShape::square(1.0).unwrap();
        let panels = discretize(&sq, 64).unwrap();
        assert_eq!(panels.len(), 64);
        let side: Vec<f64> = panels[..16].iter().map(Panel::length).collect();
        let shortest = side.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(side[0], shortest);
        assert_eq!(side[15], shortest);
        assert!(side[7] > 10.0 * shortest);
    }

    #[test]
    fn unit_disc_robin_constant() {
        let sol = equilibrium_solve(&unit_disc(), 256).unwrap();
        assert!(sol.robin.abs() < 1e-6, "R = {}", sol.robin);
        let total: f64 = sol.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for w in &sol.weights {
            assert!((w - 1.0 / 256.0).abs() < 1e-12);
        }
        assert_eq!(sol.capacity_const, -4.0 * PI * sol.robin);
        assert!(potential_eval(&sol, Vec2::ZERO).unwrap().abs() < 1e-12);
        let far = potential_eval(&sol, Vec2::new(1e6, 0.0)).unwrap();
        let expected = -(1e6f64).ln() / (2.0 * PI);
        assert!(((far - expected) / expected).abs() < 1e-6);
        assert!(matches!(potential_eval(&sol, sol.nodes[3]), Err(Error::NodeCollision(3))));
        let on = potential_eval_panels(&sol, sol.nodes[10]);
        assert!((on - sol.robin).abs() < 1e-12);
    }

    #[test]
    fn disc_radius_law() {
        for a in [0.25, 3.0] {
            let shape = ObstacleShape::disc(Vec2::new(1.0, 2.0), a).unwrap();
            let sol = equilibrium_solve(&shape, 64).unwrap();
            assert!((sol.robin + a.ln() / (2.0 * PI)).abs() < 1e-9);
            assert!((sol.capacity_const - 2.0 * a.ln()).abs() < 1e-8);
        }
    }

    #[test]
    fn segment_capacity() {
        let seg = ObstacleShape::segment(Vec2::new(-2.0, 0.0), Vec2::new(2.0, 0.0)).unwrap();
        let sol = equilibrium_solve(&seg, 512).unwrap();
        assert!(sol.robin.abs() < 1e-3, "R = {}", sol.robin);
        assert!(!sol.coarse_mesh);
    }

    #[test]
    fn square_capacity() {
        // cap(square of side s) = Γ(1/4)^2 / (4 π^{3/2}) s
        let gamma_quarter: f64 = 3.625_609_908_221_908_3;
        let cap = gamma_quarter * gamma_quarter / (4.0 * PI.powf(1.5));
        let sol = equilibrium_solve(&ObstacleShape::square(1.0).unwrap(), 512).unwrap();
        let expected = -cap.ln() / (2.0 * PI);
        assert!((sol.robin - expected).abs() < 1e-4, "R = {} vs {expected}", sol.robin);
        assert!(sol.min_weight > -1e-10);
    }

    #[test]
    fn rejects_small_n() {
        assert!(matches!(equilibrium_solve(&unit_disc(), 8), Err(Error::InvalidInput(_))));
    }
}
