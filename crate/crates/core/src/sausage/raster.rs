//! Area of the swept set `∪_s (ω(s) + K)` by counting grid cells whose
//! centres it covers.
//!
//! Between consecutive sample points the path is taken to be the straight
//! chord, so the swept set is a union of convex pieces: for a disc member a
//! capsule per chord, for a polygon the first translate `K + ω(0)` plus one
//! parallelogram `e ⊕ [ω_i, ω_{i+1}]` per edge `e` and chord. Each convex
//! piece meets a grid row in one interval, which is recorded in a per-row
//! difference array.

use crate::error::{Error, Result};
use crate::shape::{ObstacleShape, ShapeKind, Vec2};

/// Default cap on raster cells per replica.
pub const DEFAULT_MAX_CELLS: usize = 40_000_000;

struct Raster {
    origin: Vec2,
    h: f64,
    cols: usize,
    rows: usize,
    diff: Vec<i32>,
}

impl Raster {
    fn new(lo: Vec2, hi: Vec2, h: f64, max_cells: usize) -> Result<Self> {
        let cols = ((hi.x - lo.x) / h).ceil() as usize + 1;
        let rows = ((hi.y - lo.y) / h).ceil() as usize + 1;
        let cells = cols.saturating_mul(rows);
        if cells > max_cells {
            return Err(Error::ResourceLimit { cells, cap: max_cells });
        }
        Ok(Self {
            origin: lo,
            h,
            cols,
            rows,
            diff: vec![0; rows * (cols + 1)],
        })
    }

    fn row_y(&self, j: usize) -> f64 {
        self.origin.y + (j as f64 + 0.5) * self.h
    }

    /// Rows whose centre line lies in `[y0, y1]`.
    fn row_range(&self, y0: f64, y1: f64) -> std::ops::Range<usize> {
        let a = ((y0 - self.origin.y) / self.h - 0.5).ceil().max(0.0);
        let b = ((y1 - self.origin.y) / self.h - 0.5).floor() + 1.0;
        let b = b.min(self.rows as f64);
        if b <= a {
            0..0
        } else {
            a as usize..b as usize
        }
    }

    /// Marks the cells of row `j` whose centres lie in `[x0, x1]`.
    fn mark(&mut self, j: usize, x0: f64, x1: f64) {
        let a = ((x0 - self.origin.x) / self.h - 0.5).ceil().max(0.0);
        let b = ((x1 - self.origin.x) / self.h - 0.5).floor() + 1.0;
        let b = b.min(self.cols as f64);
        if b <= a {
            return;
        }
        let base = j * (self.cols + 1);
        self.diff[base + a as usize] += 1;
        self.diff[base + b as usize] -= 1;
    }

    fn covered_area(&self) -> f64 {
        let mut count = 0usize;
        for row in self.diff.chunks_exact(self.cols + 1) {
            let mut depth = 0i32;
            for d in &row[..self.cols] {
                depth += d;
                count += usize::from(depth > 0);
            }
        }
        count as f64 * self.h * self.h
    }
}

/// Interval of row `y` inside the convex polygon `pts` (any orientation).
fn convex_interval(pts: &[Vec2], y: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let n = pts.len();
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        let (ymin, ymax) = if p.y <= q.y { (p.y, q.y) } else { (q.y, p.y) };
        if y < ymin || y > ymax {
            continue;
        }
        if p.y == q.y {
            lo = lo.min(p.x.min(q.x));
            hi = hi.max(p.x.max(q.x));
        } else {
            let x = p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y);
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Non-horizontal edge stored as `x = x0 + (y - y0) slope` on `[y0, y1]`.
#[derive(Clone, Copy)]
struct Edge {
    y0: f64,
    y1: f64,
    x0: f64,
    slope: f64,
}

impl Edge {
    fn new(p: Vec2, q: Vec2) -> Option<Self> {
        let (p, q) = if p.y <= q.y { (p, q) } else { (q, p) };
        (q.y > p.y).then(|| Edge {
            y0: p.y,
            y1: q.y,
            x0: p.x,
            slope: (q.x - p.x) / (q.y - p.y),
        })
    }
}

fn mark_capsule(r: &mut Raster, p: Vec2, q: Vec2, a: f64) {
    let d = q - p;
    let len = d.norm();
    let mut edges = [None; 4];
    if len > 0.0 {
        let n = Vec2::new(-d.y, d.x) * (a / len);
        let c = [p + n, q + n, q - n, p - n];
        for i in 0..4 {
            edges[i] = Edge::new(c[i], c[(i + 1) % 4]);
        }
    }
    let a2 = a * a;
    for j in r.row_range(p.y.min(q.y) - a, p.y.max(q.y) + a) {
        let y = r.row_y(j);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in [p, q] {
            let w2 = a2 - (y - c.y) * (y - c.y);
            if w2 >= 0.0 {
                let w = w2.sqrt();
                lo = lo.min(c.x - w);
                hi = hi.max(c.x + w);
            }
        }
        for e in edges.iter().flatten() {
            if y >= e.y0 && y <= e.y1 {
                let x = e.x0 + (y - e.y0) * e.slope;
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        if lo <= hi {
            r.mark(j, lo, hi);
        }
    }
}

fn mark_convex(r: &mut Raster, pts: &[Vec2]) {
    let ymin = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let ymax = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    for j in r.row_range(ymin, ymax) {
        if let Some((x0, x1)) = convex_interval(pts, r.row_y(j)) {
            r.mark(j, x0, x1);
        }
    }
}

/// Simple polygon via even-odd row crossings.
fn mark_polygon(r: &mut Raster, pts: &[Vec2]) {
    let ymin = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let ymax = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let n = pts.len();
    let mut xs = Vec::new();
    for j in r.row_range(ymin, ymax) {
        let y = r.row_y(j);
        xs.clear();
        for i in 0..n {
            let (p, q) = (pts[i], pts[(i + 1) % n]);
            if (p.y > y) != (q.y > y) {
                xs.push(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            r.mark(j, pair[0], pair[1]);
        }
    }
}

fn member_edges(kind: &ShapeKind) -> Vec<(Vec2, Vec2)> {
    match kind {
        ShapeKind::Polygon { vertices } => {
            let n = vertices.len();
            (0..n).map(|i| (vertices[i], vertices[(i + 1) % n])).collect()
        }
        ShapeKind::Segment { endpoints } => vec![(endpoints[0], endpoints[1])],
        _ => Vec::new(),
    }
}

/// Area covered by `∪ (path + K)` with the path interpolated linearly
/// between its points, on a grid of pitch `h`.
pub fn polyline_sausage_area(points: &[Vec2], shape: &ObstacleShape, h: f64, max_cells: usize) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty path".into()));
    }
    if !(h > 0.0 && h <= shape.bounding_radius() / 5.0) {
        return Err(Error::InvalidInput(format!(
            "grid pitch {h} must lie in (0, bounding_radius/5 = {}]",
            shape.bounding_radius() / 5.0
        )));
    }
    let (klo, khi) = shape.bbox();
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = Vec2::new(h, h);
    let mut raster = Raster::new(lo + klo - pad, hi + khi + pad, h, max_cells)?;
    for member in shape.members() {
        match member {
            ShapeKind::Disc { center, radius } => {
                if points.len() == 1 {
                    mark_capsule(&mut raster, points[0] + *center, points[0] + *center, *radius);
                }
                for w in points.windows(2) {
                    mark_capsule(&mut raster, w[0] + *center, w[1] + *center, *radius);
                }
            }
            other => {
                if let ShapeKind::Polygon { vertices } = other {
                    let first: Vec<Vec2> = vertices.iter().map(|&v| v + points[0]).collect();
                    mark_polygon(&mut raster, &first);
                }
                for (a, b) in member_edges(other) {
                    for w in points.windows(2) {
                        if w[0] == w[1] {
                            continue;
                        }
                        mark_convex(&mut raster, &[a + w[0], b + w[0], b + w[1], a + w[1]]);
                    }
                }
            }
        }
    }
    Ok(raster.covered_area())
}
