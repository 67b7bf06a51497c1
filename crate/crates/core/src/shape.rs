//! Compact planar obstacles and their JSON form.
//!
//! ```json
//! {"kind":"disc","center":[0,0],"radius":1}
//! {"kind":"polygon","vertices":[[0,0],[1,0],[1,1],[0,1]]}
//! {"kind":"segment","endpoints":[[-2,0],[2,0]]}
//! {"kind":"union","members":[ ... ]}
//! ```
//!
//! Point obstacles have no representation, so every valid shape is nonpolar.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(v: [f64; 2]) -> Self {
        Vec2::new(v[0], v[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    let s = if len2 > 0.0 {
        ((p - a).dot(d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + d * s)).norm()
}

fn segments_touch(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    point_segment_distance(c, a, b) == 0.0
        || point_segment_distance(d, a, b) == 0.0
        || point_segment_distance(a, c, d) == 0.0
        || point_segment_distance(b, c, d) == 0.0
}

fn segment_distance(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    if segments_touch(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Even-odd point-in-polygon test.
pub fn polygon_contains(vertices: &[Vec2], p: Vec2) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (vi, vj) = (vertices[i], vertices[j]);
        if (vi.y > p.y) != (vj.y > p.y) {
            let x = vj.x + (p.y - vj.y) * (vi.x - vj.x) / (vi.y - vj.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn signed_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
        / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeKind {
    Disc { center: Vec2, radius: f64 },
    Polygon { vertices: Vec<Vec2> },
    Segment { endpoints: [Vec2; 2] },
    Union { members: Vec<ShapeKind> },
}

/// A validated compact obstacle. Polygons are stored counter-clockwise and
/// union members are flattened and pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeKind", into = "ShapeKind")]
pub struct ObstacleShape {
    kind: ShapeKind,
    bounding_radius: f64,
}

impl TryFrom<ShapeKind> for ObstacleShape {
    type Error = Error;
    fn try_from(kind: ShapeKind) -> Result<Self> {
        ObstacleShape::new(kind)
    }
}

impl From<ObstacleShape> for ShapeKind {
    fn from(s: ObstacleShape) -> Self {
        s.kind
    }
}

fn validate_primitive(kind: ShapeKind) -> Result<ShapeKind> {
    match kind {
        ShapeKind::Disc { center, radius } => {
            if !center.is_finite() || !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::DegenerateGeometry(format!(
                    "disc needs a finite centre and positive radius, got {radius}"
                )));
            }
            Ok(ShapeKind::Disc { center, radius })
        }
        ShapeKind::Segment { endpoints } => {
            let [a, b] = endpoints;
            if !a.is_finite() || !b.is_finite() || (b - a).norm() == 0.0 {
                return Err(Error::DegenerateGeometry("segment endpoints coincide".into()));
            }
            Ok(ShapeKind::Segment { endpoints })
        }
        ShapeKind::Polygon { mut vertices } => {
            let n = vertices.len();
            if n < 3 {
                return Err(Error::DegenerateGeometry(format!("polygon with {n} vertices")));
            }
            if vertices.iter().any(|v| !v.is_finite()) {
                return Err(Error::DegenerateGeometry("non-finite polygon vertex".into()));
            }
            for i in 0..n {
                if (vertices[(i + 1) % n] - vertices[i]).norm() == 0.0 {
                    return Err(Error::DegenerateGeometry(format!("zero-length edge at vertex {i}")));
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                    if adjacent {
                        continue;
                    }
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                    if segments_touch(a, b, c, d) {
                        return Err(Error::DegenerateGeometry(format!(
                            "edges {i} and {j} intersect"
                        )));
                    }
                }
            }
            let area = signed_area(&vertices);
            if area == 0.0 {
                return Err(Error::DegenerateGeometry("polygon has zero area".into()));
            }
            if area < 0.0 {
                vertices.reverse();
            }
            Ok(ShapeKind::Polygon { vertices })
        }
        ShapeKind::Union { .. } => unreachable!("unions are flattened first"),
    }
}

fn flatten(kind: ShapeKind, out: &mut Vec<ShapeKind>) {
    match kind {
        ShapeKind::Union { members } => members.into_iter().for_each(|m| flatten(m, out)),
        other => out.push(other),
    }
}

fn edges(kind: &ShapeKind) -> Vec<(Vec2, Vec2)> {
    match kind {
        ShapeKind::Polygon { vertices } => {
            let n = vertices.len();
            (0..n).map(|i| (vertices[i], vertices[(i + 1) % n])).collect()
        }
        ShapeKind::Segment { endpoints } => vec![(endpoints[0], endpoints[1])],
        _ => Vec::new(),
    }
}

fn primitive_contains(kind: &ShapeKind, p: Vec2) -> bool {
    match kind {
        ShapeKind::Disc { center, radius } => (p - *center).norm() <= *radius,
        ShapeKind::Polygon { vertices } => polygon_contains(vertices, p),
        _ => false,
    }
}

fn disjoint(a: &ShapeKind, b: &ShapeKind) -> bool {
    match (a, b) {
        (
            ShapeKind::Disc {
                center: c1,
                radius: r1,
            },
            ShapeKind::Disc {
                center: c2,
                radius: r2,
            },
        ) => (*c1 - *c2).norm() > r1 + r2,
        (ShapeKind::Disc { center, radius }, other) | (other, ShapeKind::Disc { center, radius }) => {
            let near = edges(other)
                .iter()
                .any(|&(p, q)| point_segment_distance(*center, p, q) <= *radius);
            !near && !primitive_contains(other, *center)
        }
        _ => {
            let (ea, eb) = (edges(a), edges(b));
            let touching = ea
                .iter()
                .any(|&(p, q)| eb.iter().any(|&(r, s)| segment_distance(p, q, r, s) == 0.0));
            !touching && !primitive_contains(a, eb[0].0) && !primitive_contains(b, ea[0].0)
        }
    }
}

impl ObstacleShape {
    pub fn new(kind: ShapeKind) -> Result<Self> {
        let mut flat = Vec::new();
        flatten(kind, &mut flat);
        if flat.is_empty() {
            return Err(Error::EmptyShape);
        }
        let members = flat
            .into_iter()
            .map(validate_primitive)
            .collect::<Result<Vec<_>>>()?;
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if !disjoint(&members[i], &members[j]) {
                    return Err(Error::DegenerateGeometry(format!(
                        "union members {i} and {j} overlap"
                    )));
                }
            }
        }
        let kind = if members.len() == 1 {
            members.into_iter().next().expect("one member")
        } else {
            ShapeKind::Union { members }
        };
        let bounding_radius = Self::compute_bounding_radius(&kind);
        Ok(Self {
            kind,
            bounding_radius,
        })
    }

    pub fn disc(center: Vec2, radius: f64) -> Result<Self> {
        Self::new(ShapeKind::Disc { center, radius })
    }

    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        Self::new(ShapeKind::Polygon { vertices })
    }

    /// Axis-aligned square of the given side centred at the origin.
    pub fn square(side: f64) -> Result<Self> {
        let h = side / 2.0;
        Self::polygon(vec![
            Vec2::new(-h, -h),
            Vec2::new(h, -h),
            Vec2::new(h, h),
            Vec2::new(-h, h),
        ])
    }

    pub fn segment(a: Vec2, b: Vec2) -> Result<Self> {
        Self::new(ShapeKind::Segment { endpoints: [a, b] })
    }

    pub fn union(members: Vec<ObstacleShape>) -> Result<Self> {
        Self::new(ShapeKind::Union {
            members: members.into_iter().map(|m| m.kind).collect(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    /// Primitive members (a single-element slice for non-unions).
    pub fn members(&self) -> &[ShapeKind] {
        match &self.kind {
            ShapeKind::Union { members } => members,
            other => std::slice::from_ref(other),
        }
    }

    /// `max |x|` over the obstacle, measured from the origin.
    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    fn compute_bounding_radius(kind: &ShapeKind) -> f64 {
        match kind {
            ShapeKind::Disc { center, radius } => center.norm() + radius,
            ShapeKind::Polygon { vertices } => vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
            ShapeKind::Segment { endpoints } => endpoints[0].norm().max(endpoints[1].norm()),
            ShapeKind::Union { members } => members
                .iter()
                .map(Self::compute_bounding_radius)
                .fold(0.0, f64::max),
        }
    }

    pub fn area(&self) -> f64 {
        self.members()
            .iter()
            .map(|m| match m {
                ShapeKind::Disc { radius, .. } => PI * radius * radius,
                ShapeKind::Polygon { vertices } => signed_area(vertices),
                _ => 0.0,
            })
            .sum()
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.members().iter().any(|m| primitive_contains(m, p))
    }

    /// `(min, max)` corners of the axis-aligned bounding box.
    pub fn bbox(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut grow = |p: Vec2| {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        };
        for m in self.members() {
            match m {
                ShapeKind::Disc { center, radius } => {
                    grow(*center - Vec2::new(*radius, *radius));
                    grow(*center + Vec2::new(*radius, *radius));
                }
                ShapeKind::Polygon { vertices } => vertices.iter().copied().for_each(&mut grow),
                ShapeKind::Segment { endpoints } => endpoints.iter().copied().for_each(&mut grow),
                ShapeKind::Union { .. } => {}
            }
        }
        (lo, hi)
    }

    pub fn translated(&self, v: Vec2) -> Self {
        self.map_points(|p| p + v)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!("scale factor {s}")));
        }
        let scaled = self.map_points(|p| p * s);
        Ok(match scaled.kind {
            ShapeKind::Union { members } => Self::new(ShapeKind::Union {
                members: members
                    .into_iter()
                    .map(|m| match m {
                        ShapeKind::Disc { center, radius } => ShapeKind::Disc {
                            center,
                            radius: radius * s,
                        },
                        other => other,
                    })
                    .collect(),
            })?,
            ShapeKind::Disc { center, radius } => Self::disc(center, radius * s)?,
            other => Self::new(other)?,
        })
    }

    fn map_points(&self, f: impl Fn(Vec2) -> Vec2 + Copy) -> Self {
        fn go(kind: &ShapeKind, f: impl Fn(Vec2) -> Vec2 + Copy) -> ShapeKind {
            match kind {
                ShapeKind::Disc { center, radius } => ShapeKind::Disc {
                    center: f(*center),
                    radius: *radius,
                },
                ShapeKind::Polygon { vertices } => ShapeKind::Polygon {
                    vertices: vertices.iter().map(|&v| f(v)).collect(),
                },
                ShapeKind::Segment { endpoints } => ShapeKind::Segment {
                    endpoints: [f(endpoints[0]), f(endpoints[1])],
                },
                ShapeKind::Union { members } => ShapeKind::Union {
                    members: members.iter().map(|m| go(m, f)).collect(),
                },
            }
        }
        let kind = go(&self.kind, f);
        let bounding_radius = Self::compute_bounding_radius(&kind);
        Self {
            kind,
            bounding_radius,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind":"disc","center":[1.0,-2.0],"radius":0.5}"#;
        let s = ObstacleShape::from_json(text).unwrap();
        assert_eq!(s.bounding_radius(), 5f64.sqrt() + 0.5);
        assert_eq!(serde_json::to_string(&s).unwrap(), text);
        let poly = r#"{"kind":"polygon","vertices":[[0,0],[0,1],[1,1],[1,0]]}"#;
        let p = ObstacleShape::from_json(poly).unwrap();
        match p.kind() {
            ShapeKind::Polygon { vertices } => assert!(signed_area(vertices) > 0.0),
            _ => panic!(),
        }
        assert!((p.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(ObstacleShape::from_json(r#"{"kind":"disc","center":[0,0],"radius":-1}"#).is_err());
        assert!(ObstacleShape::from_json(r#"{"kind":"blob"}"#).is_err());
        assert!(ObstacleShape::from_json("not json").is_err());
        let bowtie = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        assert!(matches!(
            ObstacleShape::polygon(bowtie),
            Err(Error::DegenerateGeometry(_))
        ));
        let repeated = vec![Vec2::ZERO, Vec2::ZERO, Vec2::new(1.0, 0.0)];
        assert!(ObstacleShape::polygon(repeated).is_err());
        assert!(ObstacleShape::segment(Vec2::ZERO, Vec2::ZERO).is_err());
    }

    #[test]
    fn union_members_must_be_disjoint() {
        let a = ObstacleShape::disc(Vec2::new(-1.5, 0.0), 1.0).unwrap();
        let b = ObstacleShape::disc(Vec2::new(1.5, 0.0), 1.0).unwrap();
        let u = ObstacleShape::union(vec![a.clone(), b]).unwrap();
        assert_eq!(u.members().len(), 2);
        assert!((u.area() - 2.0 * PI).abs() < 1e-14);
        let c = ObstacleShape::disc(Vec2::new(0.2, 0.0), 1.0).unwrap();
        assert!(ObstacleShape::union(vec![a.clone(), c]).is_err());
        let inner = ObstacleShape::square(0.2).unwrap().translated(Vec2::new(-1.5, 0.0));
        assert!(ObstacleShape::union(vec![a, inner]).is_err());
    }

    #[test]
    fn scaling_and_translation() {
        let sq = ObstacleShape::square(1.0).unwrap();
        let big = sq.scaled(2.0).unwrap();
        assert!((big.area() - 4.0).abs() < 1e-14);
        let moved = sq.translated(Vec2::new(3.0, 0.0));
        assert!(moved.contains(Vec2::new(3.1, 0.2)));
        assert!(!moved.contains(Vec2::ZERO));
    }
}
