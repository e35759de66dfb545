//! Planar and spatial primitives shared by all pipeline stages.
//!
//! Conventions: meters, double precision, counter-clockwise polygons.
//! Containment and overlap predicates err conservative — boundary points
//! count as inside, touching boxes count as overlapping — so marginal
//! geometry is never emitted by the generators.

mod pose;

pub use pose::{se3_exp, se3_log, so3_exp, so3_log, Pose3, Quat, Twist};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Geometric tolerance (meters) for boundary classification.
pub const GEO_EPS: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Vectors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Counter-clockwise rotation by `angle` radians.
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        Vec3::new(self.x / n, self.y / n, self.z / n)
    }

    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

// ---------------------------------------------------------------------------
// Axis-aligned rectangle
// ---------------------------------------------------------------------------

/// Axis-aligned rectangle, used for field grids and board surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Rect {
        Rect { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x - GEO_EPS
            && p.x <= self.max.x + GEO_EPS
            && p.y >= self.min.y - GEO_EPS
            && p.y <= self.max.y + GEO_EPS
    }

    /// Shrink by `m` on all sides (may produce an empty rect).
    pub fn shrunk(&self, m: f64) -> Rect {
        Rect {
            min: self.min + Vec2::new(m, m),
            max: self.max - Vec2::new(m, m),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.width() <= 0.0 || self.height() <= 0.0
    }
}

// ---------------------------------------------------------------------------
// Angles
// ---------------------------------------------------------------------------

/// Wrap an angle to (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Absolute angular difference between two directions defined modulo π.
pub fn line_angle_distance(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(std::f64::consts::PI);
    if d > std::f64::consts::FRAC_PI_2 {
        d = std::f64::consts::PI - d;
    }
    d
}

// ---------------------------------------------------------------------------
// Segments
// ---------------------------------------------------------------------------

/// Distance from point `p` to segment `a`–`b`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_squared();
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Parametric segment intersection test, endpoints included. Parallel and
/// near-parallel pairs (cross product below a length-scaled epsilon) count
/// as non-intersecting; overlap of collinear segments is a distance
/// question, not a crossing.
pub fn segments_intersect(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> bool {
    let d = (b2.y - b1.y) * (a2.x - a1.x) - (b2.x - b1.x) * (a2.y - a1.y);
    let scale = (a2 - a1).norm() * (b2 - b1).norm();
    if d.abs() <= 1e-12 * scale {
        return false;
    }
    let ua = ((b2.x - b1.x) * (a1.y - b1.y) - (b2.y - b1.y) * (a1.x - b1.x)) / d;
    if !(0.0..=1.0).contains(&ua) {
        return false;
    }
    let ub = ((a2.x - a1.x) * (a1.y - b1.y) - (a2.y - a1.y) * (a1.x - b1.x)) / d;
    (0.0..=1.0).contains(&ub)
}

// ---------------------------------------------------------------------------
// Polygon
// ---------------------------------------------------------------------------

/// Simple counter-clockwise polygon (closed: last vertex connects to first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    /// Build a polygon, normalizing winding to counter-clockwise.
    pub fn new(vertices: Vec<Vec2>) -> Result<Polygon> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("polygon vertex".into()));
        }
        let mut poly = Polygon { vertices };
        if poly.signed_area().abs() < GEO_EPS {
            return Err(Error::InvalidPolygon("zero area".into()));
        }
        if poly.signed_area() < 0.0 {
            poly.vertices.reverse();
        }
        if !poly.is_simple() {
            return Err(Error::InvalidPolygon("self-intersecting".into()));
        }
        Ok(poly)
    }

    /// Axis-aligned rectangle [0, w] × [0, d].
    pub fn rectangle(w: f64, d: f64) -> Result<Polygon> {
        Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(w, 0.0),
            Vec2::new(w, d),
            Vec2::new(0.0, d),
        ])
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Edges as (start, end) pairs, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        self.edges().map(|(a, b)| a.cross(b)).sum::<f64>() / 2.0
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.distance(b)).sum()
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let (a1, a2) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in (i + 1)..n {
                // skip adjacent edges (they share a vertex by construction)
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (b1, b2) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(a1, a2, b1, b2) {
                    return false;
                }
            }
        }
        true
    }

    /// Distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Ray-crossing containment; boundary points (within [`GEO_EPS`]) count
    /// as inside.
    pub fn contains(&self, p: Vec2) -> bool {
        if self.boundary_distance(p) <= GEO_EPS {
            return true;
        }
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let vi = self.vertices[i];
            let vj = self.vertices[j];
            if (vi.y > p.y) != (vj.y > p.y) {
                let x_cross = (vj.x - vi.x) * (p.y - vi.y) / (vj.y - vi.y) + vi.x;
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

/// Subdivide polygon edges so no edge exceeds `max_edge` meters.
///
/// Output vertices are a superset of the input vertices; inserted points lie
/// on the original edges, so the shape and perimeter are unchanged.
pub fn resample_polygon(poly: &Polygon, max_edge: f64) -> Result<Polygon> {
    if !(max_edge > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "max edge length must be positive, got {max_edge}"
        )));
    }
    let mut vertices = Vec::new();
    for (a, b) in poly.edges() {
        let len = a.distance(b);
        let pieces = (len / max_edge).ceil().max(1.0) as usize;
        vertices.push(a);
        for k in 1..pieces {
            let t = k as f64 / pieces as f64;
            vertices.push(a + (b - a) * t);
        }
    }
    Ok(Polygon { vertices })
}

// ---------------------------------------------------------------------------
// Oriented boxes
// ---------------------------------------------------------------------------

/// Planar oriented bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obb2 {
    pub center: Vec2,
    pub half_extents: Vec2,
    pub yaw: f64,
}

impl Obb2 {
    pub fn new(center: Vec2, half_extents: Vec2, yaw: f64) -> Result<Obb2> {
        if !(half_extents.x > 0.0 && half_extents.y > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "half extents must be positive, got ({}, {})",
                half_extents.x, half_extents.y
            )));
        }
        if !center.is_finite() || !half_extents.is_finite() || !yaw.is_finite() {
            return Err(Error::NonFinite("obb".into()));
        }
        Ok(Obb2 {
            center,
            half_extents,
            yaw,
        })
    }

    pub fn corners(&self) -> [Vec2; 4] {
        const SIGNS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
        SIGNS.map(|(sx, sy)| {
            self.center
                + Vec2::new(sx * self.half_extents.x, sy * self.half_extents.y).rotated(self.yaw)
        })
    }

    /// Local x and y axes in world coordinates.
    pub fn axes(&self) -> [Vec2; 2] {
        [
            Vec2::new(1.0, 0.0).rotated(self.yaw),
            Vec2::new(0.0, 1.0).rotated(self.yaw),
        ]
    }

    /// Grow both half extents by `m` (shrink when negative).
    pub fn inflated(&self, m: f64) -> Obb2 {
        Obb2 {
            center: self.center,
            half_extents: Vec2::new(self.half_extents.x + m, self.half_extents.y + m),
            yaw: self.yaw,
        }
    }

    fn to_local(&self, p: Vec2) -> Vec2 {
        (p - self.center).rotated(-self.yaw)
    }

    /// Signed distance from `p` to the box boundary; negative inside.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        let l = self.to_local(p);
        let dx = l.x.abs() - self.half_extents.x;
        let dy = l.y.abs() - self.half_extents.y;
        if dx <= 0.0 && dy <= 0.0 {
            dx.max(dy)
        } else {
            Vec2::new(dx.max(0.0), dy.max(0.0)).norm()
        }
    }

    pub fn contains_point(&self, p: Vec2) -> bool {
        self.signed_distance(p) <= GEO_EPS
    }
}

/// Separating-axis overlap test over the four face normals.
///
/// Touching boxes (zero separation on every axis) count as overlapping.
pub fn obb_overlap(a: &Obb2, b: &Obb2) -> bool {
    let ca = a.corners();
    let cb = b.corners();
    for axes in [a.axes(), b.axes()] {
        for axis in axes {
            let (a_lo, a_hi) = project(&ca, axis);
            let (b_lo, b_hi) = project(&cb, axis);
            if a_hi < b_lo || b_hi < a_lo {
                return false;
            }
        }
    }
    true
}

fn project(corners: &[Vec2; 4], axis: Vec2) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in corners {
        let d = c.dot(axis);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

/// Minimum distance between a segment and a box (0 when they intersect).
pub fn segment_obb_distance(a: Vec2, b: Vec2, obb: &Obb2) -> f64 {
    let corners = obb.corners();
    for i in 0..4 {
        if segments_intersect(a, b, corners[i], corners[(i + 1) % 4]) {
            return 0.0;
        }
    }
    if obb.contains_point(a) {
        return 0.0;
    }
    let mut d = f64::INFINITY;
    for i in 0..4 {
        let (e1, e2) = (corners[i], corners[(i + 1) % 4]);
        d = d.min(point_segment_distance(a, e1, e2));
        d = d.min(point_segment_distance(b, e1, e2));
    }
    for c in corners {
        d = d.min(point_segment_distance(c, a, b));
    }
    d
}

/// True when the box lies inside the polygon with at least `margin`
/// clearance from every polygon edge.
pub fn obb_inside_polygon(obb: &Obb2, poly: &Polygon, margin: f64) -> bool {
    for c in obb.corners() {
        if !poly.contains(c) {
            return false;
        }
    }
    poly.edges()
        .all(|(a, b)| segment_obb_distance(a, b, obb) >= margin)
}

// ---------------------------------------------------------------------------
// Spatial box (yaw-oriented footprint with a z-interval)
// ---------------------------------------------------------------------------

/// Spatial box: a yaw-oriented footprint extruded over a z-interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obb3 {
    pub center: Vec3,
    pub half_extents: Vec3,
    pub yaw: f64,
}

impl Obb3 {
    pub fn new(center: Vec3, half_extents: Vec3, yaw: f64) -> Result<Obb3> {
        if !(half_extents.x > 0.0 && half_extents.y > 0.0 && half_extents.z > 0.0) {
            return Err(Error::InvalidParameter(
                "obb3 half extents must be positive".into(),
            ));
        }
        Ok(Obb3 {
            center,
            half_extents,
            yaw,
        })
    }

    /// Extrude a planar box over [z_lo, z_hi].
    pub fn from_footprint(fp: &Obb2, z_lo: f64, z_hi: f64) -> Result<Obb3> {
        Obb3::new(
            Vec3::new(fp.center.x, fp.center.y, (z_lo + z_hi) / 2.0),
            Vec3::new(fp.half_extents.x, fp.half_extents.y, (z_hi - z_lo) / 2.0),
            fp.yaw,
        )
    }

    pub fn footprint(&self) -> Obb2 {
        Obb2 {
            center: self.center.xy(),
            half_extents: self.half_extents.xy(),
            yaw: self.yaw,
        }
    }

    fn to_local(&self, p: Vec3) -> Vec3 {
        let d = p - self.center;
        let xy = d.xy().rotated(-self.yaw);
        Vec3::new(xy.x, xy.y, d.z)
    }

    /// Signed distance from `p` to the box surface; negative inside.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        let l = self.to_local(p);
        let d = Vec3::new(
            l.x.abs() - self.half_extents.x,
            l.y.abs() - self.half_extents.y,
            l.z.abs() - self.half_extents.z,
        );
        if d.x <= 0.0 && d.y <= 0.0 && d.z <= 0.0 {
            d.x.max(d.y).max(d.z)
        } else {
            Vec3::new(d.x.max(0.0), d.y.max(0.0), d.z.max(0.0)).norm()
        }
    }

    pub fn contains_point(&self, p: Vec3) -> bool {
        self.signed_distance(p) <= GEO_EPS
    }

    /// Conservative AABB of the box (for broad-phase culling).
    pub fn aabb(&self) -> (Vec3, Vec3) {
        let r = self.half_extents.xy().norm();
        (
            Vec3::new(self.center.x - r, self.center.y - r, self.center.z - self.half_extents.z),
            Vec3::new(self.center.x + r, self.center.y + r, self.center.z + self.half_extents.z),
        )
    }
}

/// Clearance of a sphere against a box: signed distance from the sphere
/// center to the box surface minus the radius. Negative means penetration.
pub fn sphere_obb_clearance(center: Vec3, radius: f64, obb: &Obb3) -> f64 {
    obb.signed_distance(center) - radius
}
