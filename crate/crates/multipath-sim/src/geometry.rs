//! Minimal 2D vector algebra and segment primitives for mirror geometry.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scenario::Reflector;

/// Planar point or vector in meters, world frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        debug_assert!(n > 0.0, "normalizing zero vector");
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// World-frame bearing from `from` toward `to`, degrees in `(-180, 180]`.
pub fn bearing_deg(from: Vec2, to: Vec2) -> f64 {
    let d = to - from;
    d.y.atan2(d.x).to_degrees()
}

/// Reflect `p` across the infinite line through the reflector's endpoints.
/// Applying the reflection twice returns the original point.
pub fn mirror_across_line(p: Vec2, refl: &Reflector) -> Vec2 {
    let dir = (refl.b - refl.a).normalized();
    let ap = p - refl.a;
    let foot = refl.a + dir * ap.dot(dir);
    foot * 2.0 - p
}

/// Reflect a direction vector across the reflector's line direction.
pub(crate) fn mirror_direction(v: Vec2, refl: &Reflector) -> Vec2 {
    let dir = (refl.b - refl.a).normalized();
    dir * (2.0 * v.dot(dir)) - v
}

/// Signed side of `p` relative to the reflector line; 0 means on the line.
pub(crate) fn side_of_line(p: Vec2, refl: &Reflector) -> f64 {
    (refl.b - refl.a).cross(p - refl.a)
}

/// Proper intersection of segments `p1->p2` and `q1->q2`.
///
/// Returns the parameters `(t, u)` along each segment when the lines cross
/// with both parameters in `[0, 1]`. Parallel (including collinear)
/// segments yield `None`.
pub fn segment_intersection(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> Option<(f64, f64)> {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let denom = d1.cross(d2);
    if denom.abs() < 1e-12 {
        return None;
    }
    let w = q1 - p1;
    let t = w.cross(d2) / denom;
    let u = w.cross(d1) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// Does the open segment `p -> q` cross the reflector segment at an
/// interior point of `p -> q`? Endpoints touching the reflector do not
/// count as blocking.
pub(crate) fn segment_blocked_by(p: Vec2, q: Vec2, refl: &Reflector) -> bool {
    match segment_intersection(p, q, refl.a, refl.b) {
        Some((t, _u)) => t > 1e-12 && t < 1.0 - 1e-12,
        None => false,
    }
}

/// Euclidean distance from `p` to the closed segment.
pub fn point_to_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}
