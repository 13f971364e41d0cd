//! Points and vectors on the reference plane.
//!
//! All chip-area geometry lives on the reference plane through the cutting
//! edge, perpendicular to the cutting velocity. Its coordinates are the
//! machine axes `x` (depth of cut) and `z` (feed), so the fields are named
//! `x` and `z` to avoid mixing them up with the out-of-plane axis `y`.

use std::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) on the (x, z) reference plane, in mm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct P2 {
    pub x: f64,
    pub z: f64,
}

impl P2 {
    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn dot(self, other: P2) -> f64 {
        self.x * other.x + self.z * other.z
    }

    /// 2D cross product (signed parallelogram area).
    pub fn cross(self, other: P2) -> f64 {
        self.x * other.z - self.z * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.z)
    }

    pub fn norm_squared(self) -> f64 {
        self.x * self.x + self.z * self.z
    }

    pub fn normalize(self) -> P2 {
        let n = self.norm();
        P2::new(self.x / n, self.z / n)
    }

    pub fn try_normalize(self, min_norm: f64) -> Option<P2> {
        let n = self.norm();
        (n > min_norm).then(|| P2::new(self.x / n, self.z / n))
    }

    /// Rotate by 90 degrees counter-clockwise in the (x, z) plane
    /// (counter-clockwise when x points right and z points up).
    pub fn perp(self) -> P2 {
        P2::new(-self.z, self.x)
    }

    pub fn distance(self, other: P2) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: P2, t: f64) -> P2 {
        self + (other - self) * t
    }
}

impl Add for P2 {
    type Output = P2;
    fn add(self, rhs: P2) -> P2 {
        P2::new(self.x + rhs.x, self.z + rhs.z)
    }
}

impl Sub for P2 {
    type Output = P2;
    fn sub(self, rhs: P2) -> P2 {
        P2::new(self.x - rhs.x, self.z - rhs.z)
    }
}

impl Mul<f64> for P2 {
    type Output = P2;
    fn mul(self, rhs: f64) -> P2 {
        P2::new(self.x * rhs, self.z * rhs)
    }
}

impl Neg for P2 {
    type Output = P2;
    fn neg(self) -> P2 {
        P2::new(-self.x, -self.z)
    }
}

/// Intersection of segments [p0, p1] and [q0, q1].
///
/// Returns the parameters (s, t) along each segment when they cross with
/// both parameters in [-eps, 1+eps], else `None`. Parallel segments give
/// `None` even when collinear-overlapping.
pub fn seg_seg_intersection(p0: P2, p1: P2, q0: P2, q1: P2, eps: f64) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.cross(s);
    let scale = r.norm().max(s.norm()).max(1e-300);
    if denom.abs() < 1e-14 * scale * scale {
        return None;
    }
    let qp = q0 - p0;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if t >= -eps && t <= 1.0 + eps && u >= -eps && u <= 1.0 + eps {
        Some((t, u))
    } else {
        None
    }
}

/// Squared distance from `p` to segment [a, b], plus the closest parameter.
pub fn point_segment_distance_sq(p: P2, a: P2, b: P2) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 <= 0.0 {
        return ((p - a).norm_squared(), 0.0);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    let c = a + ab * t;
    ((p - c).norm_squared(), t)
}
