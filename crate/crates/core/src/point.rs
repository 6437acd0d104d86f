//! Points of the extended plane and the chordal and spherical metrics.
//!
//! The sphere is the unit sphere in R^3 under stereographic projection from
//! the north pole, so the chordal diameter of the sphere is 2 and the
//! spherical (great-circle) diameter is pi.

use std::fmt;

use num_complex::Complex64;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanePoint {
    Finite(Complex64),
    Infinity,
}

impl PlanePoint {
    pub fn new(re: f64, im: f64) -> Self {
        PlanePoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PlanePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            PlanePoint::Finite(z) => Some(*z),
            PlanePoint::Infinity => None,
        }
    }

    /// Image on the unit sphere.
    pub fn to_sphere(&self) -> [f64; 3] {
        match self {
            PlanePoint::Finite(z) => stereographic(*z),
            PlanePoint::Infinity => [0.0, 0.0, 1.0],
        }
    }
}

impl From<Complex64> for PlanePoint {
    fn from(z: Complex64) -> Self {
        PlanePoint::Finite(z)
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanePoint::Finite(z) => write!(f, "{},{}", z.re, z.im),
            PlanePoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Inverse stereographic projection of a finite point.
pub fn stereographic(z: Complex64) -> [f64; 3] {
    let n = z.norm_sqr();
    let d = 1.0 + n;
    [2.0 * z.re / d, 2.0 * z.im / d, (n - 1.0) / d]
}

fn angle_between(p: [f64; 3], q: [f64; 3]) -> f64 {
    let cross = [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ];
    let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let dot = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
    cn.atan2(dot)
}

pub(crate) fn sphere_angle(p: [f64; 3], q: [f64; 3]) -> f64 {
    angle_between(p, q)
}

/// Chordal distance `2|z-w| / (sqrt(1+|z|^2) sqrt(1+|w|^2))`.
pub fn chordal_distance(z: PlanePoint, w: PlanePoint) -> f64 {
    match (z, w) {
        (PlanePoint::Infinity, PlanePoint::Infinity) => 0.0,
        (PlanePoint::Finite(a), PlanePoint::Infinity) | (PlanePoint::Infinity, PlanePoint::Finite(a)) => {
            2.0 / (1.0 + a.norm_sqr()).sqrt()
        }
        (PlanePoint::Finite(a), PlanePoint::Finite(b)) => chordal_finite(a, b),
    }
}

pub(crate) fn chordal_finite(a: Complex64, b: Complex64) -> f64 {
    2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
}

/// Great-circle distance on the unit sphere.
pub fn spherical_distance(z: PlanePoint, w: PlanePoint) -> f64 {
    angle_between(z.to_sphere(), w.to_sphere())
}

pub(crate) fn spherical_finite(a: Complex64, b: Complex64) -> f64 {
    angle_between(stereographic(a), stereographic(b))
}

/// Spherical distance from a finite point to infinity, `pi - 2 atan|z|`.
pub fn spherical_to_infinity(z: Complex64) -> f64 {
    std::f64::consts::PI - 2.0 * z.norm().atan()
}

/// Spherical length of the straight segment `[p, q]`, in closed form.
///
/// With `w(t) = p + t (q - p)` the length is `int_0^1 2|q-p| / (1 + |w(t)|^2) dt`,
/// a rational integrand whose antiderivative is an arctangent.
pub fn spherical_segment_length(p: Complex64, q: Complex64) -> f64 {
    let d = q - p;
    let a = d.norm_sqr();
    if a == 0.0 {
        return 0.0;
    }
    let b = 2.0 * (p.re * d.re + p.im * d.im);
    let c = 1.0 + p.norm_sqr();
    let disc = 4.0 * a * c - b * b;
    let s = disc.sqrt();
    let f = |t: f64| ((2.0 * a * t + b) / s).atan();
    2.0 * a.sqrt() * 2.0 / s * (f(1.0) - f(0.0))
}
