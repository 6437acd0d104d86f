//! Complementary components of a planar domain.
//!
//! Every component is a closed subset of the plane. Discs and polygons are
//! solid. When a domain does not contain infinity, one disc or polygon may
//! play the role of the outer boundary; it then stands for the closure of
//! the unbounded side of its boundary curve (`outer = true` below). A
//! half-plane is always of that unbounded kind.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{sphere_angle, spherical_finite, spherical_to_infinity, stereographic};

/// One complementary component, in the on-disk tagged form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryComponent {
    Disc { cx: f64, cy: f64, r: f64 },
    Segment { x1: f64, y1: f64, x2: f64, y2: f64 },
    Polyline { points: Vec<[f64; 2]> },
    Point { x: f64, y: f64 },
    /// Closed half-plane `{z : Re((z - p) conj(n)) <= 0}`; `n` points into the domain.
    Halfplane { px: f64, py: f64, nx: f64, ny: f64 },
}

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Euclidean distance from `z` to the segment `[a, b]`.
pub fn dist_point_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    (z - closest_on_segment(z, a, b)).norm()
}

pub(crate) fn closest_on_segment(z: Complex64, a: Complex64, b: Complex64) -> Complex64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return a;
    }
    let t = (dot(z - a, d) / l2).clamp(0.0, 1.0);
    a + d * t
}

fn orient(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    cross(b - a, p - a)
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed segments `[a, b]` and `[c, d]` intersect.
pub fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Euclidean distance between two closed segments (zero when they meet).
pub fn dist_segment_segment(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    dist_point_segment(a, c, d)
        .min(dist_point_segment(b, c, d))
        .min(dist_point_segment(c, a, b))
        .min(dist_point_segment(d, a, b))
}

/// Even-odd point-in-polygon test; boundary points count as inside.
pub fn point_in_polygon(z: Complex64, pts: &[Complex64]) -> bool {
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if dist_point_segment(z, a, b) == 0.0 {
            return true;
        }
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Signed area of a closed polygon (positive when counter-clockwise).
pub fn polygon_area(pts: &[Complex64]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| cross(pts[i], pts[(i + 1) % n])).sum::<f64>() / 2.0
}

fn polygon_edges(pts: &[Complex64]) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
    let n = pts.len();
    (0..n).map(move |i| (pts[i], pts[(i + 1) % n]))
}

/// Minimal value of `|z - w(t)|^2 / (1 + |w(t)|^2)` on `w(t) = a + t (b - a)`
/// for `t` in `[lo, hi]`, together with the limit value at infinity when the
/// range is unbounded.
fn min_chordal_ratio(z: Complex64, a: Complex64, d: Complex64, lo: f64, hi: f64) -> f64 {
    let az = a - z;
    let n2 = d.norm_sqr();
    let n1 = 2.0 * dot(az, d);
    let n0 = az.norm_sqr();
    let d2 = n2;
    let d1 = 2.0 * dot(a, d);
    let d0 = 1.0 + a.norm_sqr();
    let f = |t: f64| (n2 * t * t + n1 * t + n0) / (d2 * t * t + d1 * t + d0);
    let mut best = f64::INFINITY;
    if lo.is_finite() {
        best = best.min(f(lo));
    } else {
        best = best.min(1.0);
    }
    if hi.is_finite() {
        best = best.min(f(hi));
    } else {
        best = best.min(1.0);
    }
    let qa = n2 * d1 - n1 * d2;
    let qb = 2.0 * (n2 * d0 - n0 * d2);
    let qc = n1 * d0 - n0 * d1;
    let mut roots = [f64::NAN; 2];
    if qa.abs() < 1e-300 {
        if qb != 0.0 {
            roots[0] = -qc / qb;
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let s = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * s);
            roots[0] = q / qa;
            if q != 0.0 {
                roots[1] = qc / q;
            }
        }
    }
    for t in roots {
        if t.is_finite() && t >= lo && t <= hi {
            best = best.min(f(t));
        }
    }
    best
}

fn spherical_from_ratio(z: Complex64, ratio: f64) -> f64 {
    let chi = 2.0 * (ratio.max(0.0) / (1.0 + z.norm_sqr())).sqrt();
    2.0 * (chi / 2.0).min(1.0).asin()
}

/// Spherical distance from `z` to the closed segment `[a, b]`.
pub fn spherical_dist_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let r = min_chordal_ratio(z, a, b - a, 0.0, 1.0);
    let s = spherical_from_ratio(z, r);
    // the closed form loses accuracy near antipodal configurations
    s.min(spherical_finite(z, a)).min(spherical_finite(z, b))
}

/// Spherical cap `(axis, angular radius)` that is the image of the closed disc `B(c, r)`.
fn disc_cap(center: Complex64, r: f64) -> ([f64; 3], f64) {
    let m = center.norm();
    let dir = if m > 0.0 { center / m } else { Complex64::new(1.0, 0.0) };
    let t1 = 2.0 * (m + r).atan();
    let t2 = 2.0 * (m - r).atan();
    let tc = 0.5 * (t1 + t2);
    let beta = 0.5 * (t1 - t2);
    let axis = [tc.sin() * dir.re, tc.sin() * dir.im, -tc.cos()];
    (axis, beta)
}

impl BoundaryComponent {
    pub fn disc(cx: f64, cy: f64, r: f64) -> Self {
        BoundaryComponent::Disc { cx, cy, r }
    }

    pub fn segment(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        BoundaryComponent::Segment { x1, y1, x2, y2 }
    }

    pub fn point(x: f64, y: f64) -> Self {
        BoundaryComponent::Point { x, y }
    }

    pub fn polyline(points: Vec<[f64; 2]>) -> Self {
        BoundaryComponent::Polyline { points }
    }

    pub fn halfplane(px: f64, py: f64, nx: f64, ny: f64) -> Self {
        BoundaryComponent::Halfplane { px, py, nx, ny }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            BoundaryComponent::Disc { .. } => "disc",
            BoundaryComponent::Segment { .. } => "segment",
            BoundaryComponent::Polyline { .. } => "polyline",
            BoundaryComponent::Point { .. } => "point",
            BoundaryComponent::Halfplane { .. } => "halfplane",
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, BoundaryComponent::Point { .. })
    }

    /// Polygon vertices as complex numbers (empty for other kinds).
    pub fn polygon(&self) -> Vec<Complex64> {
        match self {
            BoundaryComponent::Polyline { points } => points.iter().map(|p| c(p[0], p[1])).collect(),
            _ => Vec::new(),
        }
    }

    fn halfplane_frame(&self) -> Option<(Complex64, Complex64)> {
        match *self {
            BoundaryComponent::Halfplane { px, py, nx, ny } => {
                let n = c(nx, ny);
                Some((c(px, py), n / n.norm()))
            }
            _ => None,
        }
    }

    /// Structural checks: positive radius, distinct endpoints, simple polygon.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            BoundaryComponent::Disc { cx, cy, r } => {
                if !finite(&[*cx, *cy, *r]) || *r <= 0.0 {
                    return Err(Error::InvalidDomain(format!("disc radius must be positive, got {r}")));
                }
            }
            BoundaryComponent::Segment { x1, y1, x2, y2 } => {
                if !finite(&[*x1, *y1, *x2, *y2]) || (x1 == x2 && y1 == y2) {
                    return Err(Error::InvalidDomain("segment endpoints must be distinct".into()));
                }
            }
            BoundaryComponent::Point { x, y } => {
                if !finite(&[*x, *y]) {
                    return Err(Error::InvalidDomain("point must be finite".into()));
                }
            }
            BoundaryComponent::Halfplane { px, py, nx, ny } => {
                if !finite(&[*px, *py, *nx, *ny]) || (*nx == 0.0 && *ny == 0.0) {
                    return Err(Error::InvalidDomain("half-plane normal must be nonzero".into()));
                }
            }
            BoundaryComponent::Polyline { points } => {
                if points.len() < 3 {
                    return Err(Error::InvalidDomain("polyline needs at least 3 vertices".into()));
                }
                if !points.iter().all(|p| finite(p)) {
                    return Err(Error::InvalidDomain("polyline vertices must be finite".into()));
                }
                let pts = self.polygon();
                if polygon_area(&pts).abs() <= 0.0 {
                    return Err(Error::InvalidDomain("polyline encloses no area".into()));
                }
                let n = pts.len();
                for i in 0..n {
                    for j in (i + 1)..n {
                        let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                        let (a, b) = (pts[i], pts[(i + 1) % n]);
                        let (p, q) = (pts[j], pts[(j + 1) % n]);
                        if adjacent {
                            // adjacent edges may only share their common vertex
                            if (a - b).norm() == 0.0 || (p - q).norm() == 0.0 {
                                return Err(Error::InvalidDomain("polyline has repeated vertices".into()));
                            }
                            continue;
                        }
                        if segments_intersect(a, b, p, q) {
                            return Err(Error::InvalidDomain(format!("polyline self-intersects at edges {i} and {j}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether the component may act as an outer boundary.
    pub fn can_be_outer(&self) -> bool {
        matches!(self, BoundaryComponent::Disc { .. } | BoundaryComponent::Polyline { .. })
    }

    /// Closed membership test.
    pub fn contains(&self, z: Complex64, outer: bool) -> bool {
        self.signed_distance(z, outer) <= 0.0
    }

    /// Euclidean signed distance: negative in the interior, zero on the
    /// boundary, positive outside. Segments and points have no interior.
    pub fn signed_distance(&self, z: Complex64, outer: bool) -> f64 {
        match self {
            BoundaryComponent::Disc { cx, cy, r } => {
                let d = (z - c(*cx, *cy)).norm() - r;
                if outer {
                    -d
                } else {
                    d
                }
            }
            BoundaryComponent::Segment { x1, y1, x2, y2 } => dist_point_segment(z, c(*x1, *y1), c(*x2, *y2)),
            BoundaryComponent::Point { x, y } => (z - c(*x, *y)).norm(),
            BoundaryComponent::Halfplane { .. } => {
                let (p, n) = self.halfplane_frame().unwrap();
                dot(z - p, n)
            }
            BoundaryComponent::Polyline { .. } => {
                let pts = self.polygon();
                let d = polygon_edges(&pts)
                    .map(|(a, b)| dist_point_segment(z, a, b))
                    .fold(f64::INFINITY, f64::min);
                let inside = point_in_polygon(z, &pts);
                if inside != outer {
                    -d
                } else {
                    d
                }
            }
        }
    }

    /// Euclidean distance from `z` to the component (zero inside).
    pub fn distance(&self, z: Complex64, outer: bool) -> f64 {
        self.signed_distance(z, outer).max(0.0)
    }

    /// Spherical distance from the finite point `z` to the component.
    pub fn spherical_distance(&self, z: Complex64, outer: bool) -> f64 {
        match self {
            BoundaryComponent::Disc { cx, cy, r } => {
                let (axis, beta) = disc_cap(c(*cx, *cy), *r);
                let ang = sphere_angle(stereographic(z), axis);
                if outer {
                    (beta - ang).max(0.0)
                } else {
                    (ang - beta).max(0.0)
                }
            }
            BoundaryComponent::Segment { x1, y1, x2, y2 } => spherical_dist_segment(z, c(*x1, *y1), c(*x2, *y2)),
            BoundaryComponent::Point { x, y } => spherical_finite(z, c(*x, *y)),
            BoundaryComponent::Halfplane { .. } => {
                let (p, n) = self.halfplane_frame().unwrap();
                if dot(z - p, n) <= 0.0 {
                    return 0.0;
                }
                let d = n * Complex64::new(0.0, 1.0);
                let r = min_chordal_ratio(z, p, d, f64::NEG_INFINITY, f64::INFINITY);
                spherical_from_ratio(z, r).min(spherical_to_infinity(z))
            }
            BoundaryComponent::Polyline { .. } => {
                let pts = self.polygon();
                if point_in_polygon(z, &pts) != outer {
                    return 0.0;
                }
                polygon_edges(&pts)
                    .map(|(a, b)| spherical_dist_segment(z, a, b))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Euclidean distance from the closed segment `[a, b]` to the component.
    pub fn segment_distance(&self, a: Complex64, b: Complex64, outer: bool) -> f64 {
        match self {
            BoundaryComponent::Disc { cx, cy, r } => {
                let cc = c(*cx, *cy);
                if outer {
                    (r - (a - cc).norm().max((b - cc).norm())).max(0.0)
                } else {
                    (dist_point_segment(cc, a, b) - r).max(0.0)
                }
            }
            BoundaryComponent::Segment { x1, y1, x2, y2 } => dist_segment_segment(a, b, c(*x1, *y1), c(*x2, *y2)),
            BoundaryComponent::Point { x, y } => dist_point_segment(c(*x, *y), a, b),
            BoundaryComponent::Halfplane { .. } => {
                let (p, n) = self.halfplane_frame().unwrap();
                dot(a - p, n).min(dot(b - p, n)).max(0.0)
            }
            BoundaryComponent::Polyline { .. } => {
                let pts = self.polygon();
                let ina = point_in_polygon(a, &pts);
                let inb = point_in_polygon(b, &pts);
                if (!outer && (ina || inb)) || (outer && (!ina || !inb)) {
                    return 0.0;
                }
                polygon_edges(&pts)
                    .map(|(p, q)| dist_segment_segment(a, b, p, q))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Euclidean diameter; infinite for unbounded components.
    pub fn diameter(&self, outer: bool) -> f64 {
        if outer {
            return f64::INFINITY;
        }
        match self {
            BoundaryComponent::Disc { r, .. } => 2.0 * r,
            BoundaryComponent::Segment { x1, y1, x2, y2 } => (c(*x1, *y1) - c(*x2, *y2)).norm(),
            BoundaryComponent::Point { .. } => 0.0,
            BoundaryComponent::Halfplane { .. } => f64::INFINITY,
            BoundaryComponent::Polyline { .. } => {
                let pts = self.polygon();
                let mut d: f64 = 0.0;
                for i in 0..pts.len() {
                    for j in (i + 1)..pts.len() {
                        d = d.max((pts[i] - pts[j]).norm());
                    }
                }
                d
            }
        }
    }

    /// Largest distance from `p` to a point of the (bounded) component.
    pub(crate) fn farthest_from(&self, p: Complex64) -> f64 {
        match self {
            BoundaryComponent::Disc { cx, cy, r } => (c(*cx, *cy) - p).norm() + r,
            BoundaryComponent::Segment { x1, y1, x2, y2 } => (c(*x1, *y1) - p).norm().max((c(*x2, *y2) - p).norm()),
            BoundaryComponent::Point { x, y } => (c(*x, *y) - p).norm(),
            BoundaryComponent::Polyline { .. } => self.polygon().iter().map(|v| (v - p).norm()).fold(0.0, f64::max),
            BoundaryComponent::Halfplane { .. } => f64::INFINITY,
        }
    }

    /// Smallest value of `Re((s - p) conj(n))` over points `s` of the component.
    fn min_along(&self, p: Complex64, n: Complex64) -> f64 {
        match self {
            BoundaryComponent::Disc { cx, cy, r } => dot(c(*cx, *cy) - p, n) - r,
            BoundaryComponent::Segment { x1, y1, x2, y2 } => dot(c(*x1, *y1) - p, n).min(dot(c(*x2, *y2) - p, n)),
            BoundaryComponent::Point { x, y } => dot(c(*x, *y) - p, n),
            BoundaryComponent::Polyline { .. } => {
                self.polygon().iter().map(|v| dot(v - p, n)).fold(f64::INFINITY, f64::min)
            }
            BoundaryComponent::Halfplane { .. } => f64::NEG_INFINITY,
        }
    }

    /// Euclidean set distance between two components.
    pub fn set_distance(&self, self_outer: bool, other: &BoundaryComponent, other_outer: bool) -> f64 {
        use BoundaryComponent::*;
        if other_outer || matches!(other, Halfplane { .. }) {
            if self_outer || matches!(self, Halfplane { .. }) {
                return 0.0;
            }
            return other.set_distance(other_outer, self, self_outer);
        }
        if let Some((p, n)) = self.halfplane_frame() {
            return other.min_along(p, n).max(0.0);
        }
        if self_outer {
            return match self {
                Disc { cx, cy, r } => (r - other.farthest_from(c(*cx, *cy))).max(0.0),
                Polyline { .. } => {
                    let pts = self.polygon();
                    polygon_edges(&pts)
                        .map(|(a, b)| other.segment_distance(a, b, false))
                        .fold(f64::INFINITY, f64::min)
                }
                _ => 0.0,
            };
        }
        match (self, other) {
            (Disc { cx, cy, r }, _) => (other.distance(c(*cx, *cy), false) - r).max(0.0),
            (_, Disc { .. }) => other.set_distance(false, self, false),
            (Point { x, y }, _) => other.distance(c(*x, *y), false),
            (_, Point { .. }) => other.set_distance(false, self, false),
            (Segment { x1, y1, x2, y2 }, _) => other.segment_distance(c(*x1, *y1), c(*x2, *y2), false),
            (_, Segment { .. }) => other.set_distance(false, self, false),
            (Polyline { .. }, Polyline { .. }) => {
                let a = self.polygon();
                let b = other.polygon();
                if point_in_polygon(a[0], &b) || point_in_polygon(b[0], &a) {
                    return 0.0;
                }
                polygon_edges(&a)
                    .map(|(p, q)| other.segment_distance(p, q, false))
                    .fold(f64::INFINITY, f64::min)
            }
            _ => 0.0,
        }
    }

    /// Axis-aligned bounding box `(min, max)`; `None` for a half-plane.
    pub fn bbox(&self) -> Option<(Complex64, Complex64)> {
        match self {
            BoundaryComponent::Disc { cx, cy, r } => Some((c(cx - r, cy - r), c(cx + r, cy + r))),
            BoundaryComponent::Segment { x1, y1, x2, y2 } => {
                Some((c(x1.min(*x2), y1.min(*y2)), c(x1.max(*x2), y1.max(*y2))))
            }
            BoundaryComponent::Point { x, y } => Some((c(*x, *y), c(*x, *y))),
            BoundaryComponent::Polyline { points } => {
                let mut lo = c(f64::INFINITY, f64::INFINITY);
                let mut hi = c(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for p in points {
                    lo = c(lo.re.min(p[0]), lo.im.min(p[1]));
                    hi = c(hi.re.max(p[0]), hi.im.max(p[1]));
                }
                Some((lo, hi))
            }
            BoundaryComponent::Halfplane { .. } => None,
        }
    }

    /// A representative point of the component.
    pub fn anchor(&self) -> Complex64 {
        match self {
            BoundaryComponent::Disc { cx, cy, .. } => c(*cx, *cy),
            BoundaryComponent::Segment { x1, y1, x2, y2 } => c(0.5 * (x1 + x2), 0.5 * (y1 + y2)),
            BoundaryComponent::Point { x, y } => c(*x, *y),
            BoundaryComponent::Polyline { points } => c(points[0][0], points[0][1]),
            BoundaryComponent::Halfplane { px, py, .. } => c(*px, *py),
        }
    }

    /// `n` samples of the topological boundary as a closed loop. Segments
    /// are traversed on both sides (`z = m + h e^{ia} cos t`), points are a
    /// single sample and a half-plane yields its boundary line clipped to
    /// `[-extent, extent]` around the anchor.
    pub fn boundary_samples(&self, n: usize) -> Vec<Complex64> {
        let tau = std::f64::consts::TAU;
        match self {
            BoundaryComponent::Disc { cx, cy, r } => (0..n)
                .map(|k| c(*cx, *cy) + Complex64::from_polar(*r, tau * k as f64 / n as f64))
                .collect(),
            BoundaryComponent::Segment { x1, y1, x2, y2 } => {
                let a = c(*x1, *y1);
                let b = c(*x2, *y2);
                let m = (a + b) * 0.5;
                let h = (b - a) * 0.5;
                (0..n).map(|k| m + h * (tau * k as f64 / n as f64).cos()).collect()
            }
            BoundaryComponent::Point { x, y } => vec![c(*x, *y)],
            BoundaryComponent::Polyline { .. } => resample_closed_linear(&self.polygon(), n),
            BoundaryComponent::Halfplane { .. } => {
                let (p, nrm) = self.halfplane_frame().unwrap();
                let d = nrm * Complex64::new(0.0, 1.0);
                (0..n).map(|k| p + d * (-1.0 + 2.0 * k as f64 / (n.max(2) - 1) as f64)).collect()
            }
        }
    }
}

/// Resample a closed polygon at `n` points equally spaced in arclength.
pub fn resample_closed_linear(pts: &[Complex64], n: usize) -> Vec<Complex64> {
    let m = pts.len();
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for i in 0..m {
        let l = (pts[(i + 1) % m] - pts[i]).norm();
        cum.push(cum[i] + l);
    }
    let total = cum[m];
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for k in 0..n {
        let s = total * k as f64 / n as f64;
        while seg + 1 < m && cum[seg + 1] <= s {
            seg += 1;
        }
        let l = cum[seg + 1] - cum[seg];
        let t = if l > 0.0 { (s - cum[seg]) / l } else { 0.0 };
        out.push(pts[seg] + (pts[(seg + 1) % m] - pts[seg]) * t);
    }
    out
}
