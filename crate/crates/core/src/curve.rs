//! Polygonal curves with cumulative Euclidean and spherical arclength.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::spherical_segment_length;

/// A finite polygonal curve. Lengths are kept as cumulative tables so that
/// sub-arc lengths are O(1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct Curve {
    vertices: Vec<Complex64>,
    cum_len_e: Vec<f64>,
    cum_len_s: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<RawCurve> for Curve {
    type Error = Error;
    fn try_from(r: RawCurve) -> Result<Self> {
        Curve::new(r.vertices.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

impl From<Curve> for RawCurve {
    fn from(c: Curve) -> Self {
        RawCurve { vertices: c.vertices.iter().map(|z| [z.re, z.im]).collect() }
    }
}

/// Diameter of a finite point set via its convex hull.
pub fn point_set_diameter(pts: &[Complex64]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let hull = convex_hull(pts);
    let mut d: f64 = 0.0;
    for i in 0..hull.len() {
        for j in (i + 1)..hull.len() {
            d = d.max((hull[i] - hull[j]).norm());
        }
    }
    d
}

/// Andrew's monotone chain; returns hull vertices counter-clockwise.
pub fn convex_hull(pts: &[Complex64]) -> Vec<Complex64> {
    let mut p: Vec<Complex64> = pts.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut lower: Vec<Complex64> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl Curve {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidDomain("a curve needs at least one vertex".into()));
        }
        if vertices.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDomain("curve vertices must be finite".into()));
        }
        let mut cum_len_e = Vec::with_capacity(vertices.len());
        let mut cum_len_s = Vec::with_capacity(vertices.len());
        cum_len_e.push(0.0);
        cum_len_s.push(0.0);
        for w in vertices.windows(2) {
            cum_len_e.push(cum_len_e.last().unwrap() + (w[1] - w[0]).norm());
            cum_len_s.push(cum_len_s.last().unwrap() + spherical_segment_length(w[0], w[1]));
        }
        Ok(Curve { vertices, cum_len_e, cum_len_s })
    }

    /// The straight segment from `a` to `b`.
    pub fn segment(a: Complex64, b: Complex64) -> Self {
        Curve::new(vec![a, b]).expect("finite endpoints")
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.vertices.last().unwrap()
    }

    pub fn cum_len_e(&self) -> &[f64] {
        &self.cum_len_e
    }

    pub fn cum_len_s(&self) -> &[f64] {
        &self.cum_len_s
    }

    /// Euclidean length.
    pub fn length(&self) -> f64 {
        *self.cum_len_e.last().unwrap()
    }

    /// Spherical length.
    pub fn length_spherical(&self) -> f64 {
        *self.cum_len_s.last().unwrap()
    }

    /// Diameter of the trace.
    pub fn diameter(&self) -> f64 {
        point_set_diameter(&self.vertices)
    }

    pub fn reversed(&self) -> Curve {
        let mut v = self.vertices.clone();
        v.reverse();
        Curve::new(v).unwrap()
    }

    /// `self` followed by `other`; a repeated junction vertex is dropped.
    pub fn concat(&self, other: &Curve) -> Curve {
        let mut v = self.vertices.clone();
        let skip = usize::from(other.start() == self.end());
        v.extend_from_slice(&other.vertices[skip..]);
        Curve::new(v).unwrap()
    }

    /// Point at Euclidean arclength `s` from the start.
    pub fn point_at(&self, s: f64) -> Complex64 {
        let total = self.length();
        if self.vertices.len() == 1 || s <= 0.0 {
            return self.start();
        }
        if s >= total {
            return self.end();
        }
        let k = self.cum_len_e.partition_point(|&c| c <= s).max(1) - 1;
        let l = self.cum_len_e[k + 1] - self.cum_len_e[k];
        let t = if l > 0.0 { (s - self.cum_len_e[k]) / l } else { 0.0 };
        self.vertices[k] + (self.vertices[k + 1] - self.vertices[k]) * t
    }

    /// `n >= 2` points equally spaced in Euclidean arclength.
    pub fn resample(&self, n: usize) -> Curve {
        let total = self.length();
        let pts = (0..n).map(|k| self.point_at(total * k as f64 / (n - 1) as f64)).collect();
        Curve::new(pts).unwrap()
    }

    /// Subdivide every edge so that no edge is longer than `max_len`.
    pub fn refined(&self, max_len: f64) -> Curve {
        let mut v = vec![self.start()];
        for w in self.vertices.windows(2) {
            let m = ((w[1] - w[0]).norm() / max_len).ceil().max(1.0) as usize;
            for j in 1..=m {
                v.push(w[0] + (w[1] - w[0]) * (j as f64 / m as f64));
            }
        }
        Curve::new(v).unwrap()
    }

    /// Diameters of the initial sub-curves `γ[0..=k]` for every vertex `k`.
    pub fn prefix_diameters(&self) -> Vec<f64> {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n);
        let mut d: f64 = 0.0;
        for k in 0..n {
            for j in 0..k {
                d = d.max((self.vertices[k] - self.vertices[j]).norm());
            }
            out.push(d);
        }
        out
    }

    /// Diameters of the final sub-curves `γ[k..]` for every vertex `k`.
    pub fn suffix_diameters(&self) -> Vec<f64> {
        let mut d = self.reversed().prefix_diameters();
        d.reverse();
        d
    }
}
