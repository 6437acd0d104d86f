//! Geometric consequences of uniformity for the complementary components:
//! separation, bounded turning and counting of large components.

use std::collections::VecDeque;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::component::{dist_point_segment, point_in_polygon, BoundaryComponent};
use crate::curve::{convex_hull, point_set_diameter};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::sampling::rng;

/// Separation constant `2 (A + 1)^2`.
pub fn separation_constant(a: f64) -> f64 {
    2.0 * (a + 1.0) * (a + 1.0)
}

/// One pair of components in a separation check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationPair {
    pub i: usize,
    pub j: usize,
    pub min_diam: f64,
    pub dist: f64,
    pub ratio: f64,
    pub flagged: bool,
}

/// Result of checking `min(diam S_i, diam S_j) <= C dist(S_i, S_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub pairs: Vec<SeparationPair>,
    pub worst_ratio: f64,
    /// Constant the ratios are compared with: the separation constant at `A_est + 1`.
    pub threshold: f64,
    /// `A >= sqrt(ratio / 2) - 1` from the worst ratio.
    pub implied_a_lower: f64,
}

/// Lower bound on the uniformity constant implied by a diameter/distance ratio.
pub fn implied_a_lower(ratio: f64) -> f64 {
    ((ratio / 2.0).sqrt() - 1.0).max(0.0)
}

/// Compare every pair of components with the separation constant at `a_est + 1`.
pub fn verify_separation(dom: &DomainSpec, a_est: f64) -> SeparationReport {
    let g = dom.component_geometry();
    let threshold = separation_constant(a_est + 1.0);
    let n = dom.components.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let min_diam = g.diameters[i].min(g.diameters[j]);
            let dist = g.distances[i][j];
            let ratio = min_diam / dist;
            pairs.push(SeparationPair { i, j, min_diam, dist, ratio, flagged: ratio > threshold });
        }
    }
    let worst_ratio = pairs.iter().map(|p| p.ratio).fold(0.0, f64::max);
    SeparationReport { pairs, worst_ratio, threshold, implied_a_lower: implied_a_lower(worst_ratio) }
}

/// Bounded-turning estimate of one component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedTurningReport {
    pub l_est: f64,
    pub pairs: usize,
    /// Raster cell size (zero when the component is convex).
    pub cell: f64,
}

/// Raster cells per bounding-box side.
pub const RASTER: usize = 256;

struct Raster {
    lo: Complex64,
    cell: f64,
    nx: usize,
    ny: usize,
    inside: Vec<bool>,
}

impl Raster {
    fn new(pts: &[Complex64]) -> Raster {
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in pts {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        let cell = (hi.re - lo.re).max(hi.im - lo.im) / RASTER as f64;
        let nx = ((hi.re - lo.re) / cell).ceil() as usize + 1;
        let ny = ((hi.im - lo.im) / cell).ceil() as usize + 1;
        let n = pts.len();
        let reach = cell * std::f64::consts::FRAC_1_SQRT_2;
        let mut inside = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let z = lo + Complex64::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
                inside[j * nx + i] = point_in_polygon(z, pts)
                    || (0..n).any(|k| dist_point_segment(z, pts[k], pts[(k + 1) % n]) <= reach);
            }
        }
        Raster { lo, cell, nx, ny, inside }
    }

    fn center(&self, k: usize) -> Complex64 {
        self.lo + Complex64::new(((k % self.nx) as f64 + 0.5) * self.cell, ((k / self.nx) as f64 + 0.5) * self.cell)
    }

    fn cell_of(&self, z: Complex64) -> usize {
        let i = (((z.re - self.lo.re) / self.cell).floor().max(0.0) as usize).min(self.nx - 1);
        let j = (((z.im - self.lo.im) / self.cell).floor().max(0.0) as usize).min(self.ny - 1);
        j * self.nx + i
    }

    /// Cells of a 4-connected path from `s` to `t` through raster cells whose
    /// centers lie in the closed ball `B(m, rad)`.
    fn path_in_ball(&self, s: usize, t: usize, m: Complex64, rad: f64) -> Option<Vec<usize>> {
        let ok = |k: usize| self.inside[k] && ((self.center(k) - m).norm() <= rad || k == s || k == t);
        if !ok(s) || !ok(t) {
            return None;
        }
        let mut prev = vec![usize::MAX; self.inside.len()];
        let mut queue = VecDeque::from([s]);
        prev[s] = s;
        while let Some(k) = queue.pop_front() {
            if k == t {
                let mut path = vec![t];
                let mut c = t;
                while c != s {
                    c = prev[c];
                    path.push(c);
                }
                return Some(path);
            }
            let (i, j) = (k % self.nx, k / self.nx);
            let mut nb = Vec::with_capacity(4);
            if i > 0 {
                nb.push(k - 1);
            }
            if i + 1 < self.nx {
                nb.push(k + 1);
            }
            if j > 0 {
                nb.push(k - self.nx);
            }
            if j + 1 < self.ny {
                nb.push(k + self.nx);
            }
            for q in nb {
                if prev[q] == usize::MAX && ok(q) {
                    prev[q] = k;
                    queue.push_back(q);
                }
            }
        }
        None
    }
}

fn is_convex(pts: &[Complex64]) -> bool {
    convex_hull(pts).len() == pts.len()
}

/// Turning ratio of one pair on a polygon raster: the diameter of a
/// connecting raster path confined to the smallest feasible ball about the
/// midpoint, divided by `|x - y|`.
fn raster_pair(r: &Raster, x: Complex64, y: Complex64) -> f64 {
    let m = 0.5 * (x + y);
    let (s, t) = (r.cell_of(x), r.cell_of(y));
    let far = (r.nx.max(r.ny) as f64) * r.cell * 2.0;
    let mut lo = 0.5 * (x - y).norm();
    let mut hi = far;
    let mut best = match r.path_in_ball(s, t, m, hi) {
        Some(p) => p,
        None => return f64::INFINITY,
    };
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        match r.path_in_ball(s, t, m, mid) {
            Some(p) => {
                hi = mid;
                best = p;
            }
            None => lo = mid,
        }
        if hi - lo < 0.25 * r.cell {
            break;
        }
    }
    let mut pts: Vec<Complex64> = best.iter().map(|&k| r.center(k)).collect();
    pts.push(x);
    pts.push(y);
    point_set_diameter(&pts) / (x - y).norm()
}

/// Turning ratio of the pair `(x, y)` of points of `comp`.
pub fn bounded_turning_pair(comp: &BoundaryComponent, x: Complex64, y: Complex64) -> Result<f64> {
    match comp {
        BoundaryComponent::Point { .. } => Err(Error::DegenerateComponent),
        BoundaryComponent::Halfplane { .. } => Err(Error::Unsupported("bounded turning of a half-plane".into())),
        BoundaryComponent::Disc { .. } | BoundaryComponent::Segment { .. } => Ok(1.0),
        BoundaryComponent::Polyline { .. } => {
            let pts = comp.polygon();
            if is_convex(&pts) {
                return Ok(1.0);
            }
            Ok(raster_pair(&Raster::new(&pts), x, y))
        }
    }
}

fn sample_in_component(comp: &BoundaryComponent, r: &mut impl Rng) -> Complex64 {
    match comp {
        BoundaryComponent::Disc { cx, cy, r: rad } => {
            let rho = rad * r.gen::<f64>().sqrt();
            Complex64::new(*cx, *cy) + Complex64::from_polar(rho, r.gen_range(0.0..std::f64::consts::TAU))
        }
        BoundaryComponent::Segment { x1, y1, x2, y2 } => {
            let t = r.gen::<f64>();
            Complex64::new(x1 + t * (x2 - x1), y1 + t * (y2 - y1))
        }
        _ => {
            let (lo, hi) = comp.bbox().expect("bounded component");
            loop {
                let z = Complex64::new(r.gen_range(lo.re..=hi.re), r.gen_range(lo.im..=hi.im));
                if comp.contains(z, false) {
                    return z;
                }
            }
        }
    }
}

/// Largest turning ratio over `samples` seeded random pairs of points of `comp`.
pub fn verify_bounded_turning(comp: &BoundaryComponent, samples: usize, seed: u64) -> Result<BoundedTurningReport> {
    match comp {
        BoundaryComponent::Point { .. } => return Err(Error::DegenerateComponent),
        BoundaryComponent::Halfplane { .. } => return Err(Error::Unsupported("bounded turning of a half-plane".into())),
        _ => {}
    }
    let mut r = rng(seed);
    let raster = match comp {
        BoundaryComponent::Polyline { .. } if !is_convex(&comp.polygon()) => Some(Raster::new(&comp.polygon())),
        _ => None,
    };
    let mut l_est: f64 = 1.0;
    let mut pairs = 0;
    for _ in 0..samples {
        let x = sample_in_component(comp, &mut r);
        let y = sample_in_component(comp, &mut r);
        if (x - y).norm() == 0.0 {
            continue;
        }
        pairs += 1;
        if let Some(ras) = &raster {
            l_est = l_est.max(raster_pair(ras, x, y));
        }
    }
    Ok(BoundedTurningReport { l_est, pairs, cell: raster.map_or(0.0, |r| r.cell) })
}

/// Count of large components near the origin with packing bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub count: usize,
    pub indices: Vec<usize>,
    /// Largest `min diam / dist` over pairs of counted components.
    pub c_measured: f64,
    /// Packing bound `(1 + 2 C R / r)^2` with the measured constant.
    pub bound_measured: f64,
    /// Template bound `8 C^2 (1 + R^2 / r^2)` with the measured constant (at least 1/2).
    pub template_measured: f64,
    /// Template bound with the separation constant of the given `A`, if any.
    pub template_a: Option<f64>,
}

/// Count the components meeting `B(0, R)` with diameter greater than `r`.
pub fn count_large_components(dom: &DomainSpec, r: f64, big_r: f64, a: Option<f64>) -> Result<CountReport> {
    if !(r > 0.0 && big_r > 0.0) {
        return Err(Error::PreconditionFailed(format!("radii must be positive (r = {r}, R = {big_r})")));
    }
    let g = dom.component_geometry();
    let o = Complex64::new(0.0, 0.0);
    let indices: Vec<usize> = (0..dom.components.len())
        .filter(|&i| g.diameters[i] > r && dom.components[i].distance(o, dom.is_outer(i)) < big_r)
        .collect();
    let mut c_measured: f64 = 0.0;
    for (a_idx, &i) in indices.iter().enumerate() {
        for &j in &indices[a_idx + 1..] {
            c_measured = c_measured.max(g.diameters[i].min(g.diameters[j]) / g.distances[i][j]);
        }
    }
    let q = big_r / r;
    let template = |c: f64| 8.0 * c * c * (1.0 + q * q);
    Ok(CountReport {
        count: indices.len(),
        indices,
        c_measured,
        bound_measured: (1.0 + 2.0 * c_measured * q).powi(2),
        template_measured: template(c_measured.max(0.5)),
        template_a: a.map(|a| template(separation_constant(a))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn discs(list: &[(f64, f64, f64)]) -> DomainSpec {
        DomainSpec::new("discs", true, list.iter().map(|d| BoundaryComponent::disc(d.0, d.1, d.2)).collect()).unwrap()
    }

    #[test]
    fn separation_examples() {
        let rep = verify_separation(&discs(&[(0.0, 0.0, 1.0), (4.0, 0.0, 1.0)]), 1.0);
        assert_eq!(rep.worst_ratio, 1.0);
        let close = verify_separation(&discs(&[(0.0, 0.0, 1.0), (2.01, 0.0, 1.0)]), 1.0);
        assert!((close.worst_ratio - 200.0).abs() < 1e-6);
        assert!((close.implied_a_lower - 9.0).abs() < 1e-6);
        assert!(verify_separation(&discs(&[(0.0, 0.0, 1.0)]), 1.0).pairs.is_empty());
    }

    #[test]
    fn grid_count() {
        let mut list = Vec::new();
        for i in -1..=1 {
            for j in -1..=1 {
                list.push((3.0 * i as f64, 3.0 * j as f64, 0.5));
            }
        }
        let dom = discs(&list);
        let rep = count_large_components(&dom, 0.5, 10.0, None).unwrap();
        assert_eq!(rep.count, 9);
        assert!(rep.bound_measured >= 9.0 && rep.template_measured >= rep.bound_measured);
        assert_eq!(count_large_components(&dom, 1.5, 10.0, None).unwrap().count, 0);
        assert_eq!(count_large_components(&dom, 0.5, 1.0, None).unwrap().count, 1);
    }

    #[test]
    fn convex_components_turn_boundedly() {
        let d = BoundaryComponent::disc(0.0, 0.0, 1.0);
        assert_eq!(verify_bounded_turning(&d, 20, 3).unwrap().l_est, 1.0);
        let s = BoundaryComponent::segment(0.0, 0.0, 1.0, 1.0);
        assert_eq!(verify_bounded_turning(&s, 20, 3).unwrap().l_est, 1.0);
        let p = BoundaryComponent::point(0.0, 0.0);
        assert_eq!(verify_bounded_turning(&p, 20, 3).unwrap_err(), Error::DegenerateComponent);
    }

    #[test]
    fn u_shape_matches_geodesic_oracle() {
        let u = BoundaryComponent::polyline(vec![
            [0.0, 0.0],
            [3.0, 0.0],
            [3.0, 3.0],
            [2.0, 3.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 3.0],
            [0.0, 3.0],
        ]);
        let (x, y) = (c(0.9, 2.9), c(2.1, 2.9));
        // shortest path bends at the two reflex corners; its diameter is the oracle
        let oracle = point_set_diameter(&[x, c(1.0, 1.0), c(2.0, 1.0), y]) / (x - y).norm();
        let est = bounded_turning_pair(&u, x, y).unwrap();
        assert!((est / oracle - 1.0).abs() < 0.05, "{est} vs {oracle}");
    }
}
