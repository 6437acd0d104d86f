//! Linear local connectivity checks.
//!
//! For a ball `B(a, r)` and points `x, y` of the domain inside it, the first
//! condition asks for a connecting curve inside `B(a, M r)`; for points
//! outside `B(a, r)` the second asks for one outside `B(a, r / M)`.
//!
//! Circle domains (discs, points and half-planes) are handled by the
//! concentric-arc construction: the chord is rerouted around every disc it
//! meets along a circle concentric with that disc, choosing the arc that stays
//! in the ball. The second condition is reduced to the first by the inversion
//! `w = 1 / (z - a)`, which maps circle domains to circle domains. Other
//! domains use constrained shortest paths on the sample graph.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::component::{dist_point_segment, BoundaryComponent};
use crate::domain::DomainSpec;
use crate::graph::{MetricGraph, Weighting, Window};
use crate::hyperbolicity::sampling_window;
use crate::sampling::rng;
use crate::uniformity::avoid::{detour_polygon, first_hit, reroute};

/// A test ball `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LlcBall {
    pub center: Complex64,
    pub radius: f64,
}

/// Which of the two conditions a check concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LlcKind {
    Inside,
    Outside,
}

/// A pair that could not be connected as required.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LlcFailure {
    pub ball: usize,
    pub kind: LlcKind,
    pub x: Complex64,
    pub y: Complex64,
    pub reason: String,
}

/// Outcome of an LLC check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LlcReport {
    pub factor: f64,
    pub method: &'static str,
    pub balls: usize,
    pub pairs_checked: usize,
    pub failures: Vec<LlcFailure>,
}

/// Sampling parameters for [`check_llc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlcOptions {
    /// Pairs per ball and per condition.
    pub pairs_per_ball: usize,
    pub seed: u64,
    /// Graph resolution for non-circle domains; defaults to 1/16 of the smallest radius.
    pub h: Option<f64>,
}

impl Default for LlcOptions {
    fn default() -> Self {
        LlcOptions { pairs_per_ball: 4, seed: 1, h: None }
    }
}

/// Whether every component is a disc, a point or a half-plane.
pub fn is_circle_domain(dom: &DomainSpec) -> bool {
    dom.components.iter().all(|c| {
        matches!(c, BoundaryComponent::Disc { .. } | BoundaryComponent::Point { .. } | BoundaryComponent::Halfplane { .. })
    })
}

/// Seeded random balls: centers uniform in the sampling window, radii
/// between 2% and 30% of its extent.
pub fn sample_balls(dom: &DomainSpec, n: usize, seed: u64) -> Vec<LlcBall> {
    let w = sampling_window(dom);
    let ext = w.extent();
    let mut r = rng(seed);
    (0..n)
        .map(|_| LlcBall {
            center: Complex64::new(r.gen_range(w.lo.re..=w.hi.re), r.gen_range(w.lo.im..=w.hi.im)),
            radius: ext * r.gen_range(0.02..=0.3),
        })
        .collect()
}

/// Rejection sample of a domain point with `lo < |z - a| < hi`, kept a
/// little away from the boundary.
fn sample_point(dom: &DomainSpec, a: Complex64, lo: f64, hi: f64, margin: f64, r: &mut impl Rng) -> Option<Complex64> {
    for _ in 0..2000 {
        let rho = r.gen_range(lo..hi);
        let z = a + Complex64::from_polar(rho, r.gen_range(0.0..std::f64::consts::TAU));
        if dom.contains_finite(z) && dom.dist_euclidean(z) > margin {
            return Some(z);
        }
    }
    None
}

/// Concentric-arc connection of `x` and `y` in a circle domain, staying in
/// the closed ball `B(a, big)` when possible.
fn circle_connect(dom: &DomainSpec, a: Complex64, big: f64, x: Complex64, y: Complex64) -> Option<Vec<Complex64>> {
    let geo = dom.component_geometry();
    let tol = big * (1.0 + 1e-12);
    let in_ball = |pts: &[Complex64]| pts.iter().all(|z| (z - a).norm() <= tol);
    let mut pts = vec![x, y];
    for _ in 0..=dom.components.len() {
        let Some(i) = first_hit(dom, &pts) else { break };
        let gap = (0..dom.components.len())
            .filter(|&j| j != i)
            .map(|j| geo.distances[i][j])
            .fold(f64::INFINITY, f64::min);
        let comp = &dom.components[i];
        let ends = comp.distance(x, dom.is_outer(i)).min(comp.distance(y, dom.is_outer(i)));
        let off = (1e-4 * big).min(0.5 * gap).min(0.5 * ends);
        let poly = detour_polygon(dom, i, &pts, off).ok()?;
        pts = reroute(&pts, &poly, &in_ball)?;
    }
    Some(pts)
}

fn polyline_inside(dom: &DomainSpec, pts: &[Complex64]) -> bool {
    pts.windows(2).all(|w| dom.segment_inside(w[0], w[1]))
}

/// Image of a generalized disc under `w = 1 / (z - a)`, given by its
/// boundary (circle `(c, rho)` or line through `p` with normal `n`) and an
/// interior point `t`.
fn invert_region(a: Complex64, circle: Option<(Complex64, f64)>, line: Option<(Complex64, Complex64)>, t: Complex64) -> BoundaryComponent {
    let inv = |z: Complex64| 1.0 / (z - a);
    let wt = inv(t);
    let (p, n, center, rad) = match (circle, line) {
        (Some((c, rho)), _) => {
            let d = c - a;
            let q = d.norm_sqr() - rho * rho;
            if q.abs() > 1e-14 * rho * rho {
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), d.conj() / q, rho / q.abs())
            } else {
                // circle through a: image is the line Re(d w) = 1/2
                (d.conj() / (2.0 * d.norm_sqr()), d.conj() / d.norm(), Complex64::new(0.0, 0.0), -1.0)
            }
        }
        (None, Some((p, n))) => {
            let t_off = ((p - a) * n.conj()).re;
            if t_off.abs() > 1e-14 {
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), n.conj() / (2.0 * t_off), 1.0 / (2.0 * t_off.abs()))
            } else {
                // line through a: image is a line through 0 with normal conj(n)
                (Complex64::new(0.0, 0.0), n.conj(), Complex64::new(0.0, 0.0), -1.0)
            }
        }
        _ => unreachable!(),
    };
    if rad > 0.0 {
        // a bounded image or, when the region contains `a`, an exterior
        // that the domain constructor recognizes as the outer boundary
        BoundaryComponent::disc(center.re, center.im, rad)
    } else {
        // half-plane; its normal must point away from the image region
        let inward = if ((wt - p) * n.conj()).re > 0.0 { -n } else { n };
        BoundaryComponent::halfplane(p.re, p.im, inward.re, inward.im)
    }
}

/// Image of a circle domain under `w = 1 / (z - a)`.
pub fn invert_circle_domain(dom: &DomainSpec, a: Complex64) -> crate::error::Result<DomainSpec> {
    let mut comps = Vec::new();
    let farthest = |cands: [Complex64; 3]| {
        cands.into_iter().max_by(|p, q| (p - a).norm().total_cmp(&(q - a).norm())).unwrap()
    };
    for (i, comp) in dom.components.iter().enumerate() {
        let img = match comp {
            BoundaryComponent::Disc { cx, cy, r } => {
                let c = Complex64::new(*cx, *cy);
                // an interior point of the complementary region, away from `a`
                let s = if dom.is_outer(i) { 3.0 * r } else { 0.5 * r };
                let t = farthest([c + s, c - s, c + Complex64::new(0.0, s)]);
                invert_region(a, Some((c, *r)), None, t)
            }
            BoundaryComponent::Halfplane { px, py, nx, ny } => {
                let p = Complex64::new(*px, *py);
                let n = Complex64::new(*nx, *ny);
                let n = n / n.norm();
                let s = 1.0 + (a - p).norm();
                let t = farthest([p - n * s, p - n * s + n * Complex64::new(0.0, s), p - n * s - n * Complex64::new(0.0, s)]);
                invert_region(a, None, Some((p, n)), t)
            }
            BoundaryComponent::Point { x, y } => {
                let z = Complex64::new(*x, *y);
                if z == a {
                    continue;
                }
                let w = 1.0 / (z - a);
                BoundaryComponent::point(w.re, w.im)
            }
            _ => return Err(crate::error::Error::Unsupported("inversion of a non-circle component".into())),
        };
        comps.push(img);
    }
    if !dom.contains_infinity && dom.outer().is_none() && !dom.components.iter().any(|c| matches!(c, BoundaryComponent::Halfplane { .. })) {
        comps.push(BoundaryComponent::point(0.0, 0.0));
    }
    DomainSpec::new(format!("{} inverted", dom.name), dom.contains_finite(a), comps)
}

/// Subdivide the `w`-polyline until consecutive preimages are close relative
/// to their distance from `a`, then map it back.
fn pull_back(a: Complex64, pts: &[Complex64]) -> Option<Vec<Complex64>> {
    let z = |w: Complex64| a + 1.0 / w;
    let mut out = vec![z(pts[0])];
    for s in pts.windows(2) {
        let mut stack = vec![(s[0], s[1], 0usize)];
        while let Some((p, q, depth)) = stack.pop() {
            if dist_point_segment(Complex64::new(0.0, 0.0), p, q) < 1e-300 {
                return None;
            }
            let (zp, zq) = (z(p), z(q));
            if depth < 24 && (zp - zq).norm() > 0.01 * (zp - a).norm().min((zq - a).norm()) {
                let m = 0.5 * (p + q);
                stack.push((m, q, depth + 1));
                stack.push((p, m, depth + 1));
            } else {
                out.push(zq);
            }
        }
    }
    Some(out)
}

/// Check both LLC conditions with factor `m` on the given balls.
pub fn check_llc(dom: &DomainSpec, balls: &[LlcBall], m: f64, opts: LlcOptions) -> crate::error::Result<LlcReport> {
    let circle = is_circle_domain(dom);
    let mut r = rng(opts.seed);
    let graph = if circle || balls.is_empty() {
        None
    } else {
        let rmin = balls.iter().map(|b| b.radius).fold(f64::INFINITY, f64::min);
        let mut pts = Vec::new();
        for b in balls {
            let s = 4.0 * b.radius;
            pts.push(b.center + Complex64::new(s, s));
            pts.push(b.center - Complex64::new(s, s));
        }
        Some(MetricGraph::build(dom, opts.h.unwrap_or(rmin / 16.0), Window::for_domain(dom, &pts))?)
    };
    let mut failures = Vec::new();
    let mut pairs_checked = 0;
    for (bi, ball) in balls.iter().enumerate() {
        let (a, rad) = (ball.center, ball.radius);
        let margin = 0.02 * rad;
        let inverted = if circle { Some(invert_circle_domain(dom, a)) } else { None };
        for kind in [LlcKind::Inside, LlcKind::Outside] {
            for _ in 0..opts.pairs_per_ball {
                let (lo, hi) = match kind {
                    LlcKind::Inside => (0.0, rad),
                    LlcKind::Outside => (rad * (1.0 + 1e-9), 3.0 * rad),
                };
                let (Some(x), Some(y)) = (
                    sample_point(dom, a, lo, hi, margin, &mut r),
                    sample_point(dom, a, lo, hi, margin, &mut r),
                ) else {
                    break;
                };
                pairs_checked += 1;
                let ok_segment = |p: Complex64, q: Complex64| match kind {
                    LlcKind::Inside => (p - a).norm() <= m * rad && (q - a).norm() <= m * rad,
                    LlcKind::Outside => dist_point_segment(a, p, q) >= rad / m,
                };
                if dom.segment_inside(x, y) && ok_segment(x, y) {
                    continue;
                }
                let outcome: std::result::Result<(), String> = if let Some(g) = &graph {
                    let filter = |p: Complex64, q: Complex64| ok_segment(p, q);
                    g.shortest_path(x, y, Weighting::Length, Some(&filter)).map(|_| ()).map_err(|e| e.to_string())
                } else {
                    let path = match kind {
                        LlcKind::Inside => circle_connect(dom, a, m * rad, x, y),
                        LlcKind::Outside => match inverted.as_ref().unwrap() {
                            Ok(img) => {
                                let inv = |z: Complex64| 1.0 / (z - a);
                                circle_connect(img, Complex64::new(0.0, 0.0), m / rad, inv(x), inv(y))
                                    .and_then(|w| pull_back(a, &w))
                            }
                            Err(_) => None,
                        },
                    };
                    match path {
                        None => Err("no concentric-arc connection".into()),
                        Some(p) if !polyline_inside(dom, &p) => Err("connection leaves the domain".into()),
                        Some(p) if !p.windows(2).all(|s| match kind {
                            LlcKind::Inside => ok_segment(s[0], s[1]),
                            LlcKind::Outside => dist_point_segment(a, s[0], s[1]) >= rad / m * (1.0 - 1e-9),
                        }) =>
                        {
                            Err("connection leaves the admissible ball region".into())
                        }
                        Some(_) => Ok(()),
                    }
                };
                if let Err(reason) = outcome {
                    failures.push(LlcFailure { ball: bi, kind, x, y, reason });
                }
            }
        }
    }
    Ok(LlcReport {
        factor: m,
        method: if circle { "concentric-arcs" } else { "graph" },
        balls: balls.len(),
        pairs_checked,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn two_discs() -> DomainSpec {
        DomainSpec::new(
            "two discs",
            true,
            vec![BoundaryComponent::disc(-1.5, 0.0, 1.0), BoundaryComponent::disc(1.5, 0.3, 0.7)],
        )
        .unwrap()
    }

    #[test]
    fn circle_domain_is_llc_with_factor_near_one() {
        let dom = two_discs();
        let balls = sample_balls(&dom, 100, 7);
        let rep = check_llc(&dom, &balls, 1.0 + 1e-6, LlcOptions::default()).unwrap();
        assert_eq!(rep.method, "concentric-arcs");
        assert!(rep.pairs_checked > 300);
        assert!(rep.failures.is_empty(), "{:?}", &rep.failures[..rep.failures.len().min(3)]);
    }

    #[test]
    fn inversion_maps_circles_to_circles() {
        let dom = two_discs();
        let a = c(0.1, 2.0);
        let img = invert_circle_domain(&dom, a).unwrap();
        for z in [c(0.0, 0.0), c(-1.5, 1.2), c(3.0, -2.0), c(1.5, 0.3), c(-1.5, 0.5)] {
            assert_eq!(dom.contains_finite(z), img.contains_finite(1.0 / (z - a)), "{z}");
        }
        // a inside a disc: that disc becomes the outer boundary
        let img = invert_circle_domain(&dom, c(-1.5, 0.2)).unwrap();
        assert!(!img.contains_infinity && img.outer().is_some());
        for z in [c(0.0, 0.0), c(-1.5, 1.2), c(3.0, -2.0), c(1.5, 0.3)] {
            assert_eq!(dom.contains_finite(z), img.contains_finite(1.0 / (z - c(-1.5, 0.2))), "{z}");
        }
    }

    #[test]
    fn slit_fails_small_factor_and_passes_large() {
        let dom = DomainSpec::new("slit", true, vec![BoundaryComponent::segment(-1.0, 0.0, 1.0, 0.0)]).unwrap();
        let balls = [LlcBall { center: c(0.0, 0.0), radius: 0.5 }];
        let opts = LlcOptions { pairs_per_ball: 12, seed: 3, h: Some(0.02) };
        let tight = check_llc(&dom, &balls, 1.0, opts).unwrap();
        assert!(tight.failures.iter().any(|f| f.kind == LlcKind::Inside));
        let loose = check_llc(&dom, &balls, 4.0, opts).unwrap();
        assert!(loose.failures.is_empty(), "{:?}", loose.failures);
    }

    #[test]
    fn ball_away_from_boundary_passes_by_chords() {
        let dom = two_discs();
        let balls = [LlcBall { center: c(0.0, 5.0), radius: 1.0 }];
        let rep = check_llc(&dom, &balls, 1.0, LlcOptions::default()).unwrap();
        assert!(rep.failures.is_empty());
    }
}
