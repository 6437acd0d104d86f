//! Rerouting a curve around small complementary components.
//!
//! Each component met by the curve is enclosed by a polygon `P` lying just
//! outside it: an inscribed polygon of a concentric circle for discs, and an
//! inscribed polygon of the convex hull thickened by the offset otherwise.
//! The section of the curve between its first and last crossing of `P` is
//! replaced by one of the two arcs of `P`.

use num_complex::Complex64;

use crate::component::{point_in_polygon, BoundaryComponent};
use crate::curve::{convex_hull, Curve};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};

/// Number of offset halvings tried before a detour is declared blocked.
const MAX_HALVINGS: usize = 40;

/// Angular step whose chord sagitta on a circle of radius `rad` stays
/// below half of `off`.
fn angular_step(rad: f64, off: f64) -> f64 {
    let c = 1.0 - 0.5 * off / rad;
    if c <= -1.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        (2.0 * c.acos()).min(std::f64::consts::FRAC_PI_4)
    }
}

fn arc(center: Complex64, rad: f64, from: f64, sweep: f64, off: f64, out: &mut Vec<Complex64>) {
    let n = (sweep / angular_step(rad, off)).ceil().max(1.0) as usize;
    for k in 0..=n {
        out.push(center + Complex64::from_polar(rad, from + sweep * k as f64 / n as f64));
    }
}

/// Closed polygon (counter-clockwise, vertices on the offset curve) whose
/// interior contains the bounded component `comp` and whose edges keep a
/// distance between `off / 2` and `off` from it.
pub fn loop_polygon(comp: &BoundaryComponent, off: f64) -> Vec<Complex64> {
    let tau = std::f64::consts::TAU;
    let mut out = Vec::new();
    if let BoundaryComponent::Disc { cx, cy, r } = comp {
        arc(Complex64::new(*cx, *cy), r + off, 0.0, tau, off, &mut out);
        out.pop();
        return out;
    }
    let hull = convex_hull(&match comp {
        BoundaryComponent::Segment { x1, y1, x2, y2 } => vec![Complex64::new(*x1, *y1), Complex64::new(*x2, *y2)],
        _ => vec![comp.anchor()].into_iter().chain(comp.polygon()).collect(),
    });
    let n = hull.len();
    if n == 1 {
        arc(hull[0], off, 0.0, tau, off, &mut out);
        out.pop();
        return out;
    }
    let outward = |e: Complex64| e / e.norm() * Complex64::new(0.0, -1.0);
    for k in 0..n {
        let e_in = hull[k] - hull[(k + n - 1) % n];
        let e_out = hull[(k + 1) % n] - hull[k];
        let a0 = outward(e_in).arg();
        let mut sweep = outward(e_out).arg() - a0;
        while sweep < 0.0 {
            sweep += tau;
        }
        if sweep > std::f64::consts::PI + 1e-12 {
            sweep -= tau;
        }
        arc(hull[k], off, a0, sweep.max(0.0), off, &mut out);
    }
    out.dedup();
    out
}

/// Crossing of the curve segment `[a, b]` with the polygon edge `[c, d]`:
/// parameters along both segments.
fn crossing(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let den = r.re * s.im - r.im * s.re;
    if den == 0.0 {
        return None;
    }
    let q = c - a;
    let t = (q.re * s.im - q.im * s.re) / den;
    let u = (q.re * r.im - q.im * r.re) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((t, u))
}

fn polyline_length(pts: &[Complex64]) -> f64 {
    pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Replace the section of `pts` between its first and last crossing of the
/// closed polygon `poly` by an arc of `poly`. The endpoints of `pts` must lie
/// outside `poly`. `prefer` ranks the two candidate arcs (including the
/// crossing points); the first one it accepts wins, else the shorter.
pub(crate) fn reroute(
    pts: &[Complex64],
    poly: &[Complex64],
    prefer: &dyn Fn(&[Complex64]) -> bool,
) -> Option<Vec<Complex64>> {
    let m = poly.len();
    let mut first: Option<(usize, f64, usize, Complex64)> = None;
    let mut last: Option<(usize, f64, usize, Complex64)> = None;
    for i in 0..pts.len() - 1 {
        for j in 0..m {
            if let Some((t, _)) = crossing(pts[i], pts[i + 1], poly[j], poly[(j + 1) % m]) {
                let z = pts[i] + (pts[i + 1] - pts[i]) * t;
                let key = (i, t);
                if first.map_or(true, |f| (f.0, f.1) > key) {
                    first = Some((i, t, j, z));
                }
                if last.map_or(true, |l| (l.0, l.1) < key) {
                    last = Some((i, t, j, z));
                }
            }
        }
    }
    let ((i1, _, j1, e1), (i2, _, j2, e2)) = (first?, last?);
    let mut forward = vec![e1];
    let mut j = j1;
    while j != j2 {
        j = (j + 1) % m;
        forward.push(poly[j]);
    }
    forward.push(e2);
    let mut backward = vec![e1];
    let mut j = j1;
    if j1 != j2 {
        loop {
            backward.push(poly[j]);
            j = (j + m - 1) % m;
            if j == j2 {
                break;
            }
        }
    } else {
        // the other way round the whole polygon
        for k in 0..m {
            backward.push(poly[(j1 + m - k) % m]);
        }
        backward.push(poly[(j1 + 1) % m]);
    }
    backward.push(e2);
    let (short, long) = if polyline_length(&forward) <= polyline_length(&backward) {
        (forward, backward)
    } else {
        (backward, forward)
    };
    let chosen = if prefer(&short) || !prefer(&long) { short } else { long };
    let mut out = pts[..=i1].to_vec();
    out.extend(chosen);
    out.extend_from_slice(&pts[i2 + 1..]);
    out.dedup();
    Some(out)
}

/// First component met by the polyline, in curve order.
pub(crate) fn first_hit(dom: &DomainSpec, pts: &[Complex64]) -> Option<usize> {
    pts.windows(2).find_map(|w| dom.components_hit(w[0], w[1]).first().copied())
}

/// Detour around component `i`: offset polygon that keeps clear of all
/// other components and keeps the curve endpoints outside, with the offset
/// halved until it fits.
pub(crate) fn detour_polygon(dom: &DomainSpec, i: usize, pts: &[Complex64], off0: f64) -> Result<Vec<Complex64>> {
    let comp = &dom.components[i];
    let ends = [pts[0], pts[pts.len() - 1]];
    let mut off = off0;
    for _ in 0..MAX_HALVINGS {
        let poly = loop_polygon(comp, off);
        let m = poly.len();
        let clear = (0..dom.components.len()).filter(|&j| j != i).all(|j| {
            (0..m).all(|k| dom.components[j].segment_distance(poly[k], poly[(k + 1) % m], dom.is_outer(j)) > 0.0)
        });
        if clear && ends.iter().all(|&z| !point_in_polygon(z, &poly)) {
            return Ok(poly);
        }
        off *= 0.5;
    }
    Err(Error::DetourBlocked(i))
}

/// Reroute `curve` so that it avoids every complementary component, each
/// of which must have diameter below `r`. The result stays in the
/// `r`-neighborhood of the input and its diameter grows by less than `2r`.
pub fn avoid_boundary(curve: &Curve, dom: &DomainSpec, r: f64) -> Result<Curve> {
    if !(r > 0.0) {
        return Err(Error::PreconditionFailed(format!("radius must be positive (r = {r})")));
    }
    let mut pts = curve.vertices().to_vec();
    for z in [curve.start(), curve.end()] {
        if !dom.contains_finite(z) || dom.dist_euclidean(z) <= 0.0 {
            return Err(Error::PointOutsideDomain(crate::point::PlanePoint::from(z).to_string()));
        }
    }
    let geo = dom.component_geometry();
    let mut hit: Vec<usize> = pts.windows(2).flat_map(|w| dom.components_hit(w[0], w[1])).collect();
    hit.sort_unstable();
    hit.dedup();
    let large: Vec<usize> = hit.iter().copied().filter(|&i| !(geo.diameters[i] < r)).collect();
    if !large.is_empty() {
        return Err(Error::LargeComponentHit(large));
    }
    let accept_all = |_: &[Complex64]| false;
    for _ in 0..=dom.components.len() {
        let Some(i) = first_hit(dom, &pts) else {
            return Curve::new(pts);
        };
        let gap = (0..dom.components.len())
            .filter(|&j| j != i)
            .map(|j| geo.distances[i][j])
            .fold(f64::INFINITY, f64::min);
        let ends = dom.components[i].distance(pts[0], false).min(dom.components[i].distance(pts[pts.len() - 1], false));
        let off = (0.25 * r).min(0.5 * (r - geo.diameters[i])).min(0.5 * gap).min(0.5 * ends);
        let poly = detour_polygon(dom, i, &pts, off)?;
        pts = reroute(&pts, &poly, &accept_all).ok_or(Error::DetourBlocked(i))?;
    }
    match first_hit(dom, &pts) {
        None => Curve::new(pts),
        Some(i) => Err(Error::DetourBlocked(i)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn inside_neighborhood(out: &Curve, input: &Curve, r: f64) -> bool {
        let v = input.vertices();
        out.vertices().iter().all(|&z| {
            v.windows(2).any(|w| crate::component::dist_point_segment(z, w[0], w[1]) < r)
        })
    }

    #[test]
    fn segment_around_one_small_disc() {
        let dom = DomainSpec::new("d", true, vec![BoundaryComponent::disc(0.0, 0.0, 0.25)]).unwrap();
        let seg = Curve::segment(c(-2.0, 0.0), c(2.0, 0.0));
        let out = avoid_boundary(&seg, &dom, 1.0).unwrap();
        assert!(first_hit(&dom, out.vertices()).is_none());
        assert!(out.diameter() < 2.0 + seg.diameter());
        assert!(inside_neighborhood(&out, &seg, 1.0));
    }

    #[test]
    fn large_component_is_reported() {
        let dom = DomainSpec::new("d", true, vec![BoundaryComponent::disc(0.0, 0.0, 1.0)]).unwrap();
        let seg = Curve::segment(c(-2.0, 0.0), c(2.0, 0.0));
        assert_eq!(avoid_boundary(&seg, &dom, 1.0).unwrap_err(), Error::LargeComponentHit(vec![0]));
    }

    #[test]
    fn three_discs_and_a_slit() {
        let dom = DomainSpec::new(
            "d",
            true,
            vec![
                BoundaryComponent::disc(-1.0, 0.0, 0.1),
                BoundaryComponent::disc(0.0, 0.05, 0.1),
                BoundaryComponent::disc(1.0, -0.05, 0.1),
                BoundaryComponent::segment(2.0, -0.2, 2.0, 0.2),
            ],
        )
        .unwrap();
        let seg = Curve::segment(c(-2.0, 0.0), c(3.0, 0.0));
        let out = avoid_boundary(&seg, &dom, 0.5).unwrap();
        assert!(first_hit(&dom, out.vertices()).is_none());
        assert!(inside_neighborhood(&out, &seg, 0.5));
        assert!(out.diameter() < 1.0 + seg.diameter());
    }

    #[test]
    fn untouched_curve_is_returned_as_is() {
        let dom = DomainSpec::new("d", true, vec![BoundaryComponent::disc(0.0, 5.0, 0.25)]).unwrap();
        let seg = Curve::segment(c(-2.0, 0.0), c(2.0, 0.0));
        assert_eq!(avoid_boundary(&seg, &dom, 1.0).unwrap(), seg);
    }
}
