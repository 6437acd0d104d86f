//! Passage between spherical and Euclidean geometry for domains whose
//! complement lies in a Euclidean ball `B(0, a)`: the distance comparison,
//! the curve surgery turning spherical inner uniform curves into Euclidean
//! ones, and empirical bi-Lipschitz probes of conformal maps in the
//! spherical quasihyperbolic metric.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::Curve;
use crate::domain::{DomainSpec, Flavor};
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Weighting};
use crate::koebe::ConformalMap;
use crate::point::spherical_to_infinity;
use crate::uniformity::{check_cigar, concatenate_with_cigar};

pub use crate::qh::{verify_comparison, verify_comparison_on, ComparisonReport};

/// Constant of the distance comparison: `max(1, pi a)`.
///
/// When the nearest complement point of `z` in the sphere is infinity the
/// ratio of the two spherical distances is at most `pi a`; otherwise it is 1.
pub fn distance_constant(a: f64) -> f64 {
    (std::f64::consts::PI * a).max(1.0)
}

/// Length comparison constant `(1 + 9 a^2) / 2`: `l_e <= K(a) l_s` for curves in `B(0, 3a)`.
pub fn length_constant(a: f64) -> f64 {
    0.5 * (1.0 + 9.0 * a * a)
}

/// Radius of the smallest closed ball about the origin containing the
/// finite complement (infinite if a half-plane or a bounded domain).
pub fn complement_radius(dom: &DomainSpec) -> f64 {
    if !dom.contains_infinity {
        return f64::INFINITY;
    }
    dom.components.iter().map(|c| c.farthest_from_origin()).fold(0.0, f64::max)
}

fn require_contained(dom: &DomainSpec, a: f64) -> Result<()> {
    if !(a > 0.0) {
        return Err(Error::PreconditionFailed(format!("radius must be positive, got {a}")));
    }
    if complement_radius(dom) > a * (1.0 + 1e-12) {
        return Err(Error::ComplementNotContained(a));
    }
    Ok(())
}

/// One sample of the distance comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRecord {
    pub z: Complex64,
    /// Spherical distance to the complement of the finite part (infinity included).
    pub sigma_finite: f64,
    /// Spherical distance to the complement of the domain in the sphere.
    pub sigma_sphere: f64,
    /// Euclidean distance to the finite complement.
    pub euclidean: f64,
    /// Whether each of the three inequalities of the chain holds.
    pub holds: [bool; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    pub a: f64,
    pub constant: f64,
    pub records: Vec<DistanceRecord>,
    pub violations: Vec<usize>,
}

/// Check, for samples `z` of the domain in `B(0, a)`, the chain
/// `dist_s(z, finite complement ∪ {∞}) <= dist_s(z, complement)
///  <= C(a) dist_s(z, finite complement ∪ {∞}) <= 2 C(a) dist_e(z, complement)`.
pub fn check_distance_lemma(dom: &DomainSpec, a: f64, samples: &[Complex64]) -> Result<DistanceReport> {
    require_contained(dom, a)?;
    let c = distance_constant(a);
    let rel = 1e-12;
    let records = samples
        .iter()
        .map(|&z| {
            if !dom.contains_finite(z) || z.norm() > a * (1.0 + 1e-12) {
                return Err(Error::PointOutsideDomain(format!("{z} (samples must lie in the domain and in B(0, {a}))")));
            }
            let sigma_sphere = dom.dist_spherical(z);
            let sigma_finite = sigma_sphere.min(spherical_to_infinity(z));
            let euclidean = dom.dist_euclidean(z);
            let holds = [
                sigma_finite <= sigma_sphere * (1.0 + rel),
                sigma_sphere <= c * sigma_finite * (1.0 + rel),
                c * sigma_finite <= 2.0 * c * euclidean * (1.0 + rel),
            ];
            Ok(DistanceRecord { z, sigma_finite, sigma_sphere, euclidean, holds })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = records.iter().enumerate().filter(|(_, r)| r.holds.contains(&false)).map(|(i, _)| i).collect();
    Ok(DistanceReport { a, constant: c, records, violations })
}

/// Which case of the surgery applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurgeryCase {
    /// Both endpoints outside `B(0, a)`: a curve around the ball.
    Case1,
    /// Both endpoints in `B(0, 3a)` and the curve stays in the closed ball.
    Case2a,
    /// Both endpoints in `B(0, 3a)`; the excursion outside is replaced by an arc.
    Case2b,
    /// One endpoint in `B(0, a)`, the other outside `B(0, 3a)`.
    Case3,
}

/// Replacement of a sub-curve by the minor arc of `|z| = 3a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcReplacement {
    pub z1: Complex64,
    pub z2: Complex64,
    /// Exact length of the arc.
    pub arc_length: f64,
    pub chord: f64,
    /// `arc_length <= (pi / 2) |z1 - z2|`.
    pub arc_bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurgeryReport {
    pub input: Curve,
    pub output: Curve,
    pub case: SurgeryCase,
    pub arcs: Vec<ArcReplacement>,
    pub a: f64,
    pub length_constant: f64,
    /// Euclidean length of the output, with arcs counted exactly.
    pub output_length: f64,
    pub input_spherical_length: f64,
    /// `output_length <= 2 K(a) l_s(input)` (recorded for case 2(b)).
    pub length_bound_holds: Option<bool>,
    /// Euclidean length-cigar constant of the output.
    pub cigar_constant: f64,
    /// Constant at which the two pieces of a case-3 output concatenate, if
    /// the concatenation check applies.
    pub concatenation_constant: Option<f64>,
}

/// Parameters of the crossings of `|z| = r` by the segment `[p, q]`.
fn circle_crossings(p: Complex64, q: Complex64, r: f64) -> Vec<f64> {
    let d = q - p;
    let a = d.norm_sqr();
    if a == 0.0 {
        return Vec::new();
    }
    let b = 2.0 * (p.re * d.re + p.im * d.im);
    let c = p.norm_sqr() - r * r;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    let mut roots = vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)];
    roots.retain(|t| (0.0..=1.0).contains(t));
    roots
}

/// First point where the curve meets `|z| = r`: vertex index before it and the point.
fn first_crossing(v: &[Complex64], r: f64) -> Option<(usize, Complex64)> {
    (0..v.len().saturating_sub(1)).find_map(|k| {
        let t = circle_crossings(v[k], v[k + 1], r).into_iter().reduce(f64::min)?;
        Some((k, v[k] + (v[k + 1] - v[k]) * t))
    })
}

/// Last point where the curve meets `|z| = r`: vertex index before it and the point.
fn last_crossing(v: &[Complex64], r: f64) -> Option<(usize, Complex64)> {
    (0..v.len().saturating_sub(1)).rev().find_map(|k| {
        let t = circle_crossings(v[k], v[k + 1], r).into_iter().reduce(f64::max)?;
        Some((k, v[k] + (v[k + 1] - v[k]) * t))
    })
}

/// Vertices of the minor arc of `|z| = |z1|` from `z1` to `z2` (both included)
/// and its exact length.
fn minor_arc(z1: Complex64, z2: Complex64) -> (Vec<Complex64>, f64) {
    let r = z1.norm();
    let t1 = z1.arg();
    let delta = (z2 / z1).arg();
    let steps = ((delta.abs() / (std::f64::consts::PI / 512.0)).ceil() as usize).max(1);
    let mut pts: Vec<Complex64> =
        (0..steps).map(|k| Complex64::from_polar(r, t1 + delta * k as f64 / steps as f64)).collect();
    pts[0] = z1;
    pts.push(z2);
    (pts, r * delta.abs())
}

/// A curve from `x` to `y` outside `B(0, min(|x|, |y|))`: the straight
/// segment if it clears `B(0, a)`, otherwise radial segments joined by the
/// minor arc of radius `max(|x|, |y|)`. Returns the vertices and the exact length.
fn route_around(x: Complex64, y: Complex64, a: f64) -> (Vec<Complex64>, f64) {
    if crate::component::dist_point_segment(Complex64::new(0.0, 0.0), x, y) > a {
        return (vec![x, y], (y - x).norm());
    }
    let rho = x.norm().max(y.norm());
    let (xo, yo) = (x * (rho / x.norm()), y * (rho / y.norm()));
    let (arc, arc_len) = minor_arc(xo, yo);
    let mut v = vec![x];
    v.extend(arc);
    v.push(y);
    v.dedup();
    (v, (xo - x).norm() + arc_len + (y - yo).norm())
}

/// Apply the spherical-to-Euclidean surgery to `curve` (from `x` to `y`) in
/// a domain whose complement lies in the closed ball `B(0, a)`.
pub fn spherical_to_euclidean_surgery(curve: &Curve, dom: &DomainSpec, a: f64) -> Result<SurgeryReport> {
    require_contained(dom, a)?;
    check_cigar(curve, dom, None)?;
    let (x, y) = (curve.start(), curve.end());
    let tol = 1e-9 * a;
    for z in [x, y] {
        if [a, 2.0 * a, 3.0 * a].iter().any(|r| (z.norm() - r).abs() <= tol) {
            return Err(Error::CaseUndetermined);
        }
    }
    let k = length_constant(a);
    let v = curve.vertices();
    let inside = |r: f64, z: Complex64| z.norm() < r;
    let (case, vertices, output_length, arcs, pieces) = if inside(3.0 * a, x) && inside(3.0 * a, y) {
        if v.iter().all(|z| z.norm() <= 3.0 * a) {
            (SurgeryCase::Case2a, v.to_vec(), curve.length(), Vec::new(), None)
        } else {
            let (k1, z1) = first_crossing(v, 3.0 * a).expect("the curve leaves the closed ball");
            let (k2, z2) = last_crossing(v, 3.0 * a).expect("the curve leaves the closed ball");
            let (arc, arc_length) = minor_arc(z1, z2);
            let chord = (z1 - z2).norm();
            let mut out: Vec<Complex64> = v[..=k1].to_vec();
            out.extend(arc);
            out.extend_from_slice(&v[k2 + 1..]);
            out.dedup();
            let head = Curve::new(v[..=k1].iter().copied().chain([z1]).collect())?.length();
            let tail = Curve::new([z2].into_iter().chain(v[k2 + 1..].iter().copied()).collect())?.length();
            let rep = ArcReplacement {
                z1,
                z2,
                arc_length,
                chord,
                arc_bound_holds: arc_length <= std::f64::consts::FRAC_PI_2 * chord * (1.0 + 1e-12),
            };
            (SurgeryCase::Case2b, out, head + arc_length + tail, vec![rep], None)
        }
    } else if !inside(a, x) && !inside(a, y) {
        let (out, len) = route_around(x, y, a);
        (SurgeryCase::Case1, out, len, Vec::new(), None)
    } else {
        let reversed = inside(a, y);
        let w: Vec<Complex64> = if reversed { v.iter().rev().copied().collect() } else { v.to_vec() };
        let (k1, z) = first_crossing(&w, 2.0 * a).ok_or(Error::CaseUndetermined)?;
        let mut head: Vec<Complex64> = w[..=k1].to_vec();
        head.push(z);
        head.dedup();
        let head_len = Curve::new(head.clone())?.length();
        let (route, route_len) = route_around(z, *w.last().unwrap(), a);
        let mut out = head.clone();
        out.extend_from_slice(&route[1..]);
        let mut pieces = (Curve::new(head)?, Curve::new(route)?);
        if reversed {
            out.reverse();
            pieces = (pieces.1.reversed(), pieces.0.reversed());
        }
        (SurgeryCase::Case3, out, head_len + route_len, Vec::new(), Some(pieces))
    };
    let output = Curve::new(vertices)?;
    let cigar_constant = check_cigar(&output, dom, None)?.a_length;
    let concatenation_constant = match &pieces {
        Some((g1, g2)) => {
            let c1 = check_cigar(g1, dom, None)?.a_diam;
            let c2 = check_cigar(g2, dom, None)?.a_diam;
            let c = c1.max(c2).max(1.0);
            concatenate_with_cigar(g1, g2, dom, c).ok().map(|r| r.a_diam)
        }
        None => None,
    };
    let input_spherical_length = curve.length_spherical();
    let length_bound_holds =
        (case == SurgeryCase::Case2b).then(|| output_length <= 2.0 * k * input_spherical_length * (1.0 + 1e-12));
    Ok(SurgeryReport {
        input: curve.clone(),
        output,
        case,
        arcs,
        a,
        length_constant: k,
        output_length,
        input_spherical_length,
        length_bound_holds,
        cigar_constant,
        concatenation_constant,
    })
}

/// Per-pair distortion of the spherical quasihyperbolic metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilipschitzRecord {
    pub x: Complex64,
    pub y: Complex64,
    pub k_source: f64,
    pub k_target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilipschitzReport {
    /// Largest of `k_target / k_source` and its reciprocal over the pairs.
    pub l_est: f64,
    pub resolution: f64,
    pub records: Vec<BilipschitzRecord>,
}

/// Estimate the bi-Lipschitz constant of `map` from `src` to `dst` in the
/// spherical quasihyperbolic metrics on the given pairs, at resolution `h`.
pub fn bilipschitz_probe(
    map: &(impl ConformalMap + Sync),
    src: &DomainSpec,
    dst: &DomainSpec,
    pairs: &[(Complex64, Complex64)],
    h: f64,
) -> Result<BilipschitzReport> {
    let images: Vec<(Complex64, Complex64)> = pairs.par_iter().map(|&(x, y)| (map.eval(x), map.eval(y))).collect();
    let src_pts: Vec<Complex64> = pairs.iter().flat_map(|p| [p.0, p.1]).collect();
    let dst_pts: Vec<Complex64> = images.iter().flat_map(|p| [p.0, p.1]).collect();
    let g_src = MetricGraph::for_points(src, h, &src_pts)?;
    let g_dst = MetricGraph::for_points(dst, h, &dst_pts)?;
    let w = Weighting::Qh(Flavor::Spherical);
    let records = pairs
        .par_iter()
        .zip(&images)
        .map(|(&(x, y), &(fx, fy))| {
            Ok(BilipschitzRecord {
                x,
                y,
                k_source: g_src.shortest_path(x, y, w, None)?.value,
                k_target: g_dst.shortest_path(fx, fy, w, None)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let l_est = records
        .iter()
        .filter(|r| r.k_source > 0.0 && r.k_target > 0.0)
        .map(|r| (r.k_target / r.k_source).max(r.k_source / r.k_target))
        .fold(1.0, f64::max);
    Ok(BilipschitzReport { l_est, resolution: h, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::BoundaryComponent;
    use crate::koebe::{FnMap, Identity};

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn disc_complement(r: f64) -> DomainSpec {
        DomainSpec::new("disc complement", true, vec![BoundaryComponent::disc(0.0, 0.0, r)]).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(length_constant(1.0), 5.0);
        assert_eq!(distance_constant(1.0), std::f64::consts::PI);
        assert_eq!(distance_constant(0.1), 1.0);
        assert_eq!(complement_radius(&disc_complement(0.5)), 0.5);
    }

    #[test]
    fn distance_lemma_examples() {
        let rep = check_distance_lemma(&disc_complement(0.5), 1.0, &[c(0.9, 0.0)]).unwrap();
        assert!(rep.violations.is_empty());
        let r = &rep.records[0];
        assert!((r.sigma_sphere - 2.0 * (0.9f64.atan() - 0.5f64.atan())).abs() < 1e-12);
        // nearest complement point is a point component: first inequality is tight
        let dom = DomainSpec::new("point", true, vec![BoundaryComponent::point(0.0, 0.0)]).unwrap();
        let rep = check_distance_lemma(&dom, 1.0, &[c(0.3, 0.4)]).unwrap();
        assert_eq!(rep.records[0].sigma_finite, rep.records[0].sigma_sphere);
        assert_eq!(check_distance_lemma(&disc_complement(2.0), 1.0, &[c(0.9, 0.0)]).unwrap_err(), Error::ComplementNotContained(1.0));
    }

    #[test]
    fn curve_inside_three_a_is_kept() {
        let dom = disc_complement(0.5);
        let curve = Curve::new(vec![c(1.2, 0.0), c(0.0, 2.0), c(-1.2, 0.0)]).unwrap();
        let rep = spherical_to_euclidean_surgery(&curve, &dom, 1.0).unwrap();
        assert_eq!(rep.case, SurgeryCase::Case2a);
        assert_eq!(rep.output, curve);
    }

    #[test]
    fn excursion_is_replaced_by_arc() {
        let dom = disc_complement(0.5);
        let curve = Curve::new(vec![c(1.2, 0.0), c(10.0, 0.0), c(10.0, 10.0), c(0.0, 10.0), c(0.0, 1.2)]).unwrap();
        let rep = spherical_to_euclidean_surgery(&curve, &dom, 1.0).unwrap();
        assert_eq!(rep.case, SurgeryCase::Case2b);
        assert!(rep.output.vertices().iter().all(|z| z.norm() <= 3.0 + 1e-12));
        assert_eq!((rep.output.start(), rep.output.end()), (curve.start(), curve.end()));
        let arc = &rep.arcs[0];
        assert!((arc.z1 - c(3.0, 0.0)).norm() < 1e-12 && (arc.z2 - c(0.0, 3.0)).norm() < 1e-12);
        assert!((arc.arc_length - 1.5 * std::f64::consts::PI).abs() < 1e-12 && arc.arc_bound_holds);
        assert_eq!(rep.length_bound_holds, Some(true));
    }

    #[test]
    fn antipodal_arc_attains_the_bound() {
        let dom = disc_complement(0.5);
        let curve = Curve::new(vec![c(1.5, 0.0), c(5.0, 0.0), c(5.0, 5.0), c(-5.0, 5.0), c(-5.0, 0.0), c(-1.5, 0.0)]).unwrap();
        let rep = spherical_to_euclidean_surgery(&curve, &dom, 1.0).unwrap();
        let arc = &rep.arcs[0];
        assert!((arc.chord - 6.0).abs() < 1e-12);
        assert!((arc.arc_length - std::f64::consts::FRAC_PI_2 * arc.chord).abs() < 1e-9);
    }

    #[test]
    fn far_endpoint_uses_case_three() {
        let dom = disc_complement(0.5);
        let curve = Curve::new(vec![c(0.8, 0.0), c(0.0, 5.0), c(-8.0, 1.0)]).unwrap();
        let rep = spherical_to_euclidean_surgery(&curve, &dom, 1.0).unwrap();
        assert_eq!(rep.case, SurgeryCase::Case3);
        assert_eq!((rep.output.start(), rep.output.end()), (curve.start(), curve.end()));
        assert!(rep.cigar_constant.is_finite());
        let back = spherical_to_euclidean_surgery(&curve.reversed(), &dom, 1.0).unwrap();
        assert_eq!(back.case, SurgeryCase::Case3);
        assert_eq!((back.output.start(), back.output.end()), (curve.end(), curve.start()));
    }

    #[test]
    fn endpoint_on_dividing_circle_is_undetermined() {
        let curve = Curve::new(vec![c(3.0, 0.0), c(1.0, 1.0)]).unwrap();
        assert_eq!(spherical_to_euclidean_surgery(&curve, &disc_complement(0.5), 1.0).unwrap_err(), Error::CaseUndetermined);
    }

    #[test]
    fn outside_endpoints_are_routed_around() {
        let dom = disc_complement(0.5);
        let curve = Curve::new(vec![c(2.2, 0.0), c(0.0, 2.5), c(-2.2, 0.0)]).unwrap();
        let rep = spherical_to_euclidean_surgery(&curve, &dom, 1.0).unwrap();
        assert_eq!(rep.case, SurgeryCase::Case2a);
        let curve = Curve::new(vec![c(4.0, 0.0), c(0.0, 5.0), c(-4.0, 0.1)]).unwrap();
        let rep = spherical_to_euclidean_surgery(&curve, &dom, 1.0).unwrap();
        assert_eq!(rep.case, SurgeryCase::Case1);
        assert!(rep.output.vertices().iter().all(|z| z.norm() >= 4.0 - 1e-12));
    }

    #[test]
    fn identity_and_inversion_are_spherical_isometries() {
        let ring = DomainSpec::new(
            "ring",
            false,
            vec![BoundaryComponent::disc(0.0, 0.0, 2.0), BoundaryComponent::disc(0.0, 0.0, 0.5)],
        )
        .unwrap();
        let pairs = [(c(0.8, 0.1), c(-0.3, 1.2)), (c(1.5, 0.0), c(0.0, 0.7))];
        let id = bilipschitz_probe(&Identity, &ring, &ring, &pairs, 5e-3).unwrap();
        assert!(id.l_est < 1.0 + 1e-12);
        let inv = FnMap(|z: Complex64| 1.0 / z, |w: Complex64| 1.0 / w);
        let rep = bilipschitz_probe(&inv, &ring, &ring, &pairs, 5e-3).unwrap();
        assert!(rep.l_est < 1.02, "{}", rep.l_est);
    }
}
