//! Length and diameter cigar conditions, uniform-curve search and cigar concatenation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::Curve;
use crate::domain::{DomainSpec, Flavor};
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Weighting, Window};
use crate::uniformity::inner::lambda_path;

/// Penalty ladder tried by the uniform-curve search.
pub const BETA_LADDER: [f64; 8] = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

/// Smallest cigar constants of a curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CigarReport {
    pub curve: Curve,
    /// Smallest `A` with `min(l(left), l(right)) <= A dist(point, boundary)`.
    pub a_length: f64,
    /// Smallest `A` with `min(d(left), d(right)) <= A dist(point, boundary)`.
    pub a_diam: f64,
    pub start: Complex64,
    pub end: Complex64,
    /// The constant the curve was checked against, if any.
    pub a_checked: Option<f64>,
    pub pass_length: Option<bool>,
    pub pass_diameter: Option<bool>,
}

/// A checked position on a curve: point, both side lengths and side diameters.
struct Position {
    z: Complex64,
    left_len: f64,
    right_len: f64,
    left_diam: f64,
    right_diam: f64,
}

fn positions(curve: &Curve) -> Vec<Position> {
    let v = curve.vertices();
    let n = v.len();
    let cum = curve.cum_len_e();
    let total = curve.length();
    let pre = curve.prefix_diameters();
    let suf = curve.suffix_diameters();
    let mut out: Vec<Position> = (0..n)
        .map(|k| Position {
            z: v[k],
            left_len: cum[k],
            right_len: total - cum[k],
            left_diam: pre[k].min(cum[k]),
            right_diam: suf[k].min(total - cum[k]),
        })
        .collect();
    let mids: Vec<Position> = (0..n.saturating_sub(1))
        .into_par_iter()
        .map(|k| {
            let m = 0.5 * (v[k] + v[k + 1]);
            let l = cum[k] + 0.5 * (cum[k + 1] - cum[k]);
            let ld = v[..=k].iter().map(|p| (p - m).norm()).fold(pre[k], f64::max);
            let rd = v[k + 1..].iter().map(|p| (p - m).norm()).fold(suf[k + 1], f64::max);
            // a subarc's diameter never exceeds its length; the clamp removes roundoff
            Position { z: m, left_len: l, right_len: total - l, left_diam: ld.min(l), right_diam: rd.min(total - l) }
        })
        .collect();
    out.extend(mids);
    out
}

fn ratio(side: f64, dist: f64) -> f64 {
    if side <= 0.0 {
        0.0
    } else if dist <= 0.0 {
        f64::INFINITY
    } else {
        side / dist
    }
}

/// Check that the curve runs in the domain; the two endpoints may lie on
/// the boundary. Returns the index of the first offending vertex.
fn check_inside(curve: &Curve, dom: &DomainSpec) -> Result<()> {
    let v = curve.vertices();
    let n = v.len();
    for (k, z) in v.iter().enumerate() {
        let sd = dom.signed_distance(*z);
        let endpoint = k == 0 || k + 1 == n;
        if sd < 0.0 || (!endpoint && sd == 0.0) {
            return Err(Error::CurveExitsDomain(k));
        }
    }
    for k in 0..n.saturating_sub(1) {
        let (mut a, mut b) = (v[k], v[k + 1]);
        let shrink = 1e-9 * (b - a);
        if k == 0 && dom.signed_distance(a) == 0.0 {
            a += shrink;
        }
        if k + 2 == n && dom.signed_distance(b) == 0.0 {
            b -= shrink;
        }
        if !dom.segment_inside(a, b) {
            return Err(Error::CurveExitsDomain(k));
        }
    }
    Ok(())
}

/// Smallest length- and diameter-cigar constants of `curve`, evaluated at
/// every vertex and edge midpoint, and whether they pass at `a`.
pub fn check_cigar(curve: &Curve, dom: &DomainSpec, a: Option<f64>) -> Result<CigarReport> {
    check_inside(curve, dom)?;
    let pos = positions(curve);
    let (a_length, a_diam) = pos
        .par_iter()
        .map(|p| {
            let d = dom.dist_euclidean(p.z);
            (ratio(p.left_len.min(p.right_len), d), ratio(p.left_diam.min(p.right_diam), d))
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    Ok(CigarReport {
        curve: curve.clone(),
        a_length,
        a_diam,
        start: curve.start(),
        end: curve.end(),
        a_checked: a,
        pass_length: a.map(|a| a_length <= a),
        pass_diameter: a.map(|a| a_diam <= a),
    })
}

/// Smallest spherical length-cigar constant: side lengths and boundary
/// distances both measured in the spherical metric.
pub fn spherical_length_cigar(curve: &Curve, dom: &DomainSpec) -> Result<f64> {
    check_inside(curve, dom)?;
    let v = curve.vertices();
    let cum = curve.cum_len_s();
    let total = curve.length_spherical();
    let mut worst: f64 = 0.0;
    for k in 0..v.len() {
        let side = cum[k].min(total - cum[k]);
        worst = worst.max(ratio(side, dom.dist_spherical(v[k])));
    }
    for k in 0..v.len().saturating_sub(1) {
        let m = 0.5 * (v[k] + v[k + 1]);
        let l = cum[k] + crate::point::spherical_segment_length(v[k], m);
        worst = worst.max(ratio(l.min(total - l), dom.dist_spherical(m)));
    }
    Ok(worst)
}

/// A candidate uniform curve for one pair of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformCurve {
    pub report: CigarReport,
    /// Length of the shortest connection found (inner length estimate).
    pub lambda: f64,
    /// Length of the selected curve divided by `lambda`.
    pub quasiconvexity: f64,
    /// Penalty that produced the selected curve (infinite for the
    /// quasihyperbolic geodesic).
    pub beta: f64,
    /// `max(a_length, quasiconvexity, 1)`: the inner uniformity constant
    /// certified by this curve.
    pub a_pair: f64,
}

/// Search for a curve from `a` to `b` with small cigar constant.
pub fn find_uniform_curve(dom: &DomainSpec, a: Complex64, b: Complex64, h: f64) -> Result<UniformCurve> {
    let graph = MetricGraph::build(dom, h, Window::for_domain(dom, &[a, b]))?;
    find_uniform_curve_on(&graph, a, b)
}

/// As [`find_uniform_curve`] on a prebuilt graph. Candidates are shortest
/// paths for each penalty of the ladder; the one with the smallest pair
/// constant wins.
pub fn find_uniform_curve_on(graph: &MetricGraph, a: Complex64, b: Complex64) -> Result<UniformCurve> {
    let dom = graph.dom();
    let lam = lambda_path(graph, a, b)?;
    let lambda = lam.length().max(f64::MIN_POSITIVE);
    let mut best: Option<UniformCurve> = None;
    // the unpenalized candidate is the shortcut shortest path itself
    let mut candidates: Vec<(f64, Curve)> = vec![(BETA_LADDER[0], lam)];
    for &beta in &BETA_LADDER[1..] {
        let p = graph.shortest_path(a, b, Weighting::Penalized(beta), None)?;
        candidates.push((beta, Curve::new(p.path)?));
    }
    // quasihyperbolic geodesics of uniform domains are uniform curves;
    // reported with an infinite penalty
    let qh = graph.shortest_path(a, b, Weighting::Qh(Flavor::Euclidean), None)?;
    candidates.push((f64::INFINITY, Curve::new(qh.path)?));
    for (beta, curve) in candidates {
        let report = check_cigar(&curve, dom, None)?;
        let q = curve.length() / lambda;
        let a_pair = report.a_length.max(q).max(1.0);
        if best.as_ref().map_or(true, |b| a_pair < b.a_pair) {
            best = Some(UniformCurve { report, lambda, quasiconvexity: q, beta, a_pair });
        }
    }
    Ok(best.expect("ladder is nonempty"))
}

/// Empirical inner uniformity constant over sampled pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityEstimate {
    pub a_est: f64,
    pub table: Vec<UniformCurve>,
}

/// Largest pair constant over `pairs`, all evaluated on one graph.
pub fn estimate_uniformity(dom: &DomainSpec, pairs: &[(Complex64, Complex64)], h: f64) -> Result<UniformityEstimate> {
    let pts: Vec<Complex64> = pairs.iter().flat_map(|p| [p.0, p.1]).collect();
    let graph = MetricGraph::build(dom, h, Window::for_domain(dom, &pts))?;
    estimate_uniformity_on(&graph, pairs)
}

/// As [`estimate_uniformity`] on a prebuilt graph.
pub fn estimate_uniformity_on(graph: &MetricGraph, pairs: &[(Complex64, Complex64)]) -> Result<UniformityEstimate> {
    let table: Vec<UniformCurve> = pairs.par_iter().map(|&(a, b)| find_uniform_curve_on(graph, a, b)).collect::<Result<_>>()?;
    let a_est = table.iter().map(|t| t.a_pair).fold(1.0, f64::max);
    Ok(UniformityEstimate { a_est, table })
}

/// Join two diameter cigars at their common point and check the result at
/// the constant `(2A + 1) A`.
pub fn concatenate_with_cigar(g1: &Curve, g2: &Curve, dom: &DomainSpec, a: f64) -> Result<CigarReport> {
    let x0 = g1.end();
    let scale = 1.0 + x0.norm();
    if (g2.start() - x0).norm() > 1e-12 * scale {
        return Err(Error::PreconditionFailed(format!(
            "first curve ends at {x0} but second starts at {}",
            g2.start()
        )));
    }
    for (name, g) in [("first", g1), ("second", g2)] {
        let r = check_cigar(g, dom, Some(a))?;
        if r.pass_diameter != Some(true) {
            return Err(Error::PreconditionFailed(format!(
                "{name} curve is not a diameter cigar at A = {a} (needs {})",
                r.a_diam
            )));
        }
    }
    let need = g1.diameter().min(g2.diameter()) / a;
    let have = dom.dist_euclidean(x0);
    if have < need {
        return Err(Error::PreconditionFailed(format!(
            "dist(x0, boundary) = {have} < min(d(g1), d(g2)) / A = {need}"
        )));
    }
    let joined = g1.concat(g2);
    check_cigar(&joined, dom, Some((2.0 * a + 1.0) * a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::BoundaryComponent;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn upper() -> DomainSpec {
        DomainSpec::new("upper", false, vec![BoundaryComponent::halfplane(0.0, 0.0, 0.0, 1.0)]).unwrap()
    }

    #[test]
    fn horizontal_segment_in_halfplane() {
        let g = Curve::segment(c(0.0, 1.0), c(1.0, 1.0));
        let r = check_cigar(&g, &upper(), Some(1.0)).unwrap();
        assert_eq!(r.a_length, 0.5);
        assert_eq!(r.pass_length, Some(true));
        assert_eq!(r.pass_diameter, Some(true));
    }

    #[test]
    fn touching_boundary_fails() {
        let dom = upper();
        let g = Curve::new(vec![c(0.0, 1.0), c(1.0, 0.0), c(2.0, 1.0)]).unwrap();
        assert!(matches!(check_cigar(&g, &dom, None), Err(Error::CurveExitsDomain(1))));
        let dom2 = DomainSpec::new("ext", true, vec![BoundaryComponent::point(1.0, 0.0)]).unwrap();
        let g2 = Curve::new(vec![c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(matches!(check_cigar(&g2, &dom2, None), Err(Error::CurveExitsDomain(0))));
    }

    #[test]
    fn endpoint_on_boundary_is_allowed() {
        let g = Curve::segment(c(0.0, 0.0), c(0.0, 1.0));
        let r = check_cigar(&g, &upper(), None).unwrap();
        assert!(r.a_length.is_finite());
    }

    #[test]
    fn concatenation_in_halfplane() {
        let dom = upper();
        let g1 = Curve::segment(c(-1.0, 10.0), c(0.0, 10.0));
        let g2 = Curve::segment(c(0.0, 10.0), c(1.0, 10.0));
        let r = concatenate_with_cigar(&g1, &g2, &dom, 1.0).unwrap();
        assert_eq!(r.a_checked, Some(3.0));
        assert_eq!(r.pass_diameter, Some(true));
        // both pieces are cigars at A = 5 but the junction is too close to the boundary
        let g3 = Curve::segment(c(0.0, 5.0), c(0.0, 0.1));
        let g4 = Curve::segment(c(0.0, 0.1), c(1.0, 0.1));
        match concatenate_with_cigar(&g3, &g4, &dom, 5.0) {
            Err(Error::PreconditionFailed(msg)) => assert!(msg.contains("dist(x0")),
            other => panic!("{other:?}"),
        }
    }
}
