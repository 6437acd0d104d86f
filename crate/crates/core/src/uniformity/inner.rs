//! Inner length metric and a factor-two bracket of the inner diameter metric.

use num_complex::Complex64;
use serde::Serialize;

use crate::curve::Curve;
use crate::domain::DomainSpec;
use crate::error::Result;
use crate::graph::{MetricGraph, Weighting, Window};

/// `lambda` is the length of a connecting curve found on the sample graph
/// (an upper estimate of the inner length distance); the inner diameter
/// distance lies in `[rho_lo, rho_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerDistances {
    pub lambda: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub lambda_path: Curve,
    pub rho_path: Curve,
}

/// Relative width at which the radius bisection stops.
const BISECTION_TOL: f64 = 1e-10;

/// Greedy visibility shortcut: from each kept vertex jump to the last
/// vertex of the run that is still seen along a straight segment.
pub fn shortcut_path(dom: &DomainSpec, pts: &[Complex64]) -> Vec<Complex64> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let mut out = vec![pts[0]];
    let mut i = 0;
    while i + 1 < pts.len() {
        let mut j = i + 1;
        while j + 1 < pts.len() && dom.segment_inside(pts[i], pts[j + 1]) {
            j += 1;
        }
        out.push(pts[j]);
        i = j;
    }
    out
}

/// Shortest Euclidean-length connection on the graph, tightened by visibility shortcuts.
pub fn lambda_path(graph: &MetricGraph, a: Complex64, b: Complex64) -> Result<Curve> {
    let dom = graph.dom();
    if dom.segment_inside(a, b) {
        return Ok(Curve::segment(a, b));
    }
    let p = graph.shortest_path(a, b, Weighting::Length, None)?;
    Curve::new(shortcut_path(dom, &p.path))
}

/// Inner distances between `a` and `b` on a graph built at resolution `h`.
pub fn inner_distances(dom: &DomainSpec, a: Complex64, b: Complex64, h: f64) -> Result<InnerDistances> {
    let graph = MetricGraph::build(dom, h, Window::for_domain(dom, &[a, b]))?;
    inner_distances_on(&graph, a, b)
}

/// As [`inner_distances`] on a prebuilt graph.
pub fn inner_distances_on(graph: &MetricGraph, a: Complex64, b: Complex64) -> Result<InnerDistances> {
    let dom = graph.dom();
    let lam = lambda_path(graph, a, b)?;
    let base = (a - b).norm();
    if dom.segment_inside(a, b) || a == b {
        let seg = Curve::new(vec![a, b])?;
        return Ok(InnerDistances { lambda: base, rho_lo: base, rho_hi: base, lambda_path: seg.clone(), rho_path: seg });
    }
    let connect = |d: f64| -> Option<Vec<Complex64>> {
        let inside = move |p: Complex64, q: Complex64| (p - a).norm() <= d && (q - a).norm() <= d;
        graph.shortest_path(a, b, Weighting::Length, Some(&inside)).ok().map(|r| r.path)
    };
    let mut d_fail = base;
    let mut d_succ = lam.vertices().iter().map(|p| (p - a).norm()).fold(base, f64::max);
    let mut best = match connect(base) {
        Some(p) => {
            d_succ = base;
            p
        }
        None => connect(d_succ).unwrap_or_else(|| lam.vertices().to_vec()),
    };
    while d_succ - d_fail > BISECTION_TOL * d_fail.max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (d_fail + d_succ);
        match connect(mid) {
            Some(p) => {
                d_succ = mid;
                best = p;
            }
            None => d_fail = mid,
        }
    }
    let rho_path = Curve::new(best)?;
    let rho_hi = rho_path.diameter().min(lam.diameter());
    // a shortcut curve may beat the graph's failure radius
    let rho_lo = d_fail.min(rho_hi);
    Ok(InnerDistances { lambda: lam.length(), rho_lo, rho_hi, lambda_path: lam, rho_path })
}
