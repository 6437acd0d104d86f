//! Comparison of the Euclidean and spherical quasihyperbolic metrics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{DomainSpec, Flavor};
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Weighting, Window};

/// One pair of the comparison check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub x: Complex64,
    pub y: Complex64,
    pub k_euclidean: f64,
    pub k_spherical: f64,
    pub ratio: f64,
}

/// Outcome of checking `c_lo k^e <= k^s <= c_hi k^e` on sampled pairs, where
/// `c_lo = 1 / (pi sqrt 2)` and `c_hi = 3 (2 + D)` with `D` the Euclidean
/// distance from the origin to the complement of the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub d_origin: f64,
    pub lower_constant: f64,
    pub upper_constant: f64,
    pub slack: f64,
    pub resolution: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub records: Vec<ComparisonRecord>,
    /// Indices of records outside the slackened bounds.
    pub violations: Vec<usize>,
}

/// Lower comparison constant `1 / (pi sqrt 2)`.
pub fn lower_comparison_constant() -> f64 {
    1.0 / (std::f64::consts::PI * std::f64::consts::SQRT_2)
}

/// Upper comparison constant `3 (2 + D)`.
pub fn upper_comparison_constant(d_origin: f64) -> f64 {
    3.0 * (2.0 + d_origin)
}

/// Euclidean distance from the origin to the complement of the domain in the sphere.
pub fn origin_distance(dom: &DomainSpec) -> f64 {
    let o = Complex64::new(0.0, 0.0);
    if dom.contains_finite(o) {
        dom.dist_euclidean(o)
    } else {
        0.0
    }
}

/// Check the two-sided comparison on `pairs` with multiplicative `slack`.
pub fn verify_comparison(dom: &DomainSpec, pairs: &[(Complex64, Complex64)], h: f64, slack: f64) -> Result<ComparisonReport> {
    if dom.contains_infinity {
        return Err(Error::InfinityInDomain);
    }
    if dom.components.is_empty() {
        return Err(Error::PreconditionFailed("the boundary must contain at least two points".into()));
    }
    let pts: Vec<Complex64> = pairs.iter().flat_map(|p| [p.0, p.1]).collect();
    let graph = MetricGraph::build(dom, h, Window::for_domain(dom, &pts))?;
    verify_comparison_on(&graph, pairs, slack)
}

/// As [`verify_comparison`] on a prebuilt graph.
pub fn verify_comparison_on(graph: &MetricGraph, pairs: &[(Complex64, Complex64)], slack: f64) -> Result<ComparisonReport> {
    let dom = graph.dom();
    if dom.contains_infinity {
        return Err(Error::InfinityInDomain);
    }
    let d_origin = origin_distance(dom);
    let lo = lower_comparison_constant();
    let hi = upper_comparison_constant(d_origin);
    let records: Vec<ComparisonRecord> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let ke = graph.shortest_path(x, y, Weighting::Qh(Flavor::Euclidean), None)?.value;
            let ks = graph.shortest_path(x, y, Weighting::Qh(Flavor::Spherical), None)?.value;
            Ok(ComparisonRecord { x, y, k_euclidean: ke, k_spherical: ks, ratio: ks / ke })
        })
        .collect::<Result<_>>()?;
    let finite: Vec<f64> = records.iter().map(|r| r.ratio).filter(|r| r.is_finite()).collect();
    let min_ratio = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let violations = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.ratio.is_finite() && (r.ratio < lo * (1.0 - slack) || r.ratio > hi * (1.0 + slack)))
        .map(|(i, _)| i)
        .collect();
    Ok(ComparisonReport {
        d_origin,
        lower_constant: lo,
        upper_constant: hi,
        slack,
        resolution: graph.resolution(),
        min_ratio,
        max_ratio,
        records,
        violations,
    })
}
