//! Gromov hyperbolicity estimates from sampled quasihyperbolic distances.
//!
//! Every estimate here is a lower estimate of the true constant: it is a
//! maximum over finitely many sampled configurations.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{DomainSpec, Flavor};
use crate::error::Result;
use crate::graph::{MetricGraph, Weighting, Window};
use crate::sampling::{farthest_point_indices, random_points, rng};

/// Largest sample size scanned exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 40;
/// Number of random quadruples scanned above the exhaustive limit.
pub const RANDOM_TUPLES: usize = 1_000_000;

/// Hyperbolicity estimate of a domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaEstimate {
    pub delta_four_point: f64,
    pub delta_thin: Option<f64>,
    pub sample_size: usize,
    pub flavor: Flavor,
    pub resolution: f64,
    pub samples: Vec<Complex64>,
}

/// Sampling parameters for [`delta_four_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaOptions {
    pub seed: u64,
    /// Minimal boundary distance of samples, relative to the window extent.
    pub margin: f64,
    /// Candidate points per requested sample for farthest-point selection.
    pub oversampling: usize,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        DeltaOptions { seed: 1, margin: 0.02, oversampling: 20 }
    }
}

/// Gromov product `(x|y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2`.
pub fn gromov_product<P, F: Fn(&P, &P) -> f64>(d: F, x: &P, y: &P, w: &P) -> f64 {
    0.5 * (d(x, w) + d(y, w) - d(x, y))
}

/// Four-point defect of one quadruple: half the gap between the two largest
/// of the three pair-sums. It equals the largest violation of
/// `(x|y)_w >= min((x|z)_w, (y|z)_w)` over all labelings.
pub fn quadruple_delta(d: &[Vec<f64>], a: usize, b: usize, c: usize, e: usize) -> f64 {
    let mut s = [d[a][b] + d[c][e], d[a][c] + d[b][e], d[a][e] + d[b][c]];
    s.sort_by(|x, y| y.total_cmp(x));
    (0.5 * (s[0] - s[1])).max(0.0)
}

/// Four-point constant of a distance matrix: every quadruple when the
/// matrix is small, `RANDOM_TUPLES` seeded random quadruples otherwise.
pub fn four_point_delta(d: &[Vec<f64>], seed: u64) -> f64 {
    let m = d.len();
    if m < 4 {
        return 0.0;
    }
    if m <= EXHAUSTIVE_LIMIT {
        return (0..m)
            .into_par_iter()
            .map(|a| {
                let mut best: f64 = 0.0;
                for b in (a + 1)..m {
                    for c in (b + 1)..m {
                        for e in (c + 1)..m {
                            best = best.max(quadruple_delta(d, a, b, c, e));
                        }
                    }
                }
                best
            })
            .reduce(|| 0.0, f64::max);
    }
    let mut r = rng(seed);
    let mut best: f64 = 0.0;
    for _ in 0..RANDOM_TUPLES {
        let a = r.gen_range(0..m);
        let b = r.gen_range(0..m);
        let c = r.gen_range(0..m);
        let e = r.gen_range(0..m);
        best = best.max(quadruple_delta(d, a, b, c, e));
    }
    best
}

/// Default window for hyperbolicity sampling: the outer box for bounded
/// domains, otherwise the box of the components padded by its diameter.
pub fn sampling_window(dom: &DomainSpec) -> Window {
    if dom.is_bounded() {
        return Window::for_domain(dom, &[]);
    }
    match dom.bounded_bbox() {
        Some((lo, hi)) => Window::around(&[lo, hi], (hi - lo).norm().max(1.0)),
        None => Window::around(&[Complex64::new(0.0, 0.0)], 1.0),
    }
}

/// Well-spread sample points of the domain: farthest-point selection from
/// seeded random candidates away from the boundary.
pub fn spread_samples(dom: &DomainSpec, window: Window, m: usize, opts: DeltaOptions) -> Vec<Complex64> {
    let cand = random_points(dom, window, m * opts.oversampling.max(1), opts.margin * window.extent(), &mut rng(opts.seed));
    farthest_point_indices(&cand, m).into_iter().map(|i| cand[i]).collect()
}

/// Four-point estimate of the hyperbolicity constant from `m` spread samples.
pub fn delta_four_point(dom: &DomainSpec, m: usize, flavor: Flavor, h: f64, opts: DeltaOptions) -> Result<DeltaEstimate> {
    let window = sampling_window(dom);
    let graph = MetricGraph::build(dom, h, window)?;
    let samples = spread_samples(dom, window, m.max(4), opts);
    delta_four_point_on(&graph, &samples, flavor, opts.seed)
}

/// Four-point estimate on given sample points of a prebuilt graph.
pub fn delta_four_point_on(graph: &MetricGraph, samples: &[Complex64], flavor: Flavor, seed: u64) -> Result<DeltaEstimate> {
    let d = graph.distance_matrix(samples, Weighting::Qh(flavor))?;
    Ok(DeltaEstimate {
        delta_four_point: four_point_delta(&d, seed),
        delta_thin: None,
        sample_size: samples.len(),
        flavor,
        resolution: graph.resolution(),
        samples: samples.to_vec(),
    })
}

/// Largest distance from a point of one side of a discrete geodesic
/// triangle to the union of the other two sides, over all triangles.
pub fn delta_thin_triangles(dom: &DomainSpec, triangles: &[[Complex64; 3]], flavor: Flavor, h: f64) -> Result<f64> {
    let pts: Vec<Complex64> = triangles.iter().flatten().copied().collect();
    let graph = MetricGraph::build(dom, h, Window::for_domain(dom, &pts))?;
    delta_thin_on(&graph, triangles, flavor)
}

/// As [`delta_thin_triangles`] on a prebuilt graph.
pub fn delta_thin_on(graph: &MetricGraph, triangles: &[[Complex64; 3]], flavor: Flavor) -> Result<f64> {
    let w = Weighting::Qh(flavor);
    let mut worst: f64 = 0.0;
    for tri in triangles {
        let mut sides: Vec<(Vec<Complex64>, Vec<usize>)> = Vec::new();
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let path = graph.shortest_path(a, b, w, None)?.path;
            let nodes = path.iter().filter_map(|p| graph.node_at(*p)).collect();
            sides.push((path, nodes));
        }
        for k in 0..3 {
            let mut others: Vec<usize> = Vec::new();
            for j in 0..3 {
                if j != k {
                    others.extend_from_slice(&sides[j].1);
                }
            }
            let tree = graph.tree_from_points(tri, &others, w);
            for &node in &sides[k].1 {
                worst = worst.max(tree.dist[node]);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(pts: &[(f64, f64)]) -> Vec<Vec<f64>> {
        pts.iter()
            .map(|a| pts.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect())
            .collect()
    }

    fn labeling_oracle(d: &[Vec<f64>]) -> f64 {
        // every assignment of the four points to the roles x, y, z, w
        let idx = [0usize, 1, 2, 3];
        let mut best: f64 = 0.0;
        for x in idx {
            for y in idx {
                for z in idx {
                    for w in idx {
                        let mut s = [x, y, z, w];
                        s.sort_unstable();
                        if s != idx {
                            continue;
                        }
                        let g = |a: usize, b: usize| gromov_product(|p: &usize, q: &usize| d[*p][*q], &a, &b, &w);
                        best = best.max(g(x, z).min(g(y, z)) - g(x, y));
                    }
                }
            }
        }
        best
    }

    #[test]
    fn gromov_product_examples() {
        let d = |a: &f64, b: &f64| (a - b).abs();
        assert_eq!(gromov_product(d, &2.0, &2.0, &0.5), 1.5);
        assert_eq!(gromov_product(d, &-1.0, &1.0, &0.0), 0.0);
        assert_eq!(gromov_product(d, &3.0, &1.0, &3.0), 0.0);
    }

    #[test]
    fn square_corners_match_labeling_oracle() {
        let d = euclid(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let delta = four_point_delta(&d, 0);
        assert!((delta - labeling_oracle(&d)).abs() < 1e-15);
        assert!((delta - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn line_is_zero_hyperbolic() {
        let pts: Vec<(f64, f64)> = (0..12).map(|k| (k as f64 * 0.37, 0.0)).collect();
        assert!(four_point_delta(&euclid(&pts), 0) < 1e-12);
    }
}
