//! Empirical checks of computed uniformizers: rigidity up to affine maps and
//! quasisymmetric distortion.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::graph::MetricGraph;
use crate::koebe::chain::ConformalMap;
use crate::uniformity::inner_distances_on;

/// Least-squares affine relation `g(z) ≈ a f(z) + b` on probe points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityFit {
    pub a: Complex64,
    pub b: Complex64,
    /// Largest fit error relative to the spread of the `g` values.
    pub residual: f64,
}

/// Fit `g ∘ f^{-1}` by an affine map on the images of `probes` (points of
/// the common source domain) and report the normalized maximal residual.
pub fn mobius_rigidity_check(f: &(impl ConformalMap + Sync), g: &(impl ConformalMap + Sync), probes: &[Complex64]) -> RigidityFit {
    let p: Vec<Complex64> = probes.par_iter().map(|&z| f.eval(z)).collect();
    let q: Vec<Complex64> = probes.par_iter().map(|&z| g.eval(z)).collect();
    let n = p.len().max(1) as f64;
    let mp = p.iter().sum::<Complex64>() / n;
    let mq = q.iter().sum::<Complex64>() / n;
    let num: Complex64 = p.iter().zip(&q).map(|(x, y)| (x - mp).conj() * (y - mq)).sum();
    let den: f64 = p.iter().map(|x| (x - mp).norm_sqr()).sum();
    let a = if den > 0.0 { num / den } else { Complex64::new(1.0, 0.0) };
    let b = mq - a * mp;
    let spread = q.iter().map(|y| (y - mq).norm()).fold(0.0, f64::max).max(1e-300);
    let residual = p.iter().zip(&q).map(|(x, y)| (y - a * x - b).norm()).fold(0.0, f64::max) / spread;
    RigidityFit { a, b, residual }
}

/// One probed triple: inner-diameter distance ratio in the source and
/// Euclidean distance ratio of the images.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionSample {
    pub t: f64,
    pub ratio: f64,
}

/// Distortion scatter with its monotone upper envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionTable {
    /// Samples sorted by `t`.
    pub samples: Vec<DistortionSample>,
    /// Running maximum of `ratio` along increasing `t`.
    pub envelope: Vec<f64>,
}

/// For each triple `(x, a, b)`, `t = rho(x, a) / rho(x, b)` (midpoints of the
/// inner-diameter brackets on the source graph) and
/// `ratio = |f x - f a| / |f x - f b|`.
pub fn qs_distortion_probe(map: &(impl ConformalMap + Sync), graph: &MetricGraph, triples: &[[Complex64; 3]]) -> Result<DistortionTable> {
    let mut samples: Vec<DistortionSample> = triples
        .par_iter()
        .map(|&[x, a, b]| {
            let ra = inner_distances_on(graph, x, a)?;
            let rb = inner_distances_on(graph, x, b)?;
            let t = (ra.rho_lo + ra.rho_hi) / (rb.rho_lo + rb.rho_hi);
            let fx = map.eval(x);
            let ratio = (fx - map.eval(a)).norm() / (fx - map.eval(b)).norm();
            Ok(DistortionSample { t, ratio })
        })
        .collect::<Result<_>>()?;
    samples.sort_by(|p, q| p.t.total_cmp(&q.t));
    let mut envelope = Vec::with_capacity(samples.len());
    let mut best: f64 = 0.0;
    for s in &samples {
        best = best.max(s.ratio);
        envelope.push(best);
    }
    Ok(DistortionTable { samples, envelope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koebe::chain::{FnMap, Identity};

    fn probes() -> Vec<Complex64> {
        (0..40).map(|k| Complex64::from_polar(2.0 + 0.05 * k as f64, 0.37 * k as f64)).collect()
    }

    #[test]
    fn affine_post_composition_is_rigid() {
        let g = FnMap(|z: Complex64| 2.0 * z + 1.0, |w: Complex64| (w - 1.0) / 2.0);
        let fit = mobius_rigidity_check(&Identity, &g, &probes());
        assert!(fit.residual < 1e-12);
        assert!((fit.a - 2.0).norm() < 1e-12 && (fit.b - 1.0).norm() < 1e-12);
    }

    #[test]
    fn quadratic_perturbation_is_detected() {
        let g = FnMap(|z: Complex64| z + 0.01 * z * z, |w: Complex64| w);
        assert!(mobius_rigidity_check(&Identity, &g, &probes()).residual > 1e-4);
    }
}
