//! Exterior conformal maps of starlike closed curves by Theodorsen's
//! boundary-correspondence iteration, and circle fitting.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::point_set_diameter;
use crate::error::{Error, Result};
use crate::koebe::fourier::{fft, ifft, TrigCurve};

/// Boundary nodes of the correspondence iteration.
pub const THEODORSEN_NODES: usize = 512;
/// Upsampling factor of the trace used for the polar table.
pub const UPSAMPLE: usize = 32;
/// Default number of negative-power Laurent modes.
pub const DEFAULT_MODES: usize = 64;
/// Relative fit residual above which an exterior map is rejected.
pub const FIT_TOLERANCE: f64 = 1e-6;

const MAX_ITERATIONS: usize = 500;
const NEWTON_STEPS: usize = 60;

/// `g(w) = cap w + c0 + sum_k c_k w^{-k}`, a map of `|w| > 1` onto the
/// exterior of a curve, with `cap > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    pub cap: f64,
    pub c0: Complex64,
    /// `c_1, c_2, ...`
    pub coeffs: Vec<Complex64>,
}

impl LaurentSeries {
    pub fn eval(&self, w: Complex64) -> Complex64 {
        let inv = 1.0 / w;
        // Horner in 1/w for the principal part
        let mut tail = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            tail = (tail + c) * inv;
        }
        self.cap * w + self.c0 + tail
    }

    pub fn deriv(&self, w: Complex64) -> Complex64 {
        let inv = 1.0 / w;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = inv * inv;
        for (k, c) in self.coeffs.iter().enumerate() {
            acc -= c * (k as f64 + 1.0) * p;
            p *= inv;
        }
        self.cap + acc
    }

    /// `g^{-1}(z)` by Newton iteration from the leading-order predictor.
    pub fn invert(&self, z: Complex64) -> Complex64 {
        let mut w = (z - self.c0) / self.cap;
        if w.norm() < 1.0 {
            w = w / w.norm().max(1e-300);
        }
        for _ in 0..NEWTON_STEPS {
            let step = (self.eval(w) - z) / self.deriv(w);
            w -= step;
            if step.norm() <= 1e-16 * w.norm().max(1.0) {
                break;
            }
        }
        w
    }
}

/// An exterior map with its boundary fit residual (relative to the curve diameter).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExteriorMap {
    pub series: LaurentSeries,
    pub residual: f64,
    pub iterations: usize,
}

/// Closed-form exterior map of the segment `[a, b]` (a rotated, scaled Joukowski map).
pub fn segment_exterior_map(a: Complex64, b: Complex64) -> LaurentSeries {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let h = half.norm();
    let rot = half / h;
    LaurentSeries { cap: 0.5 * h, c0: c, coeffs: vec![0.5 * h * rot * rot] }
}

fn signed_area(pts: &[Complex64]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|k| (pts[k].conj() * pts[(k + 1) % n]).im).sum::<f64>()
}

fn area_centroid(pts: &[Complex64]) -> Complex64 {
    let n = pts.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut area = 0.0;
    for k in 0..n {
        let (p, q) = (pts[k], pts[(k + 1) % n]);
        let cr = (p.conj() * q).im;
        area += cr;
        acc += (p + q) * cr;
    }
    acc / (3.0 * area)
}

/// Polar description of a starlike curve about `z0`: the interpolant and a
/// dense monotone table of `(parameter, unwrapped angle)`.
struct Polar {
    trig: TrigCurve,
    z0: Complex64,
    s: Vec<f64>,
    phi: Vec<f64>,
}

impl Polar {
    fn new(pts: &[Complex64], z0: Complex64) -> Result<Polar> {
        let trig = TrigCurve::from_samples(pts);
        let dense = trig.upsample(UPSAMPLE);
        let m = dense.len();
        let mut phi = Vec::with_capacity(m + 1);
        phi.push((dense[0] - z0).arg());
        for j in 0..m {
            let d = ((dense[(j + 1) % m] - z0) / (dense[j] - z0)).arg();
            if !(d > 0.0) {
                return Err(Error::NotStarlike);
            }
            phi.push(phi[j] + d);
        }
        if (phi[m] - phi[0] - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::NotStarlike);
        }
        let s = (0..=m).map(|j| std::f64::consts::TAU * j as f64 / m as f64).collect();
        Ok(Polar { trig, z0, s, phi })
    }

    /// Curve point at polar angle `phi`.
    fn at(&self, phi: f64) -> Complex64 {
        let tau = std::f64::consts::TAU;
        let base = self.phi[0];
        let t = base + (phi - base).rem_euclid(tau);
        let j = self.phi.partition_point(|&p| p <= t).clamp(1, self.phi.len() - 1) - 1;
        let frac = (t - self.phi[j]) / (self.phi[j + 1] - self.phi[j]);
        let mut s = self.s[j] + frac * (self.s[j + 1] - self.s[j]);
        let target = Complex64::from_polar(1.0, -phi);
        for _ in 0..4 {
            let p = self.trig.eval(s) - self.z0;
            let err = (p * target).arg();
            let rate = (self.trig.deriv(s) / p).im;
            if rate <= 0.0 {
                break;
            }
            s -= err / rate;
            if err.abs() < 1e-15 {
                break;
            }
        }
        self.trig.eval(s)
    }
}

/// Exterior map of a closed starlike trace (sampled at equally spaced
/// parameters) with `modes` negative powers.
pub fn exterior_map(trace: &[Complex64], modes: usize) -> Result<ExteriorMap> {
    exterior_map_with_tolerance(trace, modes, FIT_TOLERANCE)
}

/// [`exterior_map`] with a custom bound on the boundary fit residual
/// (relative to the trace diameter). Traces with corners converge only
/// algebraically in the number of modes and need a looser bound.
pub fn exterior_map_with_tolerance(trace: &[Complex64], modes: usize, fit_tol: f64) -> Result<ExteriorMap> {
    if trace.len() < 8 {
        return Err(Error::NotStarlike);
    }
    let mut pts = trace.to_vec();
    let area = signed_area(&pts);
    if area.abs() <= 0.0 {
        return Err(Error::NotStarlike);
    }
    if area < 0.0 {
        pts.reverse();
    }
    let z0 = area_centroid(&pts);
    let polar = Polar::new(&pts, z0)?;
    let n = THEODORSEN_NODES;
    let theta: Vec<f64> = (0..n).map(|j| std::f64::consts::TAU * j as f64 / n as f64).collect();
    let mut phi = theta.clone();
    let mut iterations = 0;
    let boundary = |phi: &[f64]| -> Vec<Complex64> { phi.iter().map(|&p| polar.at(p)).collect() };
    for it in 1..=MAX_ITERATIONS {
        iterations = it;
        let b = boundary(&phi);
        let mut spec: Vec<Complex64> = b.iter().map(|z| Complex64::new((z - z0).norm().ln(), 0.0)).collect();
        fft(&mut spec);
        // exterior conjugation: multiply frequency k by i sign(k)
        for (k, v) in spec.iter_mut().enumerate() {
            let f = crate::koebe::fourier::frequency(k, n);
            *v = if f == 0 || (n % 2 == 0 && k == n / 2) { Complex64::new(0.0, 0.0) } else { *v * Complex64::new(0.0, f.signum() as f64) };
        }
        ifft(&mut spec);
        let next: Vec<f64> = theta.iter().zip(&spec).map(|(t, v)| t + v.re).collect();
        let change = next.iter().zip(&phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        phi = next;
        if change < 1e-14 {
            break;
        }
    }
    let b = boundary(&phi);
    let mut spec = b.clone();
    fft(&mut spec);
    let coef = |k: usize| spec[k] / n as f64;
    let series = LaurentSeries {
        cap: coef(1).re,
        c0: coef(0),
        coeffs: (1..=modes.min(n / 2 - 1)).map(|k| coef(n - k)).collect(),
    };
    let diam = point_set_diameter(&pts);
    let residual = theta
        .iter()
        .zip(&b)
        .map(|(t, z)| (series.eval(Complex64::from_polar(1.0, *t)) - z).norm())
        .fold(0.0, f64::max)
        / diam;
    if !(residual <= fit_tol) {
        return Err(Error::FitResidualTooLarge { residual: residual * diam, limit: fit_tol * diam });
    }
    Ok(ExteriorMap { series, residual, iterations })
}

/// Algebraic least-squares circle through the points, refined by a few
/// Gauss-Newton steps on the geometric residual.
pub fn fit_circle(pts: &[Complex64]) -> (Complex64, f64) {
    let mut m = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for z in pts {
        let row = Vector3::new(z.re, z.im, 1.0);
        m += row * row.transpose();
        rhs += row * -(z.norm_sqr());
    }
    let sol = m.lu().solve(&rhs).unwrap_or(Vector3::zeros());
    let mut c = Complex64::new(-0.5 * sol[0], -0.5 * sol[1]);
    let mut r = (c.norm_sqr() - sol[2]).max(0.0).sqrt();
    for _ in 0..5 {
        let mut jt_j = Matrix3::zeros();
        let mut jt_r = Vector3::zeros();
        for z in pts {
            let d = z - c;
            let dn = d.norm().max(1e-300);
            let row = Vector3::new(-d.re / dn, -d.im / dn, -1.0);
            let res = dn - r;
            jt_j += row * row.transpose();
            jt_r += row * res;
        }
        match jt_j.lu().solve(&jt_r) {
            Some(step) => {
                c -= Complex64::new(step[0], step[1]);
                r -= step[2];
            }
            None => break,
        }
    }
    (c, r)
}

/// Largest deviation of the points from their best-fit circle, relative to its radius.
pub fn circularity_residual(pts: &[Complex64]) -> f64 {
    let (c, r) = fit_circle(pts);
    if !(r > 0.0) {
        return f64::INFINITY;
    }
    pts.iter().map(|z| ((z - c).norm() - r).abs()).fold(0.0, f64::max) / r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..n).map(|j| f(std::f64::consts::TAU * j as f64 / n as f64)).collect()
    }

    #[test]
    fn circle_maps_affinely() {
        let c = Complex64::new(1.0, -2.0);
        let m = exterior_map(&sample(256, |t| c + Complex64::from_polar(0.7, t)), 64).unwrap();
        assert!((m.series.cap - 0.7).abs() < 1e-12);
        assert!((m.series.c0 - c).norm() < 1e-12);
        assert!(m.series.coeffs.iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn ellipse_matches_joukowski_at_radius() {
        let r = 2.0;
        let m = exterior_map(&sample(256, |t| Complex64::new((r + 1.0 / r) * t.cos(), (r - 1.0 / r) * t.sin())), 64).unwrap();
        assert!((m.series.cap - r).abs() < 1e-9, "{}", m.series.cap);
        assert!((m.series.coeffs[0] - 1.0 / r).norm() < 1e-9);
        assert!(m.series.coeffs[1..].iter().all(|a| a.norm() < 1e-9));
        let w = Complex64::new(1.3, 0.4);
        assert!((m.series.invert(m.series.eval(w)) - w).norm() < 1e-12);
    }

    #[test]
    fn segment_map_is_joukowski() {
        let g = segment_exterior_map(Complex64::new(-2.0, 0.0), Complex64::new(2.0, 0.0));
        assert_eq!(g.cap, 1.0);
        assert!((g.coeffs[0] - 1.0).norm() < 1e-15);
        let w = Complex64::from_polar(1.0, 0.7);
        assert!(g.eval(w).im.abs() < 1e-15 && g.eval(w).re.abs() <= 2.0);
    }

    #[test]
    fn non_starlike_trace_is_rejected() {
        // a thin crescent is not starlike about its centroid
        let pts = sample(256, |t| {
            let r = 1.0 + 0.9 * (3.0 * t).cos();
            Complex64::from_polar(r.max(0.05), t + 0.8 * (2.0 * t).sin())
        });
        assert!(matches!(exterior_map(&pts, 64), Err(Error::NotStarlike) | Err(Error::FitResidualTooLarge { .. })));
    }

    #[test]
    fn circle_fit_recovers_circle() {
        let (c, r) = fit_circle(&sample(50, |t| Complex64::new(3.0, 1.0) + Complex64::from_polar(2.0, t)));
        assert!((c - Complex64::new(3.0, 1.0)).norm() < 1e-12 && (r - 2.0).abs() < 1e-12);
    }
}
