//! Compositions of elementary conformal maps and their expansion at infinity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::component::point_in_polygon;
use crate::error::{Error, Result};
use crate::koebe::exterior::LaurentSeries;

/// A conformal map with an inverse, evaluated pointwise.
pub trait ConformalMap {
    fn eval(&self, z: Complex64) -> Complex64;
    fn eval_inverse(&self, w: Complex64) -> Complex64;
}

/// The identity map.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl ConformalMap for Identity {
    fn eval(&self, z: Complex64) -> Complex64 {
        z
    }
    fn eval_inverse(&self, w: Complex64) -> Complex64 {
        w
    }
}

/// A map given by a pair of closures.
pub struct FnMap<F, G>(pub F, pub G);

impl<F: Fn(Complex64) -> Complex64, G: Fn(Complex64) -> Complex64> ConformalMap for FnMap<F, G> {
    fn eval(&self, z: Complex64) -> Complex64 {
        (self.0)(z)
    }
    fn eval_inverse(&self, w: Complex64) -> Complex64 {
        (self.1)(w)
    }
}

/// Elementary maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapStep {
    /// `z -> a z + b`
    Affine { a: Complex64, b: Complex64 },
    /// Opens the arc `lens` (or, if empty, the straight segment of the given
    /// center, half-length and direction) onto a circle of radius
    /// `half_length / 2`: with `u = (z - center) / rotation`,
    /// `z -> center + rotation (u + sqrt(u - h) sqrt(u + h)) / 2`, the root
    /// changing sign inside the region between the arc and its chord.
    InvJoukowski { center: Complex64, half_length: f64, rotation: Complex64, lens: Vec<Complex64> },
    /// `z -> g(z)` for the series `g`.
    Laurent { series: LaurentSeries },
    /// `z -> g^{-1}(z)`.
    LaurentInverse { series: LaurentSeries },
}

/// Expansion `A z + B + C / z + O(z^-2)` at infinity.
pub type Expansion = (Complex64, Complex64, Complex64);

impl MapStep {
    /// The root branch used by an opening step at `z`.
    fn joukowski(center: Complex64, h: f64, rotation: Complex64, lens: &[Complex64], z: Complex64) -> Complex64 {
        let u = (z - center) * rotation.conj();
        let root = (u - h).sqrt() * (u + h).sqrt();
        let inside = !lens.is_empty() && point_in_polygon(z, lens);
        let w = if inside { 0.5 * (u - root) } else { 0.5 * (u + root) };
        center + rotation * w
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            MapStep::Affine { a, b } => a * z + b,
            MapStep::InvJoukowski { center, half_length, rotation, lens } => {
                Self::joukowski(*center, *half_length, *rotation, lens, z)
            }
            MapStep::Laurent { series } => series.eval(z),
            MapStep::LaurentInverse { series } => series.invert(z),
        }
    }

    pub fn eval_inverse(&self, w: Complex64) -> Complex64 {
        match self {
            MapStep::Affine { a, b } => (w - b) / a,
            MapStep::InvJoukowski { center, half_length, rotation, .. } => {
                let v = (w - center) * rotation.conj();
                center + rotation * (v + half_length * half_length / (4.0 * v))
            }
            MapStep::Laurent { series } => series.invert(w),
            MapStep::LaurentInverse { series } => series.eval(w),
        }
    }

    pub fn expansion(&self) -> Expansion {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let c1 = |s: &LaurentSeries| s.coeffs.first().copied().unwrap_or(zero);
        match self {
            MapStep::Affine { a, b } => (*a, *b, zero),
            MapStep::InvJoukowski { half_length, rotation, .. } => {
                (one, zero, -rotation * rotation * half_length * half_length / 4.0)
            }
            MapStep::Laurent { series } => (series.cap.into(), series.c0, c1(series)),
            MapStep::LaurentInverse { series } => {
                (Complex64::from(1.0 / series.cap), -series.c0 / series.cap, -c1(series))
            }
        }
    }
}

/// Expansion of `second ∘ first`.
pub fn compose_expansions(first: Expansion, second: Expansion) -> Expansion {
    let (a, b, c) = first;
    let (a2, b2, c2) = second;
    (a2 * a, a2 * b + b2, a2 * c + c2 / a)
}

/// A composition of elementary maps, applied in order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MapChain {
    pub steps: Vec<MapStep>,
    /// `(a0, a1)` of the composed map after normalization.
    pub laurent_at_infinity: Option<(Complex64, Complex64)>,
}

impl MapChain {
    pub fn new(steps: Vec<MapStep>) -> Self {
        MapChain { steps, laurent_at_infinity: None }
    }

    pub fn push(&mut self, step: MapStep) {
        self.steps.push(step);
        self.laurent_at_infinity = None;
    }

    /// Expansion of the composed map at infinity.
    pub fn expansion(&self) -> Expansion {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        self.steps.iter().fold((one, zero, zero), |acc, s| compose_expansions(acc, s.expansion()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("map chain serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl ConformalMap for MapChain {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.steps.iter().fold(z, |z, s| s.eval(z))
    }
    fn eval_inverse(&self, w: Complex64) -> Complex64 {
        self.steps.iter().rev().fold(w, |w, s| s.eval_inverse(w))
    }
}

/// Post-compose with the affine map making the expansion `z + a1 / z + ...`.
/// A chain that is already normalized is returned unchanged apart from the
/// recorded coefficients.
pub fn normalize_at_infinity(chain: &MapChain) -> Result<MapChain> {
    let (a, b, c) = chain.expansion();
    if !(a.norm() > 1e-300) || !a.norm().is_finite() || !b.norm().is_finite() || !c.norm().is_finite() {
        return Err(Error::DegenerateAtInfinity);
    }
    let mut out = chain.clone();
    let one = Complex64::new(1.0, 0.0);
    let scale = 1.0 + b.norm();
    if (a - one).norm() > 1e-14 || b.norm() > 1e-14 * scale {
        out.steps.push(MapStep::Affine { a: 1.0 / a, b: -b / a });
    }
    out.laurent_at_infinity = Some((Complex64::new(0.0, 0.0), c / a));
    Ok(out)
}

/// Expansion `A z + B + C / z` of a map at infinity read off from its
/// values: the Fourier coefficients of `f(R e^{it})` of orders 1, 0, -1 on
/// circles of radius `10^2` and `10^3`, combined by Richardson
/// extrapolation to remove the `O(R^-2)` contamination.
pub fn sampled_expansion(f: &impl ConformalMap) -> Expansion {
    let k = 64;
    let coefficients = |r: f64| {
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for j in 0..k {
            let e = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / k as f64);
            let w = f.eval(e * r);
            acc[0] += w * e.conj();
            acc[1] += w;
            acc[2] += w * e;
        }
        let kf = k as f64;
        (acc[0] / (kf * r), acc[1] / kf, acc[2] * r / kf)
    };
    let (r1, r2) = (1e2, 1e3);
    let (e1, e2) = (coefficients(r1), coefficients(r2));
    let w = r2 * r2 / (r2 * r2 - r1 * r1);
    let extrapolate = |a: Complex64, b: Complex64| b * w + a * (1.0 - w);
    (extrapolate(e1.0, e2.0), extrapolate(e1.1, e2.1), extrapolate(e1.2, e2.2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn normalization_examples() {
        let chain = MapChain::new(vec![MapStep::Laurent {
            series: LaurentSeries { cap: 2.0, c0: c(3.0, 0.0), coeffs: vec![c(1.0, 0.0)] },
        }]);
        let n = normalize_at_infinity(&chain).unwrap();
        assert_eq!(n.laurent_at_infinity.unwrap().1, c(0.5, 0.0));
        let z = c(1e4, 3e3);
        assert!((n.eval(z) - (z + 0.5 / z)).norm() < 1e-6);
        let twice = normalize_at_infinity(&n).unwrap();
        assert_eq!(twice.steps, n.steps);
        let shift = MapChain::new(vec![MapStep::Affine { a: c(1.0, 0.0), b: c(5.0, 0.0) }]);
        assert_eq!(normalize_at_infinity(&shift).unwrap().laurent_at_infinity.unwrap().1, c(0.0, 0.0));
        let flat = MapChain::new(vec![MapStep::Affine { a: c(0.0, 0.0), b: c(1.0, 0.0) }]);
        assert_eq!(normalize_at_infinity(&flat).unwrap_err(), Error::DegenerateAtInfinity);
    }

    #[test]
    fn opening_step_inverts_and_expands() {
        let step = MapStep::InvJoukowski { center: c(0.0, 0.0), half_length: 2.0, rotation: c(1.0, 0.0), lens: vec![] };
        for z in [c(3.0, 0.5), c(-0.2, 0.1), c(0.5, -0.01), c(-4.0, 0.0)] {
            let w = step.eval(z);
            assert!(w.norm() > 1.0 - 1e-12);
            assert!((step.eval_inverse(w) - z).norm() < 1e-12);
        }
        let z = c(1e3, 2e2);
        let (_, _, a1) = step.expansion();
        assert_eq!(a1, c(-1.0, 0.0));
        assert!((step.eval(z) - (z + a1 / z)).norm() < 1e-8);
    }

    #[test]
    fn curved_arc_opens_across_its_chord() {
        // arc of the circle |z - 2i| = sqrt(5) between -1 and 1 (below the chord)
        let center = c(0.0, 2.0);
        let r = 5f64.sqrt();
        let a0 = (c(-1.0, 0.0) - center).arg();
        let a1 = (c(1.0, 0.0) - center).arg();
        let lens: Vec<Complex64> = (0..=64).map(|k| center + Complex64::from_polar(r, a0 + (a1 - a0) * k as f64 / 64.0)).collect();
        let step = MapStep::InvJoukowski { center: c(0.0, 0.0), half_length: 1.0, rotation: c(1.0, 0.0), lens };
        // continuity across the chord, which lies in the domain
        let above = step.eval(c(0.3, 1e-9));
        let below = step.eval(c(0.3, -1e-9));
        assert!((above - below).norm() < 1e-6);
        let chain = MapChain::new(vec![step.clone()]);
        let z = c(0.2, -0.05);
        assert!((chain.eval_inverse(chain.eval(z)) - z).norm() < 1e-12);
    }

    #[test]
    fn sampled_expansion_matches_series() {
        let chain = MapChain::new(vec![MapStep::Laurent {
            series: LaurentSeries { cap: 2.0, c0: c(3.0, -1.0), coeffs: vec![c(0.5, 0.25), c(0.1, 0.0)] },
        }]);
        let (a, b, cc) = sampled_expansion(&chain);
        assert!((a - 2.0).norm() < 1e-12 && (b - c(3.0, -1.0)).norm() < 1e-12 && (cc - c(0.5, 0.25)).norm() < 1e-9);
    }

    #[test]
    fn chain_serialization_round_trips() {
        let chain = MapChain::new(vec![
            MapStep::Affine { a: c(2.0, 0.1), b: c(0.1, 0.0) },
            MapStep::LaurentInverse { series: LaurentSeries { cap: 1.5, c0: c(0.0, 1.0), coeffs: vec![c(0.1, 0.2)] } },
        ]);
        assert_eq!(MapChain::from_json_str(&chain.to_json_string()).unwrap(), chain);
    }
}
