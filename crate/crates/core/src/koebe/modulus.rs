//! Moduli of ring domains: closed forms for annuli and pairs of discs, and
//! a boundary-integral condenser solver for two complementary components.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::component::BoundaryComponent;
use crate::domain::DomainSpec;
use crate::error::{Error, Result};

/// Modulus `2 pi / log(R / r)` of the annulus `r < |z| < R`.
pub fn annulus_modulus(r: f64, big_r: f64) -> Result<f64> {
    if !(r > 0.0 && big_r > r && big_r.is_finite()) {
        return Err(Error::BadRadii);
    }
    Ok(std::f64::consts::TAU / (big_r / r).ln())
}

/// Modulus of the ring between two disjoint closed discs (the sphere minus
/// both), via the inversive distance of their boundary circles.
pub fn circle_ring_modulus(c1: Complex64, r1: f64, c2: Complex64, r2: f64) -> Result<f64> {
    let d = (c1 - c2).norm();
    if !(r1 > 0.0 && r2 > 0.0 && d > r1 + r2) {
        return Err(Error::BadRadii);
    }
    let inv = (d * d - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
    annulus_modulus(1.0, inv + (inv * inv - 1.0).sqrt())
}

/// Complete elliptic integral of the first kind `K(k)` by the
/// arithmetic-geometric mean.
pub fn elliptic_k(k: f64) -> f64 {
    let (mut a, mut b) = (1.0f64, (1.0 - k * k).sqrt());
    for _ in 0..64 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        a = an;
        b = bn;
        if (a - b).abs() < 1e-16 * a {
            break;
        }
    }
    std::f64::consts::FRAC_PI_2 / a
}

/// Closed-form modulus of the sphere minus `[-1, -a] ∪ [a, 1]`: `K(k') / K(k)` with `k = a`.
pub fn collinear_slits_modulus(a: f64) -> f64 {
    elliptic_k((1.0 - a * a).sqrt()) / elliptic_k(a)
}

/// Basis of charge densities on one component.
enum Carrier {
    /// `c + rot h x`, densities `T_n(x) / sqrt(1 - x^2) dx`.
    Segment { c: Complex64, rot: Complex64, h: f64 },
    /// `c + R e^{i theta}`, densities `1, cos k theta, sin k theta` (per `d theta`).
    Circle { c: Complex64, r: f64 },
}

impl Carrier {
    fn of(comp: &BoundaryComponent) -> Result<Carrier> {
        match comp {
            BoundaryComponent::Segment { x1, y1, x2, y2 } => {
                let (a, b) = (Complex64::new(*x1, *y1), Complex64::new(*x2, *y2));
                let half = 0.5 * (b - a);
                Ok(Carrier::Segment { c: 0.5 * (a + b), rot: half / half.norm(), h: half.norm() })
            }
            BoundaryComponent::Disc { cx, cy, r } => Ok(Carrier::Circle { c: Complex64::new(*cx, *cy), r: *r }),
            _ => Err(Error::Unsupported(format!("condenser plates must be segments or discs, not {}", comp.kind_name()))),
        }
    }

    /// Collocation points.
    fn nodes(&self, n: usize) -> Vec<f64> {
        match self {
            Carrier::Segment { .. } => (0..n).map(|m| ((2 * m + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos()).collect(),
            Carrier::Circle { .. } => (0..n).map(|m| std::f64::consts::TAU * m as f64 / n as f64).collect(),
        }
    }

    fn point(&self, t: f64) -> Complex64 {
        match self {
            Carrier::Segment { c, rot, h } => c + rot * (h * t),
            Carrier::Circle { c, r } => c + Complex64::from_polar(*r, t),
        }
    }

    /// Basis function `n` at parameter `t` (without the weight).
    fn basis(&self, n: usize, t: f64) -> f64 {
        match self {
            Carrier::Segment { .. } => (n as f64 * t.clamp(-1.0, 1.0).acos()).cos(),
            Carrier::Circle { .. } => {
                if n == 0 {
                    1.0
                } else if n % 2 == 1 {
                    (((n + 1) / 2) as f64 * t).cos()
                } else {
                    ((n / 2) as f64 * t).sin()
                }
            }
        }
    }

    /// Potential of basis function `n` at the carrier's own node `t0`.
    fn self_potential(&self, n: usize, t0: f64) -> f64 {
        let pi = std::f64::consts::PI;
        match self {
            Carrier::Segment { h, .. } => {
                if n == 0 {
                    pi * h.ln() - pi * 2f64.ln()
                } else {
                    -pi / n as f64 * self.basis(n, t0)
                }
            }
            Carrier::Circle { r, .. } => {
                if n == 0 {
                    std::f64::consts::TAU * r.ln()
                } else {
                    let k = ((n + 1) / 2) as f64;
                    -pi / k * self.basis(n, t0)
                }
            }
        }
    }

    /// Quadrature nodes and weights for integrals against the basis.
    fn quadrature(&self, q: usize) -> Vec<(f64, f64)> {
        match self {
            Carrier::Segment { .. } => (1..=q)
                .map(|m| (((2 * m - 1) as f64 * std::f64::consts::PI / (2 * q) as f64).cos(), std::f64::consts::PI / q as f64))
                .collect(),
            Carrier::Circle { .. } => {
                (0..q).map(|m| (std::f64::consts::TAU * m as f64 / q as f64, std::f64::consts::TAU / q as f64)).collect()
            }
        }
    }

    /// Total charge of basis function `n`.
    fn charge(&self, n: usize) -> f64 {
        match (self, n) {
            (Carrier::Segment { .. }, 0) => std::f64::consts::PI,
            (Carrier::Circle { .. }, 0) => std::f64::consts::TAU,
            _ => 0.0,
        }
    }
}

/// Condenser solution of a two-component ring domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondenserEstimate {
    pub modulus: f64,
    pub basis_size: usize,
    /// Largest deviation of the computed potential from the plate values at
    /// check points between the collocation nodes.
    pub boundary_error: f64,
}

/// Modulus of the ring domain whose two complementary components are
/// segments or discs: the Dirichlet energy of the potential equal to 0 on
/// one component and 1 on the other, from a single-layer representation
/// with `n` basis functions per component.
pub fn condenser_modulus(dom: &DomainSpec, n: usize) -> Result<CondenserEstimate> {
    if !dom.contains_infinity || dom.components.len() != 2 {
        return Err(Error::Unsupported("condenser modulus needs exactly two components and infinity in the domain".into()));
    }
    let carriers = [Carrier::of(&dom.components[0])?, Carrier::of(&dom.components[1])?];
    let quad_nodes = 8192;
    let size = 2 * n + 1;
    let mut m = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    let quad: Vec<Vec<(f64, f64)>> = carriers.iter().map(|c| c.quadrature(quad_nodes)).collect();
    for (i, ci) in carriers.iter().enumerate() {
        for (row_k, t0) in ci.nodes(n).into_iter().enumerate() {
            let row = i * n + row_k;
            let z = ci.point(t0);
            for (j, cj) in carriers.iter().enumerate() {
                for b in 0..n {
                    let col = j * n + b;
                    m[(row, col)] = if i == j {
                        ci.self_potential(b, t0)
                    } else {
                        quad[j].iter().map(|&(t, w)| w * (z - cj.point(t)).norm().ln() * cj.basis(b, t)).sum()
                    };
                }
            }
            m[(row, 2 * n)] = 1.0;
            rhs[row] = i as f64;
        }
    }
    for (j, cj) in carriers.iter().enumerate() {
        for b in 0..n {
            m[(2 * n, j * n + b)] = cj.charge(b);
        }
    }
    let sol = m.lu().solve(&rhs).ok_or_else(|| Error::PreconditionFailed("singular condenser system".into()))?;
    let q2: f64 = (0..n).map(|b| carriers[1].charge(b) * sol[n + b]).sum();
    // potential at intermediate boundary points
    let mut boundary_error: f64 = 0.0;
    for (i, ci) in carriers.iter().enumerate() {
        let checks: Vec<f64> = match ci {
            Carrier::Segment { .. } => (0..n).map(|m| ((m as f64 + 0.77) * std::f64::consts::PI / n as f64).cos()).collect(),
            Carrier::Circle { .. } => (0..n).map(|m| std::f64::consts::TAU * (m as f64 + 0.5) / n as f64).collect(),
        };
        for t0 in checks {
            let z = ci.point(t0);
            let mut u = sol[2 * n];
            for (j, cj) in carriers.iter().enumerate() {
                for b in 0..n {
                    let v = if i == j {
                        ci.self_potential(b, t0)
                    } else {
                        quad[j].iter().map(|&(t, w)| w * (z - cj.point(t)).norm().ln() * cj.basis(b, t)).sum()
                    };
                    u += sol[j * n + b] * v;
                }
            }
            boundary_error = boundary_error.max((u - i as f64).abs());
        }
    }
    Ok(CondenserEstimate { modulus: std::f64::consts::TAU * q2.abs(), basis_size: n, boundary_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_examples() {
        let e = std::f64::consts::E;
        assert!((annulus_modulus(1.0, e).unwrap() - std::f64::consts::TAU).abs() < 1e-14);
        assert!((annulus_modulus(1.0, e * e).unwrap() - std::f64::consts::PI).abs() < 1e-14);
        assert!((annulus_modulus(2.0, 2.0 * e).unwrap() - std::f64::consts::TAU).abs() < 1e-14);
        assert_eq!(annulus_modulus(2.0, 1.0).unwrap_err(), Error::BadRadii);
    }

    #[test]
    fn elliptic_k_values() {
        assert!((elliptic_k(0.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((elliptic_k(0.5f64.sqrt()) - 1.854_074_677_301_372).abs() < 1e-13);
    }

    #[test]
    fn condenser_matches_collinear_slits() {
        let a = 0.4;
        let dom = DomainSpec::new(
            "slits",
            true,
            vec![BoundaryComponent::segment(-1.0, 0.0, -a, 0.0), BoundaryComponent::segment(a, 0.0, 1.0, 0.0)],
        )
        .unwrap();
        let est = condenser_modulus(&dom, 24).unwrap();
        let exact = collinear_slits_modulus(a);
        assert!((est.modulus / exact - 1.0).abs() < 1e-6, "{} vs {exact}", est.modulus);
    }

    #[test]
    fn condenser_matches_two_discs() {
        let dom = DomainSpec::new(
            "discs",
            true,
            vec![BoundaryComponent::disc(0.0, 0.0, 1.0), BoundaryComponent::disc(3.0, 0.5, 0.5)],
        )
        .unwrap();
        let est = condenser_modulus(&dom, 33).unwrap();
        let exact = circle_ring_modulus(Complex64::new(0.0, 0.0), 1.0, Complex64::new(3.0, 0.5), 0.5).unwrap();
        assert!((est.modulus / exact - 1.0).abs() < 1e-6, "{} vs {exact}", est.modulus);
    }
}
