//! Domains given as the complement of finitely many closed components.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::component::BoundaryComponent;
use crate::error::{Error, Result};
use crate::point::{spherical_to_infinity, PlanePoint};

/// Which ambient metric a distance or density refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Euclidean,
    Spherical,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Euclidean => "euclidean",
            Flavor::Spherical => "spherical",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "e" => Ok(Flavor::Euclidean),
            "spherical" | "s" | "sigma" => Ok(Flavor::Spherical),
            other => Err(Error::Parse(format!("unknown flavor '{other}'"))),
        }
    }
}

/// Diameters and pairwise set distances of the complementary components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentGeometry {
    pub diameters: Vec<f64>,
    pub distances: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawDomain {
    #[serde(default)]
    name: String,
    contains_infinity: bool,
    components: Vec<BoundaryComponent>,
}

/// A planar domain: the sphere minus finitely many closed components (and
/// minus infinity unless `contains_infinity`).
///
/// When infinity is excluded, a disc or polygon that encloses every other
/// component is read as the outer boundary, so the domain is the bounded
/// region inside it. A half-plane component is always the outer boundary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainSpec {
    pub name: String,
    pub contains_infinity: bool,
    pub components: Vec<BoundaryComponent>,
    #[serde(skip)]
    outer: Option<usize>,
}

impl<'de> Deserialize<'de> for DomainSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDomain::deserialize(d)?;
        DomainSpec::new(raw.name, raw.contains_infinity, raw.components).map_err(serde::de::Error::custom)
    }
}

fn encloses(outer: &BoundaryComponent, other: &BoundaryComponent) -> bool {
    if !outer.can_be_outer() {
        return false;
    }
    // the other component must lie in the open bounded region of `outer`
    outer.signed_distance(other.anchor(), false) < 0.0 && outer.set_distance(true, other, false) > 0.0
}

impl DomainSpec {
    /// Validate the components and infer the outer boundary.
    pub fn new(name: impl Into<String>, contains_infinity: bool, components: Vec<BoundaryComponent>) -> Result<Self> {
        for comp in &components {
            comp.validate()?;
        }
        let halfplanes: Vec<usize> = components
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, BoundaryComponent::Halfplane { .. }))
            .map(|(i, _)| i)
            .collect();
        if contains_infinity && !halfplanes.is_empty() {
            return Err(Error::InvalidDomain("a half-plane component excludes infinity from the domain".into()));
        }
        if halfplanes.len() > 1 {
            return Err(Error::InvalidDomain("at most one half-plane component is supported".into()));
        }
        let mut outer = halfplanes.first().copied();
        // with infinity excluded, a disc or polygon enclosing all other
        // components (or standing alone) bounds the domain from outside
        if !contains_infinity && outer.is_none() {
            outer = (0..components.len()).find(|&k| {
                components[k].can_be_outer()
                    && components.iter().enumerate().all(|(j, c)| j == k || encloses(&components[k], c))
            });
        }
        let dom = DomainSpec { name: name.into(), contains_infinity, components, outer };
        dom.check_disjoint()?;
        Ok(dom)
    }

    fn check_disjoint(&self) -> Result<()> {
        let n = self.components.len();
        if n < 2 {
            return Ok(());
        }
        let scale = self.bounded_bbox().map(|(lo, hi)| (hi - lo).norm()).unwrap_or(1.0).max(1e-300);
        let tol = 1e-9 * scale;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.components[i].set_distance(self.is_outer(i), &self.components[j], self.is_outer(j));
                if d < tol {
                    return Err(Error::InvalidDomain(format!("components {i} and {j} are not disjoint (gap {d:e})")));
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("domain serialization cannot fail")
    }

    /// Index of the outer boundary component, if any.
    pub fn outer(&self) -> Option<usize> {
        self.outer
    }

    pub fn is_outer(&self, i: usize) -> bool {
        self.outer == Some(i)
    }

    /// Whether the domain is a bounded subset of the plane.
    pub fn is_bounded(&self) -> bool {
        match self.outer {
            Some(k) => !matches!(self.components[k], BoundaryComponent::Halfplane { .. }),
            None => false,
        }
    }

    /// Closed membership: points on a component are not in the domain.
    pub fn contains(&self, z: PlanePoint) -> bool {
        match z {
            PlanePoint::Infinity => self.contains_infinity,
            PlanePoint::Finite(w) => self.contains_finite(w),
        }
    }

    pub fn contains_finite(&self, z: Complex64) -> bool {
        z.re.is_finite() && z.im.is_finite() && self.signed_distance(z) > 0.0
    }

    /// Smallest component-wise signed Euclidean distance: positive in the
    /// domain, negative inside a component.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        self.components
            .iter()
            .enumerate()
            .map(|(i, c)| c.signed_distance(z, self.is_outer(i)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance from a finite point to the complement (no membership check).
    pub fn dist_euclidean(&self, z: Complex64) -> f64 {
        self.signed_distance(z).max(0.0)
    }

    /// Spherical distance from a finite point to the complement in the sphere
    /// (no membership check).
    pub fn dist_spherical(&self, z: Complex64) -> f64 {
        let mut d = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| c.spherical_distance(z, self.is_outer(i)))
            .fold(f64::INFINITY, f64::min);
        if !self.contains_infinity {
            d = d.min(spherical_to_infinity(z));
        }
        d
    }

    pub fn dist_flavor(&self, z: Complex64, flavor: Flavor) -> f64 {
        match flavor {
            Flavor::Euclidean => self.dist_euclidean(z),
            Flavor::Spherical => self.dist_spherical(z),
        }
    }

    /// Distance from `z` to the boundary, checking membership first.
    pub fn dist_to_boundary(&self, z: PlanePoint, flavor: Flavor) -> Result<f64> {
        if !self.contains(z) {
            return Err(Error::PointOutsideDomain(z.to_string()));
        }
        match (z, flavor) {
            (PlanePoint::Finite(w), f) => Ok(self.dist_flavor(w, f)),
            (PlanePoint::Infinity, Flavor::Euclidean) => Err(Error::Unsupported(
                "euclidean distance from infinity".into(),
            )),
            (PlanePoint::Infinity, Flavor::Spherical) => Ok(self
                .components
                .iter()
                .map(|c| std::f64::consts::PI - 2.0 * c.farthest_from_origin().atan())
                .fold(f64::INFINITY, f64::min)),
        }
    }

    /// Euclidean diameters and pairwise set distances.
    pub fn component_geometry(&self) -> ComponentGeometry {
        let n = self.components.len();
        let diameters = (0..n).map(|i| self.components[i].diameter(self.is_outer(i))).collect();
        let mut distances = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.components[i].set_distance(self.is_outer(i), &self.components[j], self.is_outer(j));
                distances[i][j] = d;
                distances[j][i] = d;
            }
        }
        ComponentGeometry { diameters, distances }
    }

    /// Smallest Euclidean distance from the segment `[a, b]` to the complement.
    pub fn segment_clearance(&self, a: Complex64, b: Complex64) -> f64 {
        self.components
            .iter()
            .enumerate()
            .map(|(i, c)| c.segment_distance(a, b, self.is_outer(i)))
            .fold(f64::INFINITY, f64::min)
    }

    /// The closed segment `[a, b]` lies in the domain.
    pub fn segment_inside(&self, a: Complex64, b: Complex64) -> bool {
        self.segment_clearance(a, b) > 0.0
    }

    /// Indices of components met by the closed segment `[a, b]`.
    pub fn components_hit(&self, a: Complex64, b: Complex64) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&i| self.components[i].segment_distance(a, b, self.is_outer(i)) <= 0.0)
            .collect()
    }

    /// Bounding box of the bounded components (the outer one included).
    pub fn bounded_bbox(&self) -> Option<(Complex64, Complex64)> {
        let mut acc: Option<(Complex64, Complex64)> = None;
        for c in &self.components {
            if let Some((lo, hi)) = c.bbox() {
                acc = Some(match acc {
                    None => (lo, hi),
                    Some((a, b)) => (
                        Complex64::new(a.re.min(lo.re), a.im.min(lo.im)),
                        Complex64::new(b.re.max(hi.re), b.im.max(hi.im)),
                    ),
                });
            }
        }
        acc
    }

    /// A copy of the domain restricted to the listed components.
    /// The outer boundary, if kept, stays the outer boundary, and no other
    /// component is promoted to it.
    pub fn with_components(&self, keep: &[usize]) -> Result<Self> {
        let comps = keep.iter().map(|&i| self.components[i].clone()).collect();
        let mut dom = DomainSpec::new(self.name.clone(), self.contains_infinity, comps)?;
        dom.outer = self.outer.and_then(|o| keep.iter().position(|&i| i == o));
        Ok(dom)
    }
}

impl BoundaryComponent {
    pub(crate) fn farthest_from_origin(&self) -> f64 {
        self.farthest_from(Complex64::new(0.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn disc_complement_distances() {
        let dom = DomainSpec::new("ext", true, vec![BoundaryComponent::disc(0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(dom.outer(), None);
        let d = dom.dist_to_boundary(PlanePoint::new(3.0, 0.0), Flavor::Euclidean).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        assert!(dom.contains(PlanePoint::Infinity));
        assert!(matches!(
            dom.dist_to_boundary(PlanePoint::new(0.0, 0.0), Flavor::Euclidean),
            Err(Error::PointOutsideDomain(_))
        ));
    }

    #[test]
    fn polygonal_unit_disc_interior() {
        let n = 720;
        let pts = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        let dom = DomainSpec::new("disc", false, vec![BoundaryComponent::polyline(pts)]).unwrap();
        assert_eq!(dom.outer(), Some(0));
        let d = dom.dist_to_boundary(PlanePoint::new(0.0, 0.0), Flavor::Euclidean).unwrap();
        assert!((d - 1.0).abs() < 1e-4);
        assert!(!dom.contains(PlanePoint::new(2.0, 0.0)));
    }

    #[test]
    fn punctured_sphere_spherical_distance() {
        let dom = DomainSpec::new("punctured", false, vec![BoundaryComponent::point(0.0, 0.0)]).unwrap();
        let d = dom.dist_to_boundary(PlanePoint::new(1.0, 0.0), Flavor::Spherical).unwrap();
        assert!((d - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn geometry_examples() {
        let dom = DomainSpec::new(
            "two",
            true,
            vec![BoundaryComponent::disc(0.0, 0.0, 1.0), BoundaryComponent::disc(4.0, 0.0, 1.0)],
        )
        .unwrap();
        let g = dom.component_geometry();
        assert_eq!(g.diameters, vec![2.0, 2.0]);
        assert!((g.distances[0][1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn annulus_and_overlap() {
        let ann = DomainSpec::new(
            "annulus",
            false,
            vec![BoundaryComponent::disc(0.0, 0.0, 5.0), BoundaryComponent::disc(0.0, 0.0, 1.0)],
        )
        .unwrap();
        assert_eq!(ann.outer(), Some(0));
        assert!(ann.contains_finite(c(3.0, 0.0)));
        assert!(!ann.contains_finite(c(0.5, 0.0)));
        assert!(!ann.contains_finite(c(6.0, 0.0)));
        let bad = DomainSpec::new(
            "overlap",
            true,
            vec![BoundaryComponent::disc(0.0, 0.0, 1.0), BoundaryComponent::disc(1.5, 0.0, 1.0)],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"name":"mix","contains_infinity":true,"components":[
            {"disc":{"cx":0,"cy":0,"r":1}},
            {"segment":{"x1":3,"y1":0,"x2":4,"y2":0}},
            {"point":{"x":0,"y":5}},
            {"polyline":{"points":[[6,0],[7,0],[7,1]]}}]}"#;
        let dom = DomainSpec::from_json_str(text).unwrap();
        assert_eq!(dom.components.len(), 4);
        let back = DomainSpec::from_json_str(&dom.to_json_string()).unwrap();
        assert_eq!(dom, back);
    }

    #[test]
    fn halfplane_domain() {
        let dom = DomainSpec::new("upper", false, vec![BoundaryComponent::halfplane(0.0, 0.0, 0.0, 1.0)]).unwrap();
        assert!(dom.contains_finite(c(0.0, 1.0)));
        assert!(!dom.contains_finite(c(0.0, -1.0)));
        assert!((dom.dist_euclidean(c(3.0, 2.0)) - 2.0).abs() < 1e-15);
        assert!(!dom.is_bounded());
    }
}
