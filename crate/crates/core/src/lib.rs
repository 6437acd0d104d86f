//! Numerical geometry of planar domains: quasihyperbolic distances, Gromov
//! hyperbolicity estimates, uniformity and cigar checks, approximation by
//! finitely connected domains and circle-domain uniformization.

pub mod approximation;
pub mod component;
pub mod curve;
pub mod domain;
pub mod error;
pub mod graph;
pub mod hyperbolicity;
pub mod koebe;
pub mod point;
pub mod qh;
pub mod sampling;
pub mod sphere_bridge;
pub mod uniformity;

pub use component::BoundaryComponent;
pub use domain::{ComponentGeometry, DomainSpec, Flavor};
pub use error::{Error, Result};
pub use point::{chordal_distance, spherical_distance, PlanePoint};
