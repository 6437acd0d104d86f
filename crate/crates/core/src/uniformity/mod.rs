//! Inner metrics, cigar conditions and the geometric consequences of
//! uniformity for the complementary components.

pub mod avoid;
pub mod cigar;
pub mod geometry;
pub mod inner;
pub mod llc;

pub use avoid::{avoid_boundary, loop_polygon};
pub use cigar::{
    check_cigar, concatenate_with_cigar, estimate_uniformity, estimate_uniformity_on, find_uniform_curve,
    find_uniform_curve_on, spherical_length_cigar, CigarReport, UniformCurve, UniformityEstimate, BETA_LADDER,
};
pub use geometry::{
    bounded_turning_pair, count_large_components, implied_a_lower, separation_constant, verify_bounded_turning,
    verify_separation, BoundedTurningReport, CountReport, SeparationPair, SeparationReport,
};
pub use inner::{inner_distances, inner_distances_on, lambda_path, shortcut_path, InnerDistances};
pub use llc::{check_llc, invert_circle_domain, is_circle_domain, sample_balls, LlcBall, LlcFailure, LlcKind, LlcOptions, LlcReport};
