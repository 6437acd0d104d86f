//! Seeded property suites shared by the property tests and the acceptance run.

#![allow(dead_code)]

use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};

use circuma::curve::Curve;
use circuma::graph::{MetricGraph, Window};
use circuma::koebe::{CircleDomain, Disc};
use circuma::uniformity::{avoid_boundary, check_cigar, inner_distances_on};
use circuma::{chordal_distance, spherical_distance, BoundaryComponent, DomainSpec, PlanePoint};

pub const CASES: u32 = 10_000;
const SEED: [u8; 32] = [7; 32];

fn runner() -> TestRunner {
    let config = Config { cases: CASES, max_global_rejects: 200_000, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

fn outcome<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn sphere_point() -> impl Strategy<Value = PlanePoint> {
    prop_oneof![
        9 => (-20.0..20.0f64, -20.0..20.0f64).prop_map(|(x, y)| PlanePoint::new(x, y)),
        1 => Just(PlanePoint::Infinity),
    ]
}

/// Symmetry, triangle inequality and identity of indiscernibles for the
/// chordal and spherical distances, including the point at infinity.
pub fn metric_axioms() -> Result<(), String> {
    outcome(runner().run(&(sphere_point(), sphere_point(), sphere_point()), |(x, y, z)| {
        for (name, d) in [("chordal", chordal_distance as fn(PlanePoint, PlanePoint) -> f64), ("spherical", spherical_distance)] {
            prop_assert!((d(x, y) - d(y, x)).abs() <= 1e-12, "{name} symmetry at {x:?} {y:?}");
            prop_assert!(d(x, z) <= d(x, y) + d(y, z) + 1e-12, "{name} triangle at {x:?} {y:?} {z:?}");
            prop_assert!(d(x, x) <= 1e-12, "{name} d(x, x) at {x:?}");
            if x != y {
                prop_assert!(d(x, y) > 0.0, "{name} separates {x:?} {y:?}");
            }
        }
        Ok(())
    }))
}

fn unit_disc() -> &'static DomainSpec {
    static D: OnceLock<DomainSpec> = OnceLock::new();
    D.get_or_init(|| DomainSpec::new("unit disc", false, vec![BoundaryComponent::disc(0.0, 0.0, 1.0)]).unwrap())
}

/// Polylines with vertices in the disc of radius 0.95 (they stay in the convex unit disc).
fn disc_polyline() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0..0.95f64, 0.0..std::f64::consts::TAU), 2..9)
        .prop_map(|v| v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect())
}

/// The diameter cigar is contained in the length cigar: at every position
/// the side diameters are at most the side lengths, so `A_diam <= A_length`.
pub fn cigar_inclusion() -> Result<(), String> {
    let dom = unit_disc();
    outcome(runner().run(&disc_polyline(), |pts| {
        let curve = Curve::new(pts).unwrap();
        let rep = check_cigar(&curve, dom, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(rep.a_diam <= rep.a_length * (1.0 + 1e-12) + 1e-15, "{} > {}", rep.a_diam, rep.a_length);
        let a = rep.a_length;
        let at = check_cigar(&curve, dom, Some(a)).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(at.pass_length, Some(true));
        prop_assert_eq!(at.pass_diameter, Some(true));
        Ok(())
    }))
}

fn slit_disc_graph() -> &'static MetricGraph {
    static G: OnceLock<MetricGraph> = OnceLock::new();
    G.get_or_init(|| {
        let dom = DomainSpec::new(
            "disc with slit",
            false,
            vec![BoundaryComponent::disc(0.0, 0.0, 1.0), BoundaryComponent::segment(-0.5, 0.0, 0.5, 0.0)],
        )
        .unwrap();
        MetricGraph::build(&dom, 2e-2, Window::new(c(-1.0, -1.0), c(1.0, 1.0))).unwrap()
    })
}

/// `|a - b| <= rho_lo <= rho_hi <= min(2 rho_lo, lambda)` for the inner
/// distances of random pairs in a slit disc.
pub fn rho_bracket() -> Result<(), String> {
    let graph = slit_disc_graph();
    let dom = graph.dom();
    let pair = ((0.05..0.9f64, 0.0..std::f64::consts::TAU), (0.05..0.9f64, 0.0..std::f64::consts::TAU));
    outcome(runner().run(&pair, |((r1, t1), (r2, t2))| {
        let (a, b) = (Complex64::from_polar(r1, t1), Complex64::from_polar(r2, t2));
        prop_assume!(dom.dist_euclidean(a) > 0.02 && dom.dist_euclidean(b) > 0.02);
        let d = inner_distances_on(graph, a, b).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let tol = 1e-12 * (1.0 + d.lambda);
        prop_assert!((a - b).norm() <= d.rho_lo + tol, "chord {} > rho_lo {}", (a - b).norm(), d.rho_lo);
        prop_assert!(d.rho_lo <= d.rho_hi + tol);
        prop_assert!(d.rho_hi <= 2.0 * d.rho_lo + tol, "rho_hi {} > 2 rho_lo {}", d.rho_hi, d.rho_lo);
        prop_assert!(d.rho_hi <= d.lambda + tol, "rho_hi {} > lambda {}", d.rho_hi, d.lambda);
        Ok(())
    }))
}

/// Up to four small complementary pieces, one per cell of a 2x2 grid of
/// spacing 2, so they are pairwise disjoint by construction.
fn small_pieces() -> impl Strategy<Value = Vec<BoundaryComponent>> {
    let piece = (0u8..3, -0.4..0.4f64, -0.4..0.4f64, 0.05..0.4f64, 0.0..std::f64::consts::PI);
    prop::collection::vec(prop::option::of(piece), 4).prop_map(|cells| {
        cells
            .into_iter()
            .enumerate()
            .filter_map(|(k, p)| {
                let (kind, dx, dy, s, t) = p?;
                let (x, y) = (2.0 * (k % 2) as f64 + dx, 2.0 * (k / 2) as f64 + dy);
                let (ux, uy) = (s * t.cos(), s * t.sin());
                Some(match kind {
                    0 => BoundaryComponent::disc(x, y, s),
                    1 => BoundaryComponent::segment(x - ux, y - uy, x + ux, y + uy),
                    _ => BoundaryComponent::point(x, y),
                })
            })
            .collect()
    })
}

/// Rerouted curves meet no complementary component and keep their endpoints.
pub fn avoid_boundary_containment() -> Result<(), String> {
    let input = (small_pieces(), prop::collection::vec((-1.0..3.0f64, -1.0..3.0f64), 2..5));
    outcome(runner().run(&input, |(pieces, pts)| {
        let dom = DomainSpec::new("pieces", true, pieces).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let pts: Vec<Complex64> = pts.into_iter().map(|(x, y)| c(x, y)).collect();
        prop_assume!(dom.dist_euclidean(pts[0]) > 1e-3 && dom.dist_euclidean(*pts.last().unwrap()) > 1e-3);
        let curve = Curve::new(pts).unwrap();
        let out = avoid_boundary(&curve, &dom, 1.0).map_err(|e| TestCaseError::fail(format!("{e} on {dom:?}")))?;
        let v = out.vertices();
        prop_assert_eq!(v[0], curve.start());
        prop_assert_eq!(*v.last().unwrap(), curve.end());
        for z in v {
            prop_assert!(dom.contains_finite(*z), "vertex {z} outside the domain");
        }
        for w in v.windows(2) {
            prop_assert!(dom.components_hit(w[0], w[1]).is_empty(), "edge {} -> {} meets the complement", w[0], w[1]);
        }
        Ok(())
    }))
}

/// A circle domain is accepted exactly when its discs are pairwise
/// disjoint and its points lie outside every disc.
pub fn circle_domain_disjointness() -> Result<(), String> {
    let disc = (-5.0..5.0f64, -5.0..5.0f64, 0.1..2.0f64);
    let input = (prop::collection::vec(disc, 1..6), prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 0..3));
    outcome(runner().run(&input, |(discs, points)| {
        let discs: Vec<Disc> = discs.into_iter().map(|(x, y, r)| Disc { center: c(x, y), radius: r }).collect();
        let points: Vec<Complex64> = points.into_iter().map(|(x, y)| c(x, y)).collect();
        let disjoint = discs.iter().enumerate().all(|(i, d)| {
            discs[i + 1..].iter().all(|e| (d.center - e.center).norm() > d.radius + e.radius)
                && points.iter().all(|p| (p - d.center).norm() > d.radius)
        });
        match CircleDomain::new(discs.clone(), points.clone()) {
            Ok(cd) => {
                prop_assert!(disjoint, "accepted overlapping discs");
                for (i, d) in cd.discs.iter().enumerate() {
                    for e in &cd.discs[i + 1..] {
                        prop_assert!((d.center - e.center).norm() - d.radius - e.radius > 0.0);
                    }
                }
            }
            Err(_) => prop_assert!(!disjoint, "rejected a valid circle domain"),
        }
        Ok(())
    }))
}

/// Every suite with its name, in a fixed order.
pub fn all() -> Vec<(&'static str, fn() -> Result<(), String>)> {
    vec![
        ("metric axioms", metric_axioms as fn() -> Result<(), String>),
        ("cigar inclusion", cigar_inclusion),
        ("rho bracket", rho_bracket),
        ("avoid_boundary containment", avoid_boundary_containment),
        ("circle domain disjointness", circle_domain_disjointness),
    ]
}
