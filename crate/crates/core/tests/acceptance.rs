//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Built without the libtest harness so the lines are printed by a plain
//! `cargo test`.

mod common;

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;

use circuma::approximation::approximation_sequence;
use circuma::curve::Curve;
use circuma::graph::{qh_distance, MetricGraph, Weighting};
use circuma::hyperbolicity::{delta_four_point, four_point_delta, sampling_window, DeltaOptions};
use circuma::koebe::{
    circle_ring_modulus, condenser_modulus, koebe_iterate, mobius_rigidity_check, KoebeOptions, KoebeResult,
};
use circuma::qh::verify_comparison;
use circuma::sampling::{random_points, rng};
use circuma::sphere_bridge::{length_constant, spherical_to_euclidean_surgery, SurgeryCase};
use circuma::uniformity::{
    count_large_components, estimate_uniformity, find_uniform_curve, spherical_length_cigar, verify_separation,
};
use circuma::{DomainSpec, Flavor, PlanePoint, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn shipped(name: &str) -> DomainSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../domains").join(name);
    DomainSpec::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// `n` seeded pairs of domain points kept 2% of the window away from the boundary.
fn random_pairs(dom: &DomainSpec, n: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
    let window = sampling_window(dom);
    let pts = random_points(dom, window, 2 * n, 0.02 * window.extent(), &mut rng(seed));
    pts.chunks_exact(2).map(|p| (p[0], p[1])).collect()
}

fn rel(x: f64, exact: f64) -> f64 {
    (x / exact - 1.0).abs()
}

/// Closed forms `k(i, 2i) = ln 2` in the half-plane and `k(0, 1/2) = ln 2`
/// in the disc, at two resolutions.
fn criterion_1() -> Result<Outcome> {
    let half = shipped("halfplane.json");
    let disc = shipped("disc.json");
    let mut ok = true;
    let mut parts = Vec::new();
    for (h, tol) in [(1e-3, 0.01), (2.5e-4, 0.0025)] {
        let kh = qh_distance(&half, PlanePoint::new(0.0, 1.0), PlanePoint::new(0.0, 2.0), Flavor::Euclidean, h)?.value;
        let kd = qh_distance(&disc, PlanePoint::new(0.0, 0.0), PlanePoint::new(0.5, 0.0), Flavor::Euclidean, h)?.value;
        ok &= rel(kh, LN_2) < tol && rel(kd, LN_2) < tol;
        parts.push(format!("h={h:e}: half-plane err {:.2e}, disc err {:.2e} (tol {tol})", rel(kh, LN_2), rel(kd, LN_2)));
    }
    outcome(ok, parts.join("; "))
}

/// Spherical/Euclidean quasihyperbolic comparison on 1000 pairs over three domains.
fn criterion_2() -> Result<Outcome> {
    let mut violations = 0;
    let mut total = 0;
    let mut parts = Vec::new();
    for (k, (name, n)) in [("disc.json", 334), ("translated_disc.json", 333), ("disc_with_slit.json", 333)].into_iter().enumerate() {
        let dom = shipped(name);
        let pairs = random_pairs(&dom, n, 100 + k as u64);
        let rep = verify_comparison(&dom, &pairs, 1e-2, 0.02)?;
        violations += rep.violations.len();
        total += pairs.len();
        parts.push(format!("{name}: ratios [{:.3}, {:.3}] within [{:.3}, {:.3}]", rep.min_ratio, rep.max_ratio, rep.lower_constant, rep.upper_constant));
    }
    outcome(violations == 0 && total == 1000, format!("{violations} violations on {total} pairs; {}", parts.join("; ")))
}

fn trace_note(res: &KoebeResult) -> String {
    format!("tail monotone: {}", res.trace.tail_is_monotone(3))
}

/// A circle domain is a fixed point of the iteration.
fn criterion_3() -> Result<Outcome> {
    let res = koebe_iterate(&shipped("two_discs.json"), &KoebeOptions::default())?;
    let resid = res.trace.final_residual();
    outcome(
        res.sweeps == 1 && resid < 1e-6 && res.a1.norm() < 1e-6,
        format!("sweeps {}, residual {resid:.2e}, |a1| {:.2e}, {}", res.sweeps, res.a1.norm(), trace_note(&res)),
    )
}

/// The complement of `[-2, 2]` maps onto the unit disc complement with `a1 = -1`.
fn criterion_4() -> Result<Outcome> {
    let start = Instant::now();
    let res = koebe_iterate(&shipped("slit.json"), &KoebeOptions::default())?;
    let secs = start.elapsed().as_secs_f64();
    let d = &res.circle_domain.discs[0];
    let (ce, re, ae) = (d.center.norm(), (d.radius - 1.0).abs(), (res.a1 + 1.0).norm());
    outcome(
        res.circle_domain.discs.len() == 1 && ce <= 1e-3 && re <= 1e-3 && ae <= 1e-3 && secs < 10.0,
        format!("|center| {ce:.2e}, |radius-1| {re:.2e}, |a1+1| {ae:.2e}, {secs:.2}s"),
    )
}

/// Two sweep orders give maps that differ by an affine map.
fn criterion_5() -> Result<Outcome> {
    let dom = shipped("two_slits.json");
    let f = koebe_iterate(&dom, &KoebeOptions { order: Some(vec![0, 1]), ..Default::default() })?;
    let g = koebe_iterate(&dom, &KoebeOptions { order: Some(vec![1, 0]), ..Default::default() })?;
    let probes: Vec<Complex64> = (0..48)
        .flat_map(|k| {
            let t = k as f64 * PI / 24.0;
            [Complex64::from_polar(5.0, t), Complex64::from_polar(3.0, t + 0.05)]
        })
        .chain([c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.3), c(1.5, 1.0)])
        .filter(|z| dom.contains_finite(*z))
        .collect();
    let fit = mobius_rigidity_check(&f.chain, &g.chain, &probes);
    outcome(fit.residual < 1e-3, format!("affine-fit residual {:.2e} on {} probes, |a| {:.6}", fit.residual, probes.len(), fit.a.norm()))
}

/// The ring modulus is preserved by the uniformization.
fn criterion_6() -> Result<Outcome> {
    let dom = shipped("segment_and_disc.json");
    let before = condenser_modulus(&dom, 32)?;
    let res = koebe_iterate(&dom, &KoebeOptions::default())?;
    let d = &res.circle_domain.discs;
    let after = circle_ring_modulus(d[0].center, d[0].radius, d[1].center, d[1].radius)?;
    let r = rel(after, before.modulus);
    outcome(r < 0.03, format!("before {:.6}, after {after:.6}, relative difference {r:.2e}", before.modulus))
}

/// The separation lower bound never exceeds the estimated constant plus one.
fn criterion_7() -> Result<Outcome> {
    let names = ["two_discs.json", "grid.json", "multi.json", "segment_and_disc.json", "two_slits.json", "disc_with_slit.json"];
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, name) in names.into_iter().enumerate() {
        let dom = shipped(name);
        let pairs = random_pairs(&dom, 8, 200 + k as u64);
        let a_est = estimate_uniformity(&dom, &pairs, 1e-2)?.a_est;
        let implied = verify_separation(&dom, a_est).implied_a_lower;
        ok &= implied <= a_est + 1.0;
        parts.push(format!("{name} {implied:.2}<={:.2}", a_est + 1.0));
    }
    outcome(ok, parts.join(", "))
}

/// The 3x3 grid has nine large components and the packing bound covers them.
fn criterion_8() -> Result<Outcome> {
    let rep = count_large_components(&shipped("grid.json"), 0.5, 9.0, None)?;
    outcome(
        rep.count == 9 && rep.bound_measured >= 9.0,
        format!("count {}, bound {:.1} with measured constant {:.3}", rep.count, rep.bound_measured, rep.c_measured),
    )
}

/// Approximation stages are nested and ordered with a stable uniformity estimate.
fn criterion_9() -> Result<Outcome> {
    let dom = shipped("multi.json");
    let seq = approximation_sequence(&dom, &[1.5, 0.75, 0.3])?;
    let pairs = random_pairs(&dom, 8, 300);
    let a: Vec<f64> = seq.stages.iter().map(|s| estimate_uniformity(&s.domain, &pairs, 1e-2).map(|e| e.a_est)).collect::<Result<_>>()?;
    // the stages increase to the full domain, whose constant bounds theirs
    let bound = estimate_uniformity(&dom, &pairs, 1e-2)?.a_est;
    let bounded = a.iter().all(|&x| x <= 1.1 * bound);
    outcome(
        seq.nested && seq.ordered && seq.stages.len() == 3 && bounded,
        format!(
            "nested {}, ordered {}, A_est per stage {a:.3?}, full-domain constant {bound:.3} (10% slack)",
            seq.nested, seq.ordered
        ),
    )
}

/// Zero hyperbolicity on a geodesic line, stability under refinement and determinism.
fn criterion_10() -> Result<Outcome> {
    let half = shipped("halfplane.json");
    let line: Vec<Complex64> = (0..9).map(|k| c(0.0, (0.4 * k as f64).exp())).collect();
    let graph = MetricGraph::for_points(&half, 1e-2, &line)?;
    let d = graph.distance_matrix(&line, Weighting::Qh(Flavor::Euclidean))?;
    let err = (0..line.len())
        .flat_map(|i| (0..line.len()).map(move |j| (i, j)))
        .map(|(i, j)| (d[i][j] - 0.4 * (i as f64 - j as f64).abs()).abs())
        .fold(0.0, f64::max);
    // a metric within `err` of a tree metric has four-point constant at most 3 err
    let delta_line = four_point_delta(&d, 1);
    let line_ok = delta_line <= 3.0 * err + 1e-12;

    let disc = shipped("disc.json");
    let opts = DeltaOptions { seed: 5, ..Default::default() };
    let coarse = delta_four_point(&disc, 16, Flavor::Euclidean, 2e-2, opts)?.delta_four_point;
    let fine = delta_four_point(&disc, 16, Flavor::Euclidean, 1e-2, opts)?.delta_four_point;
    let again = delta_four_point(&disc, 16, Flavor::Euclidean, 1e-2, opts)?.delta_four_point;
    let stable = rel(fine, coarse) <= 0.10;
    outcome(
        line_ok && stable && fine == again,
        format!(
            "line delta {delta_line:.2e} <= 3*{err:.2e}; disc delta {coarse:.4} -> {fine:.4} (change {:.1}%), repeat identical: {}",
            100.0 * rel(fine, coarse),
            fine == again
        ),
    )
}

/// Surgery length bound, antipodal arc equality and the spherical cigar length bound.
fn criterion_11() -> Result<Outcome> {
    let dom = shipped("small_disc.json");
    let input: Curve = serde_json::from_str(&std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../domains/excursion.json"),
    )?)?;
    let a = 1.0;
    let s = spherical_to_euclidean_surgery(&input, &dom, a)?;
    let bound = 2.0 * length_constant(a) * input.length_spherical();
    let length_ok = s.case == SurgeryCase::Case2b && s.output.length() <= bound;
    let arc = &s.arcs[0];
    let eq_err = (arc.arc_length - FRAC_PI_2 * (arc.z1 - arc.z2).norm()).abs();

    // curves found by the uniform-curve search pass the spherical length
    // cigar at their own constant, so their spherical length is at most 2 pi A
    let mut worst: f64 = 0.0;
    let mut cigar_ok = true;
    for (k, name) in ["two_discs.json", "slit.json", "disc_with_slit.json"].into_iter().enumerate() {
        let d = shipped(name);
        for (x, y) in random_pairs(&d, 4, 400 + k as u64) {
            let curve = find_uniform_curve(&d, x, y, 1e-2)?.report.curve;
            let big_a = spherical_length_cigar(&curve, &d)?;
            cigar_ok &= curve.length_spherical() <= 2.0 * PI * big_a * (1.0 + 1e-12);
            worst = worst.max(curve.length_spherical() / (2.0 * PI * big_a));
        }
    }
    outcome(
        length_ok && eq_err <= 1e-9 && cigar_ok,
        format!(
            "case {:?}, output length {:.4} <= {bound:.4}; antipodal equality error {eq_err:.1e}; max l_s/(2 pi A) {worst:.3}",
            s.case,
            s.output.length()
        ),
    )
}

/// Randomized property suites.
fn criterion_12() -> Result<Outcome> {
    let mut failed = Vec::new();
    for (name, suite) in common::all() {
        if let Err(e) = suite() {
            failed.push(format!("{name}: {e}"));
        }
    }
    let n = common::all().len();
    if failed.is_empty() {
        outcome(true, format!("{n} suites x {} cases", common::CASES))
    } else {
        outcome(false, failed.join("; "))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 12] = [
        ("quasihyperbolic closed forms", criterion_1),
        ("spherical/Euclidean comparison", criterion_2),
        ("circle domain fixed point", criterion_3),
        ("slit uniformization", criterion_4),
        ("rigidity under sweep order", criterion_5),
        ("modulus invariance", criterion_6),
        ("separation consistency", criterion_7),
        ("counting bound", criterion_8),
        ("approximation sequence", criterion_9),
        ("hyperbolicity", criterion_10),
        ("surgery", criterion_11),
        ("property suites", criterion_12),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", k + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == (k + 1).to_string()) {
            continue;
        }
        let start = Instant::now();
        let (status, detail) = match run() {
            Ok(o) => (if o.pass { "PASS" } else { "FAIL" }, o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("{id} ({title}): {status} [{:.1}s] {detail}", start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
