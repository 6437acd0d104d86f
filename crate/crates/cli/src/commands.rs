//! Subcommand implementations. Each returns a report; errors become exit code 2.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use circuma::approximation::approximation_sequence;
use circuma::curve::Curve;
use circuma::graph::{qh_distance, Window};
use circuma::hyperbolicity::{delta_four_point, sampling_window, DeltaOptions};
use circuma::koebe::{koebe_iterate, sampled_expansion, KoebeOptions};
use circuma::qh::verify_comparison;
use circuma::sampling::{random_points, rng};
use circuma::sphere_bridge::{check_distance_lemma, spherical_to_euclidean_surgery};
use circuma::uniformity::{
    check_llc, count_large_components, estimate_uniformity, is_circle_domain, sample_balls, verify_bounded_turning,
    verify_separation, LlcOptions,
};
use circuma::{BoundaryComponent, DomainSpec, Error, Flavor, PlanePoint, Result};

use crate::config::RunConfig;
use crate::report::{Check, Report};
use crate::svg::{write_svg, Overlay};
use crate::Command;

/// Parse `x,y` or `inf`.
pub fn parse_point(s: &str) -> Result<PlanePoint> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(PlanePoint::Infinity);
    }
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => {
            let x: f64 = x.parse().map_err(|_| Error::Parse(format!("bad coordinate '{x}'")))?;
            let y: f64 = y.parse().map_err(|_| Error::Parse(format!("bad coordinate '{y}'")))?;
            Ok(PlanePoint::new(x, y))
        }
        _ => Err(Error::Parse(format!("expected 'x,y' or 'inf', got '{s}'"))),
    }
}

fn load_domain(path: &Path) -> Result<DomainSpec> {
    DomainSpec::from_file(path).map_err(|e| match e {
        Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn out_path(cfg: &RunConfig, name: &str) -> Option<PathBuf> {
    cfg.out_dir.as_ref().map(|d| d.join(name))
}

fn write_file(cfg: &RunConfig, report: &mut Report, name: &str, contents: &str) -> Result<()> {
    if let Some(p) = out_path(cfg, name) {
        std::fs::write(&p, contents)?;
        report.files.push(name.to_string());
    }
    Ok(())
}

fn svg(cfg: &RunConfig, report: &mut Report, name: &str, dom: &DomainSpec, overlays: &[Overlay]) -> Result<()> {
    if cfg.svg {
        if let Some(p) = out_path(cfg, name) {
            write_svg(&p, dom, overlays)?;
            report.files.push(name.to_string());
        }
    }
    Ok(())
}

/// `n` seeded pairs of points of the domain away from the boundary.
fn random_pairs(dom: &DomainSpec, n: usize, seed: u64) -> Result<Vec<(Complex64, Complex64)>> {
    let window = sampling_window(dom);
    let pts = random_points(dom, window, 2 * n, 0.02 * window.extent(), &mut rng(seed));
    if pts.len() < 2 {
        return Err(Error::EmptyWindow);
    }
    Ok(pts.chunks_exact(2).map(|p| (p[0], p[1])).collect())
}

pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Report> {
    let mut echo = cfg.echo();
    if let Command::QhDist { domain, .. }
    | Command::DeltaEstimate { domain, .. }
    | Command::CheckUniform { domain, .. }
    | Command::VerifyGeometry { domain, .. }
    | Command::Approximate { domain, .. }
    | Command::Uniformize { domain, .. }
    | Command::SphereCheck { domain, .. } = cmd
    {
        echo.push(("domain".into(), domain.display().to_string()));
    }
    let mut report = Report::new(cmd.name(), echo);
    match cmd {
        Command::QhDist { domain, from, to, flavor } => {
            qh_dist(&mut report, cfg, &load_domain(domain)?, parse_point(from)?, parse_point(to)?, flavor.parse()?)?
        }
        Command::DeltaEstimate { domain, flavor } => {
            let dom = load_domain(domain)?;
            let est = delta_four_point(&dom, cfg.samples, flavor.parse()?, cfg.h, DeltaOptions { seed: cfg.seed, ..Default::default() })?;
            report.estimate(Check::Delta, Some(format!("m={}", est.sample_size)), est.delta_four_point);
        }
        Command::CheckUniform { domain, a } => check_uniform(&mut report, cfg, &load_domain(domain)?, *a)?,
        Command::VerifyGeometry { domain, r, big_r, a, llc_factor } => {
            verify_geometry(&mut report, cfg, &load_domain(domain)?, *r, *big_r, *a, *llc_factor)?
        }
        Command::Approximate { domain, thresholds } => approximate(&mut report, cfg, &load_domain(domain)?, thresholds)?,
        Command::Uniformize { domain, max_sweeps, order } => {
            uniformize(&mut report, cfg, &load_domain(domain)?, *max_sweeps, order.clone())?
        }
        Command::SphereCheck { domain, a, curve } => {
            let curve = match curve {
                Some(p) => Some(serde_json::from_str::<Curve>(&std::fs::read_to_string(p)?)?),
                None => None,
            };
            sphere_check(&mut report, cfg, &load_domain(domain)?, *a, curve.as_ref())?
        }
        Command::Demo => demo(&mut report, cfg)?,
    }
    Ok(report)
}

fn qh_dist(report: &mut Report, cfg: &RunConfig, dom: &DomainSpec, x: PlanePoint, y: PlanePoint, flavor: Flavor) -> Result<()> {
    let g = qh_distance(dom, x, y, flavor, cfg.h)?;
    report.estimate(Check::QhDistance, Some(flavor.to_string()), g.value);
    report.estimate(Check::GeodesicLength, None, g.path.length());
    write_file(cfg, report, "geodesic.json", &serde_json::to_string_pretty(&g.path)?)?;
    svg(cfg, report, "geodesic.svg", dom, &[Overlay::Curve(g.path.vertices().to_vec())])
}

fn check_uniform(report: &mut Report, cfg: &RunConfig, dom: &DomainSpec, a: Option<f64>) -> Result<()> {
    let pairs = random_pairs(dom, cfg.samples, cfg.seed)?;
    let est = estimate_uniformity(dom, &pairs, cfg.h)?;
    let label = Some(format!("pairs={}", pairs.len()));
    match a {
        Some(a) => report.check(Check::UniformityConstant, label, est.a_est, a, est.a_est <= a),
        None => report.estimate(Check::UniformityConstant, label, est.a_est),
    }
    let sep = verify_separation(dom, est.a_est);
    report.check(Check::SeparationConsistency, None, sep.implied_a_lower, est.a_est + 1.0, sep.implied_a_lower <= est.a_est + 1.0);
    let worst = est.table.iter().max_by(|p, q| p.a_pair.total_cmp(&q.a_pair));
    let overlays: Vec<Overlay> = worst.map(|w| Overlay::Curve(w.report.curve.vertices().to_vec())).into_iter().collect();
    svg(cfg, report, "uniform_curve.svg", dom, &overlays)
}

fn verify_geometry(
    report: &mut Report,
    cfg: &RunConfig,
    dom: &DomainSpec,
    r: Option<f64>,
    big_r: Option<f64>,
    a: f64,
    llc_factor: f64,
) -> Result<()> {
    if !dom.contains_infinity && !dom.components.is_empty() {
        let pairs = random_pairs(dom, cfg.samples, cfg.seed)?;
        let rep = verify_comparison(dom, &pairs, cfg.h, cfg.slack)?;
        let lo = rep.lower_constant * (1.0 - cfg.slack);
        let hi = rep.upper_constant * (1.0 + cfg.slack);
        report.check(Check::ComparisonLower, None, rep.min_ratio, lo, rep.min_ratio >= lo);
        report.check(Check::ComparisonUpper, None, rep.max_ratio, hi, rep.max_ratio <= hi);
    }
    if dom.components.len() > 1 {
        let sep = verify_separation(dom, a);
        report.check(Check::SeparationRatio, Some(format!("a={a}")), sep.worst_ratio, sep.threshold, sep.worst_ratio <= sep.threshold);
    }
    for (i, c) in dom.components.iter().enumerate() {
        if c.is_point() || matches!(c, BoundaryComponent::Halfplane { .. }) {
            continue;
        }
        let bt = verify_bounded_turning(c, cfg.samples, cfg.seed)?;
        report.estimate(Check::BoundedTurning, Some(format!("component={i}")), bt.l_est);
    }
    if let (Some(r), Some(big_r)) = (r, big_r) {
        let cnt = count_large_components(dom, r, big_r, None)?;
        report.check(Check::LargeComponentCount, None, cnt.count, cnt.bound_measured, cnt.count as f64 <= cnt.bound_measured);
    }
    if is_circle_domain(dom) && !dom.components.is_empty() {
        let balls = sample_balls(dom, cfg.samples, cfg.seed);
        let llc = check_llc(dom, &balls, llc_factor, LlcOptions { seed: cfg.seed, ..Default::default() })?;
        report.check(
            Check::Llc,
            Some(format!("balls={} pairs={}", llc.balls, llc.pairs_checked)),
            llc.failures.len(),
            0,
            llc.failures.is_empty(),
        );
    }
    svg(cfg, report, "domain.svg", dom, &[])
}

fn approximate(report: &mut Report, cfg: &RunConfig, dom: &DomainSpec, thresholds: &[f64]) -> Result<()> {
    let seq = approximation_sequence(dom, thresholds)?;
    for (k, st) in seq.stages.iter().enumerate() {
        report.estimate(Check::StageComponents, Some(format!("stage={k} threshold={}", st.threshold)), st.kept.len());
        write_file(cfg, report, &format!("stage_{k}.json"), &st.domain.to_json_string())?;
        svg(cfg, report, &format!("stage_{k}.svg"), &st.domain, &[])?;
    }
    report.check(Check::Nested, None, seq.nested, true, seq.nested);
    report.check(Check::Ordered, None, seq.ordered, true, seq.ordered);
    Ok(())
}

fn uniformize(report: &mut Report, cfg: &RunConfig, dom: &DomainSpec, max_sweeps: usize, order: Option<Vec<usize>>) -> Result<()> {
    let opts = KoebeOptions { max_sweeps, tol: cfg.tol_circ, fit_tol: cfg.tol_fit, order, ..Default::default() };
    let res = koebe_iterate(dom, &opts)?;
    report.estimate(Check::Sweeps, None, res.sweeps);
    let resid = res.trace.final_residual();
    report.check(Check::Circularity, None, resid, cfg.tol_circ, resid < cfg.tol_circ);
    report.estimate(Check::LaurentA1, Some("re".into()), res.a1.re);
    report.estimate(Check::LaurentA1, Some("im".into()), res.a1.im);
    let (lead, a0, a1) = sampled_expansion(&res.chain);
    let dev = (lead - 1.0).norm().max(a0.norm()).max((a1 - res.a1).norm());
    report.check(Check::NormalizedAtInfinity, None, dev, 1e-6, dev < 1e-6);
    let discs = &res.circle_domain.discs;
    let gap = (0..discs.len())
        .flat_map(|i| (i + 1..discs.len()).map(move |j| (i, j)))
        .map(|(i, j)| (discs[i].center - discs[j].center).norm() - discs[i].radius - discs[j].radius)
        .fold(f64::INFINITY, f64::min);
    if discs.len() > 1 {
        report.check(Check::DiscsDisjoint, Some("min_gap".into()), gap, 0, gap > 0.0);
    }
    let out = res.circle_domain.to_domain_spec(&format!("{} (circle domain)", dom.name))?;
    write_file(cfg, report, "circle_domain.json", &out.to_json_string())?;
    write_file(cfg, report, "map_chain.json", &res.chain.to_json_string())?;
    write_file(cfg, report, "convergence.json", &serde_json::to_string_pretty(&res.trace)?)?;
    svg(cfg, report, "before.svg", dom, &[])?;
    svg(cfg, report, "after.svg", &out, &[])
}

fn sphere_check(report: &mut Report, cfg: &RunConfig, dom: &DomainSpec, a: f64, curve: Option<&Curve>) -> Result<()> {
    let window = Window::new(Complex64::new(-a, -a), Complex64::new(a, a));
    let samples: Vec<Complex64> = random_points(dom, window, 4 * cfg.samples, 0.0, &mut rng(cfg.seed))
        .into_iter()
        .filter(|z| z.norm() <= a)
        .take(cfg.samples)
        .collect();
    let lemma = check_distance_lemma(dom, a, &samples)?;
    report.check(
        Check::DistanceComparison,
        Some(format!("samples={} constant={}", lemma.records.len(), lemma.constant)),
        lemma.violations.len(),
        0,
        lemma.violations.is_empty(),
    );
    let mut overlays = vec![
        Overlay::ControlCircle(Complex64::new(0.0, 0.0), a),
        Overlay::ControlCircle(Complex64::new(0.0, 0.0), 2.0 * a),
        Overlay::ControlCircle(Complex64::new(0.0, 0.0), 3.0 * a),
    ];
    if let Some(curve) = curve {
        let s = spherical_to_euclidean_surgery(curve, dom, a)?;
        report.estimate(Check::SurgeryCase, None, serde_json::to_value(s.case)?.as_str().unwrap_or("unknown"));
        for (k, arc) in s.arcs.iter().enumerate() {
            let bound = std::f64::consts::FRAC_PI_2 * arc.chord;
            report.check(Check::ArcBound, Some(format!("arc={k}")), arc.arc_length, bound, arc.arc_bound_holds);
        }
        if let Some(ok) = s.length_bound_holds {
            let bound = 2.0 * s.length_constant * s.input_spherical_length;
            report.check(Check::LengthBound, None, s.output_length, bound, ok);
        }
        report.estimate(Check::SurgeryCigar, None, s.cigar_constant);
        write_file(cfg, report, "surgery.json", &serde_json::to_string_pretty(&s.output)?)?;
        overlays.push(Overlay::Curve(curve.vertices().to_vec()));
        overlays.push(Overlay::Curve(s.output.vertices().to_vec()));
    }
    svg(cfg, report, "sphere_check.svg", dom, &overlays)
}

/// Built-in examples with closed-form answers.
fn demo(report: &mut Report, cfg: &RunConfig) -> Result<()> {
    let disc = DomainSpec::new("unit disc", false, vec![BoundaryComponent::disc(0.0, 0.0, 1.0)])?;
    let g = qh_distance(&disc, PlanePoint::new(0.0, 0.0), PlanePoint::new(0.5, 0.0), Flavor::Euclidean, 1e-3)?;
    let ln2 = std::f64::consts::LN_2;
    report.check(Check::QhDistance, Some("disc 0 to 1/2".into()), g.value, ln2, (g.value / ln2 - 1.0).abs() < 0.01);

    let slit = DomainSpec::new("slit", true, vec![BoundaryComponent::segment(-2.0, 0.0, 2.0, 0.0)])?;
    let res = koebe_iterate(&slit, &KoebeOptions { tol: cfg.tol_circ, fit_tol: cfg.tol_fit, ..Default::default() })?;
    report.check(Check::LaurentA1, Some("slit".into()), res.a1.re, -1.0, (res.a1 + 1.0).norm() < 1e-3);

    let small = DomainSpec::new("small disc", true, vec![BoundaryComponent::disc(0.0, 0.0, 0.5)])?;
    let curve = Curve::new(
        [(1.5, 0.0), (5.0, 0.0), (5.0, 5.0), (-5.0, 5.0), (-5.0, 0.0), (-1.5, 0.0)]
            .iter()
            .map(|&(x, y)| Complex64::new(x, y))
            .collect(),
    )?;
    let s = spherical_to_euclidean_surgery(&curve, &small, 1.0)?;
    let arc = &s.arcs[0];
    let bound = std::f64::consts::FRAC_PI_2 * arc.chord;
    report.check(Check::ArcBound, Some("antipodal".into()), arc.arc_length, bound, (arc.arc_length - bound).abs() < 1e-9);

    svg(cfg, report, "demo_slit_before.svg", &slit, &[])?;
    let out = res.circle_domain.to_domain_spec("slit (circle domain)")?;
    svg(cfg, report, "demo_slit_after.svg", &out, &[])?;
    svg(
        cfg,
        report,
        "demo_surgery.svg",
        &small,
        &[
            Overlay::ControlCircle(Complex64::new(0.0, 0.0), 3.0),
            Overlay::Curve(curve.vertices().to_vec()),
            Overlay::Curve(s.output.vertices().to_vec()),
        ],
    )
}
