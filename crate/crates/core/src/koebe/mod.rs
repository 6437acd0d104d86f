//! Circle-domain uniformization of finitely connected domains containing infinity.
//!
//! Koebe's iteration: each sweep visits the non-point components in turn and
//! applies the normalized exterior map that sends the current image of that
//! component onto a disc. Segments are first opened onto discs by an
//! inverse Joukowski map; every other component is mapped through the
//! correspondence-iteration fit of its trace. All traces and point
//! components are transported through every step.

pub mod chain;
pub mod exterior;
pub mod fourier;
pub mod modulus;
pub mod probes;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::component::{resample_closed_linear, BoundaryComponent};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};

pub use chain::{normalize_at_infinity, sampled_expansion, ConformalMap, FnMap, Identity, MapChain, MapStep};
pub use exterior::{circularity_residual, exterior_map, exterior_map_with_tolerance, fit_circle, segment_exterior_map, ExteriorMap, LaurentSeries};
pub use modulus::{annulus_modulus, circle_ring_modulus, collinear_slits_modulus, condenser_modulus, CondenserEstimate};
pub use probes::{mobius_rigidity_check, qs_distortion_probe, DistortionSample, DistortionTable, RigidityFit};

/// Per-sweep monitoring data of a uniformization run.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ConvergenceTrace {
    pub sweeps: Vec<SweepRecord>,
}

/// Circularity residual per component (zero for points) and Hausdorff
/// change of the complement samples over the sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub residuals: Vec<f64>,
    pub hausdorff: f64,
}

impl ConvergenceTrace {
    /// Largest residual of each sweep.
    pub fn max_residuals(&self) -> Vec<f64> {
        self.sweeps.iter().map(|s| s.residuals.iter().copied().fold(0.0, f64::max)).collect()
    }

    /// Whether the largest residual is non-increasing over the last `k` sweeps
    /// (trivially true for shorter runs).
    pub fn tail_is_monotone(&self, k: usize) -> bool {
        let m = self.max_residuals();
        m[m.len().saturating_sub(k)..].windows(2).all(|w| w[1] <= w[0])
    }

    /// Largest residual of the last sweep.
    pub fn final_residual(&self) -> f64 {
        self.sweeps.last().map_or(f64::INFINITY, |s| s.residuals.iter().copied().fold(0.0, f64::max))
    }
}

/// A round disc `|z - center| <= radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disc {
    pub center: Complex64,
    pub radius: f64,
}

/// A domain containing infinity whose complement consists of closed discs and points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleDomain {
    pub discs: Vec<Disc>,
    pub points: Vec<Complex64>,
    pub contains_infinity: bool,
}

impl CircleDomain {
    /// Validated construction: positive radii, pairwise disjoint discs,
    /// points outside all discs.
    pub fn new(discs: Vec<Disc>, points: Vec<Complex64>) -> Result<Self> {
        for (i, d) in discs.iter().enumerate() {
            if !(d.radius > 0.0) || !d.center.norm().is_finite() {
                return Err(Error::InvalidDomain(format!("disc {i} has radius {}", d.radius)));
            }
            for (j, e) in discs.iter().enumerate().skip(i + 1) {
                if (d.center - e.center).norm() <= d.radius + e.radius {
                    return Err(Error::InvalidDomain(format!("discs {i} and {j} overlap")));
                }
            }
            for p in &points {
                if (p - d.center).norm() <= d.radius {
                    return Err(Error::InvalidDomain(format!("point {p} lies in disc {i}")));
                }
            }
        }
        Ok(CircleDomain { discs, points, contains_infinity: true })
    }

    pub fn to_domain_spec(&self, name: &str) -> Result<DomainSpec> {
        let comps = self
            .discs
            .iter()
            .map(|d| BoundaryComponent::disc(d.center.re, d.center.im, d.radius))
            .chain(self.points.iter().map(|p| BoundaryComponent::point(p.re, p.im)))
            .collect();
        DomainSpec::new(name, true, comps)
    }
}

/// Symmetric Hausdorff distance of two finite point sets.
pub fn hausdorff_distance(e: &[Complex64], f: &[Complex64]) -> Result<f64> {
    if e.is_empty() || f.is_empty() {
        return Err(Error::EmptySet);
    }
    let directed = |a: &[Complex64], b: &[Complex64]| {
        a.par_iter()
            .map(|p| b.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .reduce(|| 0.0, f64::max)
    };
    Ok(directed(e, f).max(directed(f, e)))
}

/// Parameters of [`koebe_iterate`].
#[derive(Debug, Clone, PartialEq)]
pub struct KoebeOptions {
    pub max_sweeps: usize,
    /// Relative circularity at which the iteration stops.
    pub tol: f64,
    /// Negative-power modes of the exterior maps.
    pub modes: usize,
    /// Samples per closed component trace.
    pub samples: usize,
    /// Bound on each exterior-map fit residual relative to the trace diameter.
    pub fit_tol: f64,
    /// Visiting order of the non-point components (default: decreasing diameter).
    pub order: Option<Vec<usize>>,
}

impl Default for KoebeOptions {
    fn default() -> Self {
        KoebeOptions { max_sweeps: 50, tol: 1e-6, modes: exterior::DEFAULT_MODES, samples: 256, fit_tol: exterior::FIT_TOLERANCE, order: None }
    }
}

/// Output of a uniformization run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoebeResult {
    pub circle_domain: CircleDomain,
    /// Disc (or point) index in the output for each input component.
    pub image_of: Vec<ImageIndex>,
    pub chain: MapChain,
    pub trace: ConvergenceTrace,
    pub sweeps: usize,
    /// Coefficient of `1/z` of the normalized map.
    pub a1: Complex64,
}

/// Where an input component ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ImageIndex {
    Disc(usize),
    Point(usize),
}

/// Current image of one component.
#[derive(Debug, Clone)]
enum Trace {
    /// An arc (image of a segment not yet opened), from one end to the other.
    Slit(Vec<Complex64>),
    Closed(Vec<Complex64>),
    Point(Complex64),
}

/// Samples of a segment clustered toward its ends, so that they are
/// equally spaced in angle once the segment is opened onto a circle.
fn slit_samples(a: Complex64, b: Complex64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let t = 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos());
            a + (b - a) * t
        })
        .collect()
}

fn complement_samples(traces: &[Trace]) -> Vec<Complex64> {
    traces
        .iter()
        .flat_map(|t| match t {
            Trace::Slit(p) | Trace::Closed(p) => p.clone(),
            Trace::Point(z) => vec![*z],
        })
        .collect()
}

fn residual_of(t: &Trace) -> f64 {
    match t {
        Trace::Slit(_) => 1.0,
        Trace::Closed(p) => circularity_residual(p),
        Trace::Point(_) => 0.0,
    }
}

/// Apply `steps` to every trace except `skip`.
fn transport(traces: &mut [Trace], skip: usize, steps: &[MapStep]) {
    traces.par_iter_mut().enumerate().filter(|(k, _)| *k != skip).for_each(|(_, t)| {
        let map = |z: Complex64| steps.iter().fold(z, |z, s| s.eval(z));
        match t {
            Trace::Slit(p) | Trace::Closed(p) => p.iter_mut().for_each(|z| *z = map(*z)),
            Trace::Point(z) => *z = map(*z),
        }
    });
}

/// Open an arc onto a closed curve: returns the opening step and the image
/// of the arc (both of its sides).
fn open_arc(arc: &[Complex64], samples: usize) -> (MapStep, Vec<Complex64>) {
    let (p, q) = (arc[0], arc[arc.len() - 1]);
    let center = 0.5 * (p + q);
    let half = 0.5 * (q - p);
    let h = half.norm();
    let rotation = half / h;
    let bulge = arc.iter().map(|z| ((z - center) * rotation.conj()).im.abs()).fold(0.0, f64::max);
    let lens = if bulge > 1e-12 * h { arc.to_vec() } else { Vec::new() };
    let step = MapStep::InvJoukowski { center, half_length: h, rotation, lens };
    // the two boundary values at each arc point, split into the two sides
    let mut upper = Vec::with_capacity(arc.len());
    let mut lower = Vec::with_capacity(arc.len());
    for (k, z) in arc.iter().enumerate() {
        let u = (z - center) * rotation.conj();
        let root = (u - h).sqrt() * (u + h).sqrt();
        let (w1, w2) = (0.5 * (u + root), 0.5 * (u - root));
        let (hi, lo) = if w1.im >= w2.im { (w1, w2) } else { (w2, w1) };
        upper.push(center + rotation * hi);
        if k > 0 && k + 1 < arc.len() {
            lower.push(center + rotation * lo);
        }
    }
    lower.reverse();
    upper.extend(lower);
    (step, exterior_resample(&upper, samples))
}

fn exterior_resample(closed: &[Complex64], samples: usize) -> Vec<Complex64> {
    fourier::resample_arclength(closed, samples)
}

fn circle_samples(c: Complex64, r: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|k| c + Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64)).collect()
}

/// Uniformize `dom` onto a circle domain by Koebe's iteration.
pub fn koebe_iterate(dom: &DomainSpec, opts: &KoebeOptions) -> Result<KoebeResult> {
    if !dom.contains_infinity {
        return Err(Error::PreconditionFailed("infinity must belong to the domain".into()));
    }
    let n = dom.components.len();
    let mut traces: Vec<Trace> = dom
        .components
        .iter()
        .map(|c| match c {
            BoundaryComponent::Disc { .. } => Ok(Trace::Closed(c.boundary_samples(opts.samples))),
            BoundaryComponent::Segment { x1, y1, x2, y2 } => Ok(Trace::Slit(slit_samples(
                Complex64::new(*x1, *y1),
                Complex64::new(*x2, *y2),
                opts.samples / 2 + 1,
            ))),
            BoundaryComponent::Polyline { .. } => Ok(Trace::Closed(resample_closed_linear(&c.polygon(), opts.samples))),
            BoundaryComponent::Point { x, y } => Ok(Trace::Point(Complex64::new(*x, *y))),
            BoundaryComponent::Halfplane { .. } => Err(Error::Unsupported("half-plane component".into())),
        })
        .collect::<Result<_>>()?;
    let geo = dom.component_geometry();
    let order: Vec<usize> = match &opts.order {
        Some(o) => {
            let mut sorted = o.clone();
            sorted.sort_unstable();
            let expected: Vec<usize> = (0..n).filter(|&i| !dom.components[i].is_point()).collect();
            if sorted != expected {
                return Err(Error::PreconditionFailed("sweep order must list every non-point component once".into()));
            }
            o.clone()
        }
        None => {
            let mut o: Vec<usize> = (0..n).filter(|&i| !dom.components[i].is_point()).collect();
            o.sort_by(|&a, &b| geo.diameters[b].total_cmp(&geo.diameters[a]));
            o
        }
    };
    let mut chain = MapChain::default();
    let mut trace = ConvergenceTrace::default();
    let mut previous = complement_samples(&traces);
    for sweep in 1..=opts.max_sweeps {
        for &i in &order {
            match &traces[i] {
                Trace::Slit(arc) => {
                    let (step, opened) = open_arc(arc, opts.samples);
                    let steps = [step];
                    transport(&mut traces, i, &steps);
                    traces[i] = Trace::Closed(opened);
                    let [step] = steps;
                    chain.push(step);
                }
                Trace::Closed(pts) => {
                    if circularity_residual(pts) < 0.1 * opts.tol {
                        continue;
                    }
                    let ext = exterior_map_with_tolerance(pts, opts.modes, opts.fit_tol).map_err(|e| match e {
                        Error::NotStarlike => Error::NotStarlikeAt { component: i, sweep },
                        other => other,
                    })?;
                    let s = ext.series;
                    let steps = [
                        MapStep::LaurentInverse { series: s.clone() },
                        MapStep::Affine { a: Complex64::new(s.cap, 0.0), b: s.c0 },
                    ];
                    transport(&mut traces, i, &steps);
                    traces[i] = Trace::Closed(circle_samples(s.c0, s.cap, opts.samples));
                    for st in steps {
                        chain.push(st);
                    }
                }
                Trace::Point(_) => {}
            }
        }
        for t in traces.iter_mut() {
            if let Trace::Closed(p) = t {
                *p = exterior_resample(p, opts.samples);
            }
        }
        let residuals: Vec<f64> = traces.iter().map(residual_of).collect();
        let current = complement_samples(&traces);
        let hausdorff = hausdorff_distance(&previous, &current)?;
        previous = current;
        let done = residuals.iter().all(|r| *r < opts.tol);
        trace.sweeps.push(SweepRecord { residuals, hausdorff });
        if done {
            let chain = normalize_at_infinity(&chain)?;
            let a1 = chain.laurent_at_infinity.map_or(Complex64::new(0.0, 0.0), |l| l.1);
            let mut discs = Vec::new();
            let mut points = Vec::new();
            let mut image_of = Vec::with_capacity(n);
            for t in &traces {
                match t {
                    Trace::Closed(p) => {
                        let (center, radius) = fit_circle(p);
                        image_of.push(ImageIndex::Disc(discs.len()));
                        discs.push(Disc { center, radius });
                    }
                    Trace::Point(z) => {
                        image_of.push(ImageIndex::Point(points.len()));
                        points.push(*z);
                    }
                    Trace::Slit(_) => unreachable!("every segment is opened in the first sweep"),
                }
            }
            return Ok(KoebeResult {
                circle_domain: CircleDomain::new(discs, points)?,
                image_of,
                chain,
                trace,
                sweeps: sweep,
                a1,
            });
        }
    }
    Err(Error::NoConvergence { sweeps: opts.max_sweeps, trace: Box::new(trace) })
}
