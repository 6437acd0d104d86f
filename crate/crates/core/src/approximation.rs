//! Finitely connected approximations obtained by discarding small
//! complementary components.

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};

/// A domain whose complement keeps only the components of diameter above `delta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilteredDomain {
    pub delta: f64,
    pub domain: DomainSpec,
    /// Indices (in the input) of kept components.
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    /// Every component was dropped: the result is the whole plane or sphere.
    pub all_dropped: bool,
}

/// Keep exactly the components with diameter greater than `delta`.
pub fn filter_components(dom: &DomainSpec, delta: f64) -> Result<FilteredDomain> {
    if !(delta > 0.0) {
        return Err(Error::PreconditionFailed(format!("threshold must be positive (delta = {delta})")));
    }
    let diam = dom.component_geometry().diameters;
    let (kept, dropped): (Vec<usize>, Vec<usize>) = (0..dom.components.len()).partition(|&i| diam[i] > delta);
    let mut domain = dom.with_components(&kept)?;
    domain.name = format!("{} (diam > {delta})", dom.name);
    Ok(FilteredDomain { delta, all_dropped: kept.is_empty() && !dom.components.is_empty(), domain, kept, dropped })
}

/// One stage of an approximation sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationStage {
    pub threshold: f64,
    pub domain: DomainSpec,
    pub kept: Vec<usize>,
    /// Smallest kept diameter and largest dropped diameter.
    pub min_kept_diam: f64,
    pub max_dropped_diam: f64,
}

/// Nested finitely connected domains `Omega_1 ⊃ Omega_2 ⊃ ... ⊃ Omega`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationSequence {
    pub base: DomainSpec,
    pub thresholds: Vec<f64>,
    pub stages: Vec<ApproximationStage>,
    /// Complement lists grow from stage to stage.
    pub nested: bool,
    /// At every stage all kept diameters exceed the threshold and all dropped ones do not.
    pub ordered: bool,
    /// Stage index from which each input component is kept, if ever.
    pub first_stage: Vec<Option<usize>>,
    /// Every component that is not a point is kept by the last stage.
    pub nondegenerate_included: bool,
    /// Components never kept: the point components and those below the last threshold.
    pub residual: Vec<usize>,
    /// Representative points of the residual components.
    pub residual_points: Vec<Complex64>,
}

/// Filter `dom` at each of the strictly decreasing positive `thresholds`.
pub fn approximation_sequence(dom: &DomainSpec, thresholds: &[f64]) -> Result<ApproximationSequence> {
    if thresholds.is_empty() || thresholds.iter().any(|t| !(*t > 0.0)) || thresholds.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::BadThresholds);
    }
    let diam = dom.component_geometry().diameters;
    let n = dom.components.len();
    let mut stages = Vec::with_capacity(thresholds.len());
    let mut first_stage = vec![None; n];
    let mut ordered = true;
    for (s, &t) in thresholds.iter().enumerate() {
        let f = filter_components(dom, t)?;
        for &i in &f.kept {
            first_stage[i].get_or_insert(s);
        }
        let min_kept_diam = f.kept.iter().map(|&i| diam[i]).fold(f64::INFINITY, f64::min);
        let max_dropped_diam = f.dropped.iter().map(|&i| diam[i]).fold(0.0, f64::max);
        ordered &= min_kept_diam > t && max_dropped_diam <= t;
        stages.push(ApproximationStage { threshold: t, domain: f.domain, kept: f.kept, min_kept_diam, max_dropped_diam });
    }
    let nested = stages.windows(2).all(|w| w[0].kept.iter().all(|i| w[1].kept.contains(i)));
    let residual: Vec<usize> = (0..n).filter(|&i| first_stage[i].is_none()).collect();
    let nondegenerate_included = residual.iter().all(|&i| dom.components[i].is_point());
    let residual_points = residual.iter().map(|&i| dom.components[i].anchor()).collect();
    Ok(ApproximationSequence {
        base: dom.clone(),
        thresholds: thresholds.to_vec(),
        stages,
        nested,
        ordered,
        first_stage,
        nondegenerate_included,
        residual,
        residual_points,
    })
}
