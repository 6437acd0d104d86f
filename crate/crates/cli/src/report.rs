//! Line-oriented `key=value` reports.
//!
//! Every record is built from a [`Check`], which carries a fixed anchor tag
//! naming the statement the check measures, so no record can be emitted
//! without one.

use std::fmt::Write as _;

/// The checks a report can contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    QhDistance,
    GeodesicLength,
    Delta,
    UniformityConstant,
    SeparationConsistency,
    ComparisonLower,
    ComparisonUpper,
    SeparationRatio,
    BoundedTurning,
    LargeComponentCount,
    Llc,
    StageComponents,
    Nested,
    Ordered,
    Sweeps,
    Circularity,
    LaurentA1,
    NormalizedAtInfinity,
    DiscsDisjoint,
    DistanceComparison,
    SurgeryCase,
    ArcBound,
    LengthBound,
    SurgeryCigar,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::QhDistance => "qh_distance",
            Check::GeodesicLength => "geodesic_euclidean_length",
            Check::Delta => "delta_four_point",
            Check::UniformityConstant => "uniformity_constant",
            Check::SeparationConsistency => "separation_consistency",
            Check::ComparisonLower => "comparison_lower",
            Check::ComparisonUpper => "comparison_upper",
            Check::SeparationRatio => "separation_implied_a",
            Check::BoundedTurning => "bounded_turning",
            Check::LargeComponentCount => "large_component_count",
            Check::Llc => "llc",
            Check::StageComponents => "stage_components",
            Check::Nested => "nested",
            Check::Ordered => "ordered",
            Check::Sweeps => "sweeps",
            Check::Circularity => "circularity_residual",
            Check::LaurentA1 => "a1",
            Check::NormalizedAtInfinity => "normalized_at_infinity",
            Check::DiscsDisjoint => "discs_disjoint",
            Check::DistanceComparison => "distance_comparison",
            Check::SurgeryCase => "surgery_case",
            Check::ArcBound => "arc_bound",
            Check::LengthBound => "length_bound",
            Check::SurgeryCigar => "surgery_cigar_constant",
        }
    }

    /// Tag of the statement the check is about.
    pub fn anchor(self) -> &'static str {
        match self {
            Check::QhDistance | Check::GeodesicLength => "quasihyperbolic-metric",
            Check::Delta => "gromov-hyperbolicity",
            Check::UniformityConstant => "inner-uniform-curves",
            Check::SeparationConsistency | Check::SeparationRatio => "component-separation",
            Check::ComparisonLower | Check::ComparisonUpper => "spherical-euclidean-qh-comparison",
            Check::BoundedTurning => "bounded-turning-of-components",
            Check::LargeComponentCount => "counting-large-components",
            Check::Llc => "circle-domains-are-llc",
            Check::StageComponents | Check::Nested | Check::Ordered => "finite-approximation",
            Check::Sweeps | Check::Circularity => "koebe-uniformization",
            Check::LaurentA1 | Check::NormalizedAtInfinity => "normalization-at-infinity",
            Check::DiscsDisjoint => "circle-domain",
            Check::DistanceComparison => "distance-comparison",
            Check::SurgeryCase | Check::ArcBound | Check::LengthBound | Check::SurgeryCigar => {
                "spherical-to-euclidean-surgery"
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Estimate,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Estimate => "estimate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub check: Check,
    pub label: Option<String>,
    pub measured: String,
    pub bound: Option<String>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Vec<(String, String)>,
    pub records: Vec<Record>,
    pub files: Vec<String>,
    pub wall_time: Option<f64>,
}

impl Report {
    pub fn new(command: &str, config: Vec<(String, String)>) -> Self {
        Report { command: command.into(), config, records: Vec::new(), files: Vec::new(), wall_time: None }
    }

    pub fn estimate(&mut self, check: Check, label: Option<String>, measured: impl ToString) {
        self.records.push(Record { check, label, measured: measured.to_string(), bound: None, status: Status::Estimate });
    }

    /// A hard check: passes when `ok`.
    pub fn check(&mut self, check: Check, label: Option<String>, measured: impl ToString, bound: impl ToString, ok: bool) {
        self.records.push(Record {
            check,
            label,
            measured: measured.to_string(),
            bound: Some(bound.to_string()),
            status: if ok { Status::Pass } else { Status::Fail },
        });
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.status == Status::Fail).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command={}", self.command).unwrap();
        for (k, v) in &self.config {
            writeln!(out, "config.{k}={v}").unwrap();
        }
        for r in &self.records {
            write!(out, "check={}", r.check.name()).unwrap();
            if let Some(l) = &r.label {
                write!(out, " label={l}").unwrap();
            }
            write!(out, " status={} measured={}", r.status.as_str(), r.measured).unwrap();
            if let Some(b) = &r.bound {
                write!(out, " bound={b}").unwrap();
            }
            writeln!(out, " anchor={}", r.check.anchor()).unwrap();
        }
        for f in &self.files {
            writeln!(out, "file={f}").unwrap();
        }
        let passed = self.records.iter().filter(|r| r.status == Status::Pass).count();
        let estimates = self.records.iter().filter(|r| r.status == Status::Estimate).count();
        writeln!(out, "summary passed={passed} failed={} estimates={estimates}", self.failures()).unwrap();
        if let Some(t) = self.wall_time {
            writeln!(out, "wall_time_s={t:.3}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_line_oriented() {
        let mut r = Report::new("demo", vec![("h".into(), "0.01".into())]);
        r.estimate(Check::Delta, None, 0.25);
        r.check(Check::Nested, Some("stages".into()), true, true, true);
        let text = r.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "command=demo");
        assert_eq!(lines[1], "config.h=0.01");
        assert_eq!(lines[2], "check=delta_four_point status=estimate measured=0.25 anchor=gromov-hyperbolicity");
        assert!(lines[3].contains("label=stages status=pass"));
        assert_eq!(lines[4], "summary passed=1 failed=0 estimates=1");
        assert_eq!(r.failures(), 0);
    }
}
