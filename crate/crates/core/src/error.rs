use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("point {0} is outside the domain")]
    PointOutsideDomain(String),
    #[error("no sample of the domain lies in the window")]
    EmptyWindow,
    #[error("query points are not connected in the sample graph")]
    Disconnected,
    #[error("infinity belongs to the domain")]
    InfinityInDomain,
    #[error("curve leaves the domain at vertex {0}")]
    CurveExitsDomain(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("curve hits components of diameter >= r: {0:?}")]
    LargeComponentHit(Vec<usize>),
    #[error("detour around component {0} could not be placed")]
    DetourBlocked(usize),
    #[error("point components have no turning")]
    DegenerateComponent,
    #[error("thresholds must be positive and strictly decreasing")]
    BadThresholds,
    #[error("curve is not starlike about its centroid")]
    NotStarlike,
    #[error("boundary fit residual {residual:e} exceeds {limit:e}")]
    FitResidualTooLarge { residual: f64, limit: f64 },
    #[error("composed map is degenerate at infinity")]
    DegenerateAtInfinity,
    #[error("no convergence after {sweeps} sweeps")]
    NoConvergence {
        sweeps: usize,
        trace: Box<crate::koebe::ConvergenceTrace>,
    },
    #[error("component {component} is not starlike at sweep {sweep}")]
    NotStarlikeAt { component: usize, sweep: usize },
    #[error("empty point set")]
    EmptySet,
    #[error("radii must satisfy 0 < r < R")]
    BadRadii,
    #[error("complement is not contained in the closed ball of radius {0}")]
    ComplementNotContained(f64),
    #[error("curve endpoint lies on a dividing circle")]
    CaseUndetermined,
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
