//! Run configuration: defaults, optional TOML file, command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use circuma::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Finest cell size of the sample graphs.
    pub h: f64,
    /// Relative circularity at which uniformization stops.
    pub tol_circ: f64,
    /// Bound on exterior-map fit residuals relative to the trace diameter.
    pub tol_fit: f64,
    /// Relative slack allowed on inequality checks.
    pub slack: f64,
    /// Sample count for randomized checks.
    pub samples: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            h: 1e-2,
            tol_circ: 1e-6,
            tol_fit: 1e-6,
            slack: 0.02,
            samples: 24,
            seed: 1,
            out_dir: None,
            svg: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("h", self.h), ("tol_circ", self.tol_circ), ("tol_fit", self.tol_fit), ("slack", self.slack)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::PreconditionFailed(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.samples == 0 {
            return Err(Error::PreconditionFailed("samples must be positive".into()));
        }
        Ok(())
    }

    /// `key=value` lines echoed at the top of every report.
    pub fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("h".into(), self.h.to_string()),
            ("tol_circ".into(), self.tol_circ.to_string()),
            ("tol_fit".into(), self.tol_fit.to_string()),
            ("slack".into(), self.slack.to_string()),
            ("samples".into(), self.samples.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("svg".into(), self.svg.to_string()),
        ]
    }
}
