//! Command-line front end: argument parsing, configuration, reports and
//! exit codes (0 all checks pass, 1 some check failed, 2 input or
//! convergence error).

pub mod commands;
pub mod config;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use circuma::{Error, Result};
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "circuma", version, about = "Quasihyperbolic geometry and circle-domain uniformization of planar domains")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand; they override the config file.
#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Finest cell size of the sample graphs.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub slack: Option<f64>,
    #[arg(long, global = true)]
    pub tol_circ: Option<f64>,
    #[arg(long, global = true)]
    pub tol_fit: Option<f64>,
    /// Directory for output files (report, domains, maps, SVG).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write SVG renderings (requires --out).
    #[arg(long, global = true)]
    pub svg: bool,
    /// Append wall-clock time to the report (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quasihyperbolic distance and geodesic between two points.
    QhDist {
        #[arg(long)]
        domain: PathBuf,
        /// Start point `x,y` or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value = "euclidean")]
        flavor: String,
    },
    /// Four-point Gromov hyperbolicity estimate from spread samples.
    DeltaEstimate {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value = "euclidean")]
        flavor: String,
    },
    /// Empirical inner uniformity constant on random pairs.
    CheckUniform {
        #[arg(long)]
        domain: PathBuf,
        /// Constant to check the estimate against.
        #[arg(long)]
        a: Option<f64>,
    },
    /// Comparison, separation, bounded turning, counting and LLC checks.
    VerifyGeometry {
        #[arg(long)]
        domain: PathBuf,
        /// Inner radius of the counting annulus.
        #[arg(long)]
        r: Option<f64>,
        /// Outer radius of the counting annulus.
        #[arg(long = "big-r")]
        big_r: Option<f64>,
        /// Uniformity constant assumed by the separation check.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// LLC factor checked on circle domains.
        #[arg(long, default_value_t = 1.0 + 1e-6)]
        llc_factor: f64,
    },
    /// Finitely connected approximations at decreasing diameter thresholds.
    Approximate {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        thresholds: Vec<f64>,
    },
    /// Uniformize a domain containing infinity onto a circle domain.
    Uniformize {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 50)]
        max_sweeps: usize,
        /// Sweep order of the non-point components, e.g. `1,0`.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Distance comparison and curve surgery for complements inside B(0, a).
    SphereCheck {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        a: f64,
        /// JSON curve `{"vertices": [[x, y], ...]}` to operate on.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Built-in examples with known answers.
    Demo,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::QhDist { .. } => "qh-dist",
            Command::DeltaEstimate { .. } => "delta-estimate",
            Command::CheckUniform { .. } => "check-uniform",
            Command::VerifyGeometry { .. } => "verify-geometry",
            Command::Approximate { .. } => "approximate",
            Command::Uniformize { .. } => "uniformize",
            Command::SphereCheck { .. } => "sphere-check",
            Command::Demo => "demo",
        }
    }
}

/// Configuration from defaults, the optional file and the flags.
pub fn resolve_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = g.h {
        cfg.h = v;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = g.samples {
        cfg.samples = v;
    }
    if let Some(v) = g.slack {
        cfg.slack = v;
    }
    if let Some(v) = g.tol_circ {
        cfg.tol_circ = v;
    }
    if let Some(v) = g.tol_fit {
        cfg.tol_fit = v;
    }
    if g.out.is_some() {
        cfg.out_dir = g.out.clone();
    }
    cfg.svg |= g.svg;
    cfg.validate()?;
    if cfg.svg && cfg.out_dir.is_none() {
        return Err(Error::PreconditionFailed("--svg needs an output directory (--out)".into()));
    }
    Ok(cfg)
}

/// Cap the global thread pool from `CIRCUMA_THREADS`, once per process.
fn init_threads() {
    if let Some(n) = std::env::var("CIRCUMA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Run the command line and return the process exit code. The report goes
/// to stdout (and to `report.txt` in the output directory); errors go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    let started = Instant::now();
    let outcome = resolve_config(&cli.global).and_then(|cfg| {
        if let Some(dir) = &cfg.out_dir {
            std::fs::create_dir_all(dir)?;
        }
        let mut report = commands::execute(&cli.command, &cfg)?;
        if cli.global.timing {
            report.wall_time = Some(started.elapsed().as_secs_f64());
        }
        let text = report.render();
        if let Some(dir) = &cfg.out_dir {
            std::fs::write(dir.join("report.txt"), &text)?;
        }
        Ok((text, report.failures()))
    });
    match outcome {
        Ok((text, failures)) => {
            print!("{text}");
            i32::from(failures > 0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
