use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use edgelab::equations::EquationSpec;
use edgelab::field::{ComplexField, Grid1D};
use edgelab::integrator::IntegratorConfig;
use edgelab::params::split_descriptor;
use edgelab::solutions::{CatalogContext, SolutionCatalog};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::{read_fields, resolve_out};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a simulation needs; loaded from JSON, then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Equation descriptor, e.g. `current-nls:kappa=1`.
    pub equation: String,
    /// Catalog descriptor sampled at `t0`, e.g. `chiral:v=2,w=1`.
    pub initial: String,
    /// CSV field replacing `initial` when set.
    pub initial_file: Option<PathBuf>,
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub num_points: usize,
    pub dt: f64,
    pub t0: f64,
    /// Duration; the run ends at `t0 + T`.
    #[serde(rename = "T")]
    pub duration: f64,
    pub scheme: String,
    pub dealias: bool,
    pub record_every: usize,
    pub decay_gate: f64,
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
    /// Leave wall-clock data out of the manifest.
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let integ = IntegratorConfig::default();
        Self {
            equation: "current-nls:kappa=1".into(),
            initial: "chiral:v=2,w=1".into(),
            initial_file: None,
            half_length: edgelab::field::DEFAULT_HALF_LENGTH,
            num_points: edgelab::field::DEFAULT_NUM_POINTS,
            dt: integ.dt,
            t0: integ.t0,
            duration: integ.t1 - integ.t0,
            scheme: integ.scheme,
            dealias: integ.dealias,
            record_every: integ.record_every,
            decay_gate: integ.decay_gate,
            out: None,
            formats: vec![Format::Csv, Format::Json],
            deterministic: true,
        }
    }
}

/// Simulation flags; each one, when given, overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Equation descriptor, e.g. current-nls:kappa=1, tnls, extended-nls.
    #[arg(long = "eq")]
    pub equation: Option<String>,
    /// Shorthand for the kappa parameter of the equation.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Initial condition from the solution catalog, e.g. chiral:v=2,w=1.
    #[arg(long = "ic")]
    pub initial: Option<String>,
    /// Initial condition from a CSV with x,re,im columns.
    #[arg(long = "ic-file")]
    pub initial_file: Option<PathBuf>,
    /// Half-length of the box [-L, L).
    #[arg(long = "L")]
    pub half_length: Option<f64>,
    /// Number of grid points (power of two).
    #[arg(long = "N")]
    pub num_points: Option<usize>,
    /// Time step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Start time
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// Duration of the run.
    #[arg(long = "T")]
    pub duration: Option<f64>,
    /// Time-stepping scheme (ifrk4, rk4).
    #[arg(long)]
    pub scheme: Option<String>,
    /// Turn off 2/3-rule dealiasing.
    #[arg(long)]
    pub no_dealias: bool,
    /// Record every n-th step.
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Edge amplitude above which the run stops.
    #[arg(long)]
    pub decay_gate: Option<f64>,
    /// Output directory (default: $EDGELAB_OUT, then ./edgelab-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output formats.
    #[arg(long = "format", value_delimiter = ',')]
    pub formats: Option<Vec<Format>>,
    /// Record wall-clock time in the manifest.
    #[arg(long)]
    pub timing: bool,
}

impl RunFlags {
    /// Config file (if any) with flags applied on top.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg)?;
        Ok(cfg)
    }

    pub fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        macro_rules! take {
            ($flag:ident => $field:ident) => {
                if let Some(v) = &self.$flag {
                    cfg.$field = v.clone();
                }
            };
        }
        take!(equation => equation);
        take!(initial => initial);
        take!(half_length => half_length);
        take!(num_points => num_points);
        take!(dt => dt);
        take!(t0 => t0);
        take!(duration => duration);
        take!(scheme => scheme);
        take!(record_every => record_every);
        take!(decay_gate => decay_gate);
        take!(formats => formats);
        if let Some(k) = self.kappa {
            cfg.equation = with_param(&cfg.equation, "kappa", k)?;
        }
        if self.initial_file.is_some() {
            cfg.initial_file = self.initial_file.clone();
        }
        if self.no_dealias {
            cfg.dealias = false;
        }
        if self.timing {
            cfg.deterministic = false;
        }
        cfg.out = Some(resolve_out(self.out.as_ref(), cfg.out.as_ref()));
        Ok(())
    }
}

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Sets `key` in a `name:key=value` descriptor, replacing any aliases of it.
pub fn with_param(descriptor: &str, key: &str, value: impl ToString) -> CliResult<String> {
    let (name, mut params) = split_descriptor(descriptor)?;
    let aliases: &[&str] = match key {
        "kappa" | "k" => &["kappa", "k"],
        "w" | "omega" => &["w", "omega"],
        "F" | "coupling" => &["F", "coupling"],
        other => &[other][..],
    };
    for alias in aliases {
        params.remove(alias);
    }
    params.insert(key, value);
    Ok(format!("{name}:{params}"))
}

/// A validated, ready-to-run simulation.
pub struct Prepared {
    pub equation: EquationSpec,
    pub psi0: ComplexField,
    pub integrator: IntegratorConfig,
}

impl RunConfig {
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| resolve_out(None, None))
    }

    pub fn prepare(&self) -> CliResult<Prepared> {
        if self.formats.is_empty() {
            return Err(CliError::Usage("at least one output format is required".into()));
        }
        let (name, params) = split_descriptor(&self.equation)?;
        let equation = EquationSpec::from_descriptor(&name, &params)?;
        let grid = Grid1D::new(self.half_length, self.num_points)?;
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(edgelab::Error::InvalidConfig(format!("T must be positive, got {}", self.duration)).into());
        }
        let integrator = IntegratorConfig {
            dt: self.dt,
            t0: self.t0,
            t1: self.t0 + self.duration,
            scheme: self.scheme.clone(),
            dealias: self.dealias,
            record_every: self.record_every,
            decay_gate: self.decay_gate,
        };
        integrator.validate(&equation)?;
        let psi0 = match &self.initial_file {
            Some(path) => read_fields(path, &grid, self.t0)?
                .into_iter()
                .next()
                .expect("read_fields returns at least one field")
                .with_time(self.t0),
            None => {
                let ctx = CatalogContext {
                    kappa: equation.kappa().unwrap_or(1.0),
                };
                SolutionCatalog::standard().build(&self.initial, &ctx)?.sample(self.t0, &grid)?
            }
        };
        Ok(Prepared {
            equation,
            psi0,
            integrator,
        })
    }
}
