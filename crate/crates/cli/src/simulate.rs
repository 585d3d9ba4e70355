use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use edgelab::equations::EquationSpec;
use edgelab::field::Grid1D;
use edgelab::integrator::{evolve_with, ObservableRow, SchemeRegistry};
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, RunConfig, RunFlags};
use crate::error::{CliError, CliResult, ErrorRecord};
use crate::output::{ensure_dir, write_fields, write_json, write_observables};
use crate::report::Report;

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    version: &'static str,
    config: &'a RunConfig,
    equation: String,
    equation_spec: EquationSpec,
    grid: Grid1D,
    scheme: &'a str,
    dt_effective: f64,
    steps: usize,
    records: usize,
    t_end: f64,
    status: &'static str,
    error: Option<ErrorRecord>,
    mass_drift: f64,
    max_continuity_residual: Option<f64>,
    files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_seconds: Option<f64>,
    observables: &'a [ObservableRow],
}

/// Per-run summary, also used by sweeps.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub out: PathBuf,
    pub equation: String,
    pub records: usize,
    pub t_end: f64,
    pub mass_drift: f64,
    pub max_continuity_residual: Option<f64>,
    pub error: Option<ErrorRecord>,
}

/// Runs one simulation and writes its artifacts. Numerical failures still
/// write what was reached and come back in the second slot.
pub fn run(cfg: &RunConfig) -> CliResult<(RunSummary, Option<CliError>)> {
    let prepared = cfg.prepare()?;
    let out = cfg.out_dir();
    ensure_dir(&out)?;
    let start = Instant::now();
    let evo = match evolve_with(
        &prepared.equation,
        &prepared.psi0,
        &prepared.integrator,
        &SchemeRegistry::standard(),
    ) {
        Ok(evo) => evo,
        Err(e) if e.is_numerical() => return Err(refused(cfg, &prepared.equation, &out, e)),
        Err(e) => return Err(e.into()),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let rec = &evo.record;
    let failure = evo.failure.map(CliError::Core);
    let error = failure.as_ref().map(CliError::record);
    let max_continuity = rec
        .observables
        .iter()
        .filter_map(|o| o.continuity)
        .reduce(f64::max);

    let mut files = Vec::new();
    if cfg.formats.contains(&Format::Csv) {
        write_fields(&out.join("trajectory.csv"), &rec.fields)?;
        write_observables(&out.join("observables.csv"), &rec.observables)?;
        files.extend(["trajectory.csv".to_string(), "observables.csv".to_string()]);
    }
    if cfg.formats.contains(&Format::Json) {
        files.push("manifest.json".into());
        let manifest = Manifest {
            version: env!("CARGO_PKG_VERSION"),
            config: cfg,
            equation: rec.equation.to_string(),
            equation_spec: rec.equation,
            grid: rec.grid,
            scheme: &rec.scheme,
            dt_effective: rec.dt,
            steps: rec.steps,
            records: rec.times.len(),
            t_end: *rec.times.last().expect("initial record"),
            status: if error.is_none() { "ok" } else { "failed" },
            error: error.clone(),
            mass_drift: rec.mass_drift(),
            max_continuity_residual: max_continuity,
            files: files.clone(),
            elapsed_seconds: (!cfg.deterministic).then_some(elapsed),
            observables: &rec.observables,
        };
        write_json(&out.join("manifest.json"), &manifest)?;
    }
    let summary = RunSummary {
        out,
        equation: rec.equation.to_string(),
        records: rec.times.len(),
        t_end: *rec.times.last().expect("initial record"),
        mass_drift: rec.mass_drift(),
        max_continuity_residual: max_continuity,
        error,
    };
    Ok((summary, failure))
}

/// Records a run that failed before its first step.
fn refused(cfg: &RunConfig, eq: &EquationSpec, out: &Path, e: edgelab::Error) -> CliError {
    let err = CliError::Core(e);
    if cfg.formats.contains(&Format::Json) {
        let manifest = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg,
            "equation": eq.to_string(),
            "records": 0,
            "status": "failed",
            "error": err.record(),
        });
        if let Err(io) = write_json(&out.join("manifest.json"), &manifest) {
            return io;
        }
    }
    err
}

pub fn command(args: &SimulateArgs) -> CliResult<Report> {
    let cfg = args.run.resolve()?;
    let (s, failure) = run(&cfg)?;
    let mut text = format!(
        "{}: {} records to t = {} in {}\nmass drift {:.3e}",
        s.equation,
        s.records,
        s.t_end,
        s.out.display(),
        s.mass_drift
    );
    if let Some(e) = &s.error {
        text += &format!("\nstopped early: {}", e.message);
    }
    Ok(Report::ok(text, json!({ "command": "simulate", "run": s })).failing(failure))
}
