use std::path::PathBuf;

use clap::{Args, ValueEnum};
use edgelab::equations::EquationSpec;
use edgelab::field::Grid1D;
use edgelab::observables::{
    field_sequence_residual, pde_residual_window, window_times, ResidualOptions, ResidualReport, DEFAULT_RESIDUAL_DT,
};
use edgelab::params::split_descriptor;
use edgelab::solutions::{CatalogContext, SolutionCatalog, TimeDomain};
use edgelab::transforms::{GaugeDirection, MapChain, MapDefaults, MapRegistry, SolutionMap};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, read_fields, resolve_out, write_fields, write_json};
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    /// Map expression, e.g. D, gauge:k=1, "shift:e=1+expand:k=1+shift:e=1".
    #[arg(required_unless_present = "list")]
    pub map: Option<String>,
    /// Source solution from the catalog.
    #[arg(long, default_value = "standing")]
    pub input: String,
    /// Map sampled fields from a CSV (t,x,re,im columns) instead of a catalog solution.
    #[arg(long)]
    pub input_file: Option<PathBuf>,
    /// Equation the fields of --input-file solve.
    #[arg(long)]
    pub source_eq: Option<String>,
    /// Default direction of gauge maps.
    #[arg(long, value_enum, default_value = "forward")]
    pub direction: Direction,
    /// Default kappa of gauge maps and catalog solutions.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub kappa: f64,
    /// Target time window, `t=a:b`.
    #[arg(long, default_value = "t=1:2", allow_hyphen_values = true)]
    pub window: String,
    /// Number of sample times in the window.
    #[arg(long, default_value_t = 11)]
    pub samples: usize,
    #[arg(long = "L", default_value_t = edgelab::field::DEFAULT_HALF_LENGTH)]
    pub half_length: f64,
    #[arg(long = "N", default_value_t = edgelab::field::DEFAULT_NUM_POINTS)]
    pub num_points: usize,
    /// Output directory (default: $EDGELAB_OUT, then ./edgelab-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fail (exit 2) when the residual exceeds this bound.
    #[arg(long)]
    pub gate: Option<f64>,
    /// List the known maps.
    #[arg(long)]
    pub list: bool,
}

/// Parses `t=a:b` (or `a:b`).
pub fn parse_window(text: &str) -> CliResult<TimeDomain> {
    let body = text.trim().strip_prefix("t=").unwrap_or(text.trim());
    let bad = || CliError::Usage(format!("window must look like t=a:b, got '{text}'"));
    let (a, b) = body.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(bad());
    }
    Ok(TimeDomain::new(a, b)?)
}

#[derive(Debug, Serialize)]
struct TransformRecord {
    map: String,
    input: String,
    source_equation: String,
    target_equation: String,
    window: TimeDomain,
    sample_times: Vec<f64>,
    residual: Option<ResidualReport>,
    residual_note: Option<String>,
    gate: Option<f64>,
    files: Vec<String>,
}

fn has_seam(chain: &MapChain) -> bool {
    chain.maps().iter().any(|m| m.descriptor().starts_with("gauge"))
}

pub fn command(args: &TransformArgs) -> CliResult<Report> {
    let registry = MapRegistry::standard();
    let Some(expr) = args.map.as_deref().filter(|_| !args.list) else {
        let text: Vec<String> = registry.names().map(|(n, s)| format!("{n:<10} {s}")).collect();
        let maps: Vec<_> = registry.names().map(|(n, s)| json!({"name": n, "summary": s})).collect();
        return Ok(Report::ok(text.join("\n"), json!({"command": "transform", "maps": maps})));
    };
    let defaults = MapDefaults {
        gauge_direction: match args.direction {
            Direction::Forward => GaugeDirection::Forward,
            Direction::Backward => GaugeDirection::Backward,
        },
        kappa: args.kappa,
    };
    let chain = registry.parse(expr, &defaults)?;
    let grid = Grid1D::new(args.half_length, args.num_points)?;
    let window = parse_window(&args.window)?;
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let out = resolve_out(args.out.as_ref(), None);
    ensure_dir(&out)?;

    let record = match &args.input_file {
        Some(path) => map_fields(&chain, args, path, &grid, window)?,
        None => map_solution(&chain, args, &grid, window)?,
    };
    let (fields, mut record) = record;
    write_fields(&out.join("transform.csv"), &fields)?;
    record.files = vec!["transform.csv".into(), "transform.json".into()];
    write_json(&out.join("transform.json"), &record)?;

    let mut text = format!(
        "{} applied to {}: {} -> {}\n{} samples on {} written to {}",
        record.map,
        record.input,
        record.source_equation,
        record.target_equation,
        record.sample_times.len(),
        record.window,
        out.display()
    );
    let mut error = None;
    match &record.residual {
        Some(r) => {
            text += &format!(
                "\nresidual vs {}: L-inf {:.3e}, L2 {:.3e} ({} edge nodes excluded)",
                record.target_equation, r.linf, r.l2, r.excluded_nodes
            );
            if let Some(g) = args.gate {
                if !(r.linf <= g) {
                    error = Some(CliError::GateFailed(format!("residual {:.3e} exceeds {g:e}", r.linf)));
                }
            }
        }
        None => text += &format!("\nno residual: {}", record.residual_note.as_deref().unwrap_or("unavailable")),
    }
    Ok(Report::ok(text, json!({"command": "transform", "result": record})).failing(error))
}

type Mapped = (Vec<edgelab::field::ComplexField>, TransformRecord);

fn map_solution(chain: &MapChain, args: &TransformArgs, grid: &Grid1D, window: TimeDomain) -> CliResult<Mapped> {
    let sol = SolutionCatalog::standard().build(&args.input, &CatalogContext { kappa: args.kappa })?;
    let pad = 3.0 * DEFAULT_RESIDUAL_DT;
    let padded = TimeDomain::new(window.start - pad, window.end + pad)?;
    let (mapped, inset) = match chain.apply(&sol, padded) {
        Ok(m) => (m, 0.0),
        Err(_) => (chain.apply(&sol, window)?, pad),
    };
    let times = window_times(window.start, window.end, args.samples);
    let fields = times
        .iter()
        .map(|&t| mapped.sample(t, grid))
        .collect::<edgelab::Result<Vec<_>>>()?;
    let residual_times = window_times(window.start + inset, window.end - inset, args.samples);
    let residual = pde_residual_window(mapped.solves(), &mapped, &residual_times, grid, &ResidualOptions::default())?;
    Ok((
        fields,
        TransformRecord {
            map: chain.descriptor(),
            input: sol.name().to_string(),
            source_equation: sol.solves().to_string(),
            target_equation: mapped.solves().to_string(),
            window,
            sample_times: times,
            residual: Some(residual),
            residual_note: None,
            gate: args.gate,
            files: Vec::new(),
        },
    ))
}

fn map_fields(
    chain: &MapChain,
    args: &TransformArgs,
    path: &std::path::Path,
    grid: &Grid1D,
    window: TimeDomain,
) -> CliResult<Mapped> {
    let source_desc = args
        .source_eq
        .as_deref()
        .ok_or_else(|| CliError::Usage("--input-file needs --source-eq".into()))?;
    let (name, params) = split_descriptor(source_desc)?;
    let source = EquationSpec::from_descriptor(&name, &params)?;
    let inputs = read_fields(path, grid, window.start)?;
    let mut target = source;
    let mut fields = Vec::with_capacity(inputs.len());
    for f in &inputs {
        let (mapped, eq) = chain.apply_field(f, &source)?;
        target = eq;
        fields.push(mapped);
    }
    let (residual, note) = match field_sequence_residual(&target, &fields, has_seam(chain), &ResidualOptions::default())
    {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let times: Vec<f64> = fields.iter().map(|f| f.time()).collect();
    let span = match (times.first(), times.last()) {
        (Some(&a), Some(&b)) if a < b => TimeDomain::new(a, b)?,
        _ => window,
    };
    Ok((
        fields,
        TransformRecord {
            map: chain.descriptor(),
            input: path.display().to_string(),
            source_equation: source.to_string(),
            target_equation: target.to_string(),
            window: span,
            sample_times: times,
            residual,
            residual_note: note,
            gate: args.gate,
            files: Vec::new(),
        },
    ))
}
