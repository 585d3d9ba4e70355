use std::collections::BTreeMap;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{with_param, RunConfig, RunFlags};
use crate::error::{CliError, CliResult, ErrorRecord, EXIT_CONFIG, EXIT_NUMERICAL};
use crate::output::{ensure_dir, write_json};
use crate::report::Report;
use crate::simulate::{self, RunSummary};

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunFlags,
    /// `KEY=v1,v2,...`; KEY is ic.<param>, eq.<param>, dt, t0, T, L, N,
    /// record_every or decay_gate. Repeat for a Cartesian product.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub vary: Vec<String>,
    /// Concurrent runs (default: available cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

pub fn parse_axis(text: &str) -> CliResult<Axis> {
    let (key, values) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--vary expects KEY=v1,v2,..., got '{text}'")))?;
    let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(CliError::Usage(format!("--vary {key} has no values")));
    }
    Ok(Axis {
        key: key.trim().to_string(),
        values,
    })
}

fn number<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse()
        .map_err(|_| CliError::Usage(format!("{key}: '{v}' is not a valid value")))
}

pub fn set_value(cfg: &mut RunConfig, key: &str, value: &str) -> CliResult<()> {
    if let Some(k) = key.strip_prefix("ic.") {
        cfg.initial = with_param(&cfg.initial, k, value)?;
        return Ok(());
    }
    if let Some(k) = key.strip_prefix("eq.") {
        cfg.equation = with_param(&cfg.equation, k, value)?;
        return Ok(());
    }
    match key {
        "dt" => cfg.dt = number(key, value)?,
        "t0" => cfg.t0 = number(key, value)?,
        "T" => cfg.duration = number(key, value)?,
        "L" => cfg.half_length = number(key, value)?,
        "N" => cfg.num_points = number(key, value)?,
        "record_every" => cfg.record_every = number(key, value)?,
        "decay_gate" => cfg.decay_gate = number(key, value)?,
        other => return Err(CliError::Usage(format!("cannot sweep over '{other}'"))),
    }
    Ok(())
}

/// Every combination of axis values, first axis slowest.
pub fn product(axes: &[Axis]) -> Vec<Vec<(String, String)>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push((axis.key.clone(), v.clone()));
                    p
                })
            })
            .collect()
    })
}

#[derive(Debug, Serialize)]
struct Point {
    index: usize,
    values: BTreeMap<String, String>,
    run: Option<RunSummary>,
    error: Option<ErrorRecord>,
}

pub fn command(args: &SweepArgs) -> CliResult<Report> {
    let base = args.run.resolve()?;
    let axes = args.vary.iter().map(|a| parse_axis(a)).collect::<CliResult<Vec<_>>>()?;
    let root = base.out_dir();
    let mut configs = Vec::new();
    for (i, combo) in product(&axes).into_iter().enumerate() {
        let mut cfg = base.clone();
        for (k, v) in &combo {
            set_value(&mut cfg, k, v)?;
        }
        cfg.out = Some(root.join(format!("point-{i:03}")));
        configs.push((i, combo.into_iter().collect::<BTreeMap<_, _>>(), cfg));
    }
    ensure_dir(&root)?;

    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let points: Vec<(Point, u8)> = pool.install(|| {
        configs
            .par_iter()
            .map(|(index, values, cfg)| {
                let (run, err) = match simulate::run(cfg) {
                    Ok((s, failure)) => (Some(s), failure),
                    Err(e) => (None, Some(e)),
                };
                let code = err.as_ref().map_or(0, CliError::exit_code);
                let point = Point {
                    index: *index,
                    values: values.clone(),
                    run,
                    error: err.as_ref().map(CliError::record),
                };
                (point, code)
            })
            .collect()
    });

    let worst = if points.iter().any(|(_, c)| *c == EXIT_CONFIG) {
        EXIT_CONFIG
    } else if points.iter().any(|(_, c)| *c == EXIT_NUMERICAL) {
        EXIT_NUMERICAL
    } else {
        0
    };
    let points: Vec<Point> = points.into_iter().map(|(p, _)| p).collect();
    write_json(&root.join("sweep.json"), &json!({ "base": base, "points": points }))?;

    let mut text = format!("{} runs with {workers} workers in {}", points.len(), root.display());
    for p in &points {
        let values: Vec<String> = p.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let status = match (&p.run, &p.error) {
            (_, Some(e)) => format!("{}: {}", e.kind, e.message),
            (Some(r), None) => format!("ok, mass drift {:.3e}", r.mass_drift),
            (None, None) => "not run".into(),
        };
        text += &format!("\n  point-{:03} {}: {status}", p.index, values.join(" "));
    }
    let failed = points.iter().filter(|p| p.error.is_some()).count();
    let error = match worst {
        0 => None,
        EXIT_CONFIG => Some(CliError::Usage(format!("{failed} sweep point(s) had configuration errors"))),
        _ => Some(CliError::Numerical(format!("{failed} sweep point(s) failed numerically"))),
    };
    Ok(Report::ok(text, json!({"command": "sweep", "out": root, "points": points})).failing(error))
}
