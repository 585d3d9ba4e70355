use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use edgelab::equations::current;
use edgelab::field::{ComplexField, Grid1D};
use edgelab::integrator::ObservableRow;
use edgelab::Complex64;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const TRAJECTORY_HEADER: &str = "t,x,re,im,rho,j";

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

fn create(path: &Path) -> CliResult<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path).map_err(CliError::io(path))?))
}

/// One block of rows per field, in the fixed `t,x,re,im,rho,j` layout.
pub fn write_fields(path: &Path, fields: &[ComplexField]) -> CliResult<()> {
    let mut w = create(path)?;
    let io = |e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    writeln!(w, "{TRAJECTORY_HEADER}").map_err(io)?;
    for f in fields {
        let j = current(f)?;
        let t = num(f.time());
        for (k, (z, jk)) in f.values().iter().zip(j.values()).enumerate() {
            writeln!(
                w,
                "{t},{},{},{},{},{}",
                num(f.grid().x(k)),
                num(z.re),
                num(z.im),
                num(z.norm_sqr()),
                num(*jk)
            )
            .map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn write_observables(path: &Path, rows: &[ObservableRow]) -> CliResult<()> {
    let mut w = create(path)?;
    let io = |e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    writeln!(w, "t,mass,momentum,peak,continuity").map_err(io)?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            num(r.t),
            num(r.mass),
            num(r.momentum),
            opt(r.peak),
            opt(r.continuity)
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(format!("serialisation: {e}")))?;
    fs::write(path, text + "\n").map_err(CliError::io(path))
}

/// Reads fields written in the trajectory layout (or plain `x,re,im`).
/// Rows are grouped by `t`; a file without a `t` column holds one field at `t = default_time`.
pub fn read_fields(path: &Path, grid: &Grid1D, default_time: f64) -> CliResult<Vec<ComplexField>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let bad = |m: String| CliError::Usage(format!("{}: {m}", path.display()));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty file".into()))?.split(',').map(str::trim).collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (ix, ire, iim) = match (col("x"), col("re"), col("im")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(bad(format!("header must name x, re, im columns, got '{}'", header.join(",")))),
    };
    let it = col("t");

    let mut groups: Vec<(f64, Vec<(f64, Complex64)>)> = Vec::new();
    for (n, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |i: usize| -> CliResult<f64> {
            cells
                .get(i)
                .and_then(|c| c.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("row {}: bad number in column {}", n + 2, i + 1)))
        };
        let t = match it {
            Some(i) => get(i)?,
            None => default_time,
        };
        let sample = (get(ix)?, Complex64::new(get(ire)?, get(iim)?));
        match groups.last_mut() {
            Some((tg, rows)) if *tg == t => rows.push(sample),
            _ => groups.push((t, vec![sample])),
        }
    }
    if groups.is_empty() {
        return Err(bad("no data rows".into()));
    }
    let tol = 1e-9 * grid.half_length();
    groups
        .into_iter()
        .map(|(t, rows)| {
            if rows.len() != grid.num_points() {
                return Err(bad(format!(
                    "field at t = {t} has {} rows but the grid has N = {}",
                    rows.len(),
                    grid.num_points()
                )));
            }
            if let Some(k) = rows.iter().enumerate().position(|(k, (x, _))| (x - grid.x(k)).abs() > tol) {
                return Err(bad(format!(
                    "x = {} in row {} does not match the grid node {}",
                    rows[k].0,
                    k,
                    grid.x(k)
                )));
            }
            Ok(ComplexField::new(*grid, rows.into_iter().map(|(_, z)| z).collect(), t)?)
        })
        .collect()
}

pub fn resolve_out(flag: Option<&PathBuf>, config: Option<&PathBuf>) -> PathBuf {
    flag.or(config)
        .cloned()
        .or_else(|| std::env::var_os("EDGELAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("edgelab-out"))
}
