//! `edgelab` command line: simulate, verify, transform, classify, sweep.

mod classify;
mod config;
mod error;
mod output;
mod report;
mod simulate;
mod sweep;
mod transform;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use edgelab::equations::EQUATION_NAMES;
use edgelab::integrator::SchemeRegistry;
use edgelab::solutions::SolutionCatalog;
use serde_json::json;

use error::{CliError, CliResult, EXIT_CONFIG, EXIT_OK};
use report::Report;

/// Simulation and verification lab for chiral and derivative NLS equations.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 numerical
/// failure (blow-up, boundary leak, singular map point, failed gate).
#[derive(Debug, Parser)]
#[command(name = "edgelab", version)]
struct Cli {
    /// Print a single JSON record instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve an initial condition and write trajectory, observables and manifest.
    Simulate(simulate::SimulateArgs),
    /// Run named claims against their gates.
    Verify(verify::VerifyArgs),
    /// Apply a map expression to a catalog solution or sampled fields.
    Transform(transform::TransformArgs),
    /// Integrability verdicts for coefficients, couplings, potentials, equations.
    Classify(classify::ClassifyArgs),
    /// Run a grid of simulations concurrently.
    Sweep(sweep::SweepArgs),
    /// List equations, solutions and schemes.
    List,
}

fn list() -> Report {
    let mut text = String::from("equations:\n");
    for name in EQUATION_NAMES {
        text += &format!("  {name}\n");
    }
    text += "solutions:\n";
    let catalog = SolutionCatalog::standard();
    for (name, summary) in catalog.names() {
        text += &format!("  {name:<10} {summary}\n");
    }
    text += "schemes:\n";
    let schemes = SchemeRegistry::standard();
    for (name, summary) in schemes.names() {
        text += &format!("  {name:<10} {summary}\n");
    }
    text += "maps: see `edgelab transform --list`; claims: see `edgelab verify --list`";
    let json = json!({
        "command": "list",
        "equations": EQUATION_NAMES,
        "solutions": catalog.names().map(|(n, _)| n).collect::<Vec<_>>(),
        "schemes": schemes.names().map(|(n, _)| n).collect::<Vec<_>>(),
    });
    Report::ok(text, json)
}

fn dispatch(cmd: &Command) -> CliResult<Report> {
    match cmd {
        Command::Simulate(a) => simulate::command(a),
        Command::Verify(a) => verify::command(a),
        Command::Transform(a) => transform::command(a),
        Command::Classify(a) => classify::command(a),
        Command::Sweep(a) => sweep::command(a),
        Command::List => Ok(list()),
    }
}

fn fail(json: bool, e: &CliError) -> ExitCode {
    if json {
        println!("{}", json!({"ok": false, "error": e.record()}));
    } else {
        eprintln!("error: {e}");
    }
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let json_mode = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_OK);
        }
        Err(e) if json_mode => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            return fail(true, &CliError::Usage(first.to_string()));
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match dispatch(&cli.command) {
        Ok(report) => {
            if cli.json {
                let mut record = report.json;
                record["ok"] = json!(report.error.is_none());
                if let Some(e) = &report.error {
                    record["error"] = serde_json::to_value(e.record()).expect("error records serialise");
                }
                println!("{record}");
            } else {
                println!("{}", report.text);
                if let Some(e) = &report.error {
                    eprintln!("error: {e}");
                }
            }
            ExitCode::from(report.error.as_ref().map_or(EXIT_OK, CliError::exit_code))
        }
        Err(e) => fail(cli.json, &e),
    }
}
