use std::path::PathBuf;

use clap::Args;
use edgelab::claims::{ClaimOutcome, ClaimRegistry};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::output::write_json;
use crate::report::Report;

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Claim names (see --list).
    pub claims: Vec<String>,
    /// Run every registered claim.
    #[arg(long)]
    pub all: bool,
    /// List claims and aliases.
    #[arg(long)]
    pub list: bool,
    /// Also write the outcomes as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn describe(o: &ClaimOutcome) -> String {
    let mut s = format!("{} {}", if o.pass { "PASS" } else { "FAIL" }, o.claim);
    for m in &o.measurements {
        let op = if m.upper { "<=" } else { ">" };
        s += &format!(
            "\n  {:<50} {:>10.3e} {op} {:<8.0e} {}",
            m.label,
            m.value,
            m.gate,
            if m.pass { "ok" } else { "FAIL" }
        );
    }
    for r in &o.rows {
        s += &format!("\n  {r}");
    }
    s
}

pub fn command(args: &VerifyArgs) -> CliResult<Report> {
    let registry = ClaimRegistry::standard();
    if args.list {
        let mut text = String::new();
        for (name, summary) in registry.names() {
            text += &format!("{name:<32} {summary}\n");
        }
        for (alias, name) in registry.aliases() {
            text += &format!("{alias:<32} alias of {name}\n");
        }
        let claims: Vec<_> = registry.names().map(|(n, s)| json!({"name": n, "summary": s})).collect();
        let aliases: Vec<_> = registry.aliases().map(|(a, n)| json!({"alias": a, "claim": n})).collect();
        return Ok(Report::ok(
            text.trim_end().to_string(),
            json!({"command": "verify", "claims": claims, "aliases": aliases}),
        ));
    }
    let names: Vec<String> = if args.all {
        registry.names().map(|(n, _)| n.to_string()).collect()
    } else {
        args.claims.clone()
    };
    if names.is_empty() {
        return Err(CliError::Usage("name at least one claim, or pass --all or --list".into()));
    }
    let claims = names
        .iter()
        .map(|n| registry.get(n))
        .collect::<edgelab::Result<Vec<_>>>()?;
    let outcomes = claims.iter().map(|c| c.check()).collect::<edgelab::Result<Vec<_>>>()?;
    if let Some(path) = &args.report {
        write_json(path, &outcomes)?;
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.claim.as_str()).collect();
    let text = outcomes.iter().map(describe).collect::<Vec<_>>().join("\n");
    let error = (!failed.is_empty()).then(|| CliError::GateFailed(failed.join(", ")));
    Ok(Report::ok(text, json!({"command": "verify", "outcomes": outcomes})).failing(error))
}
