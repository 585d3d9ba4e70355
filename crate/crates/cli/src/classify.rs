use clap::{Args, ValueEnum};
use edgelab::equations::{DnlsCoefficients, EquationSpec};
use edgelab::integrability::{
    clarkson_cosgrove, classify_potential, painleve_vnls, CoefficientFamily, PotentialSpec, PotentialVerdict,
    CC_DEFAULT_TOL,
};
use edgelab::params::{split_descriptor, ParamMap};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subject {
    /// `a=..,b=..,c=..` coefficients of the derivative NLS family.
    Dnls,
    /// Cubic coupling F(t): `const:F=4`, `inverse-linear:a=0,b=1`, `other:<text>`.
    Coupling,
    /// Potential shape: `deg=2,c1=const,c2=time,drive=0`.
    Potential,
    /// A named equation, e.g. `current-nls:kappa=1`.
    Equation,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(value_enum)]
    pub subject: Subject,
    /// Key-value description of the subject.
    #[arg(default_value = "", allow_hyphen_values = true)]
    pub spec: String,
    /// Relative tolerance of the Clarkson-Cosgrove equality.
    #[arg(long, default_value_t = CC_DEFAULT_TOL)]
    pub tol: f64,
}

fn dnls(spec: &str, tol: f64) -> CliResult<Value> {
    let p = ParamMap::parse(spec)?;
    p.ensure_only("dnls", &["a", "b", "c"])?;
    let coeffs = DnlsCoefficients::new(p.require_f64(&["a"])?, p.require_f64(&["b"])?, p.f64_or(&["c"], 0.0)?)?;
    let r = clarkson_cosgrove(coeffs, tol);
    Ok(json!({"subject": "dnls", "integrable": r.integrable, "report": r}))
}

pub fn parse_family(spec: &str) -> CliResult<CoefficientFamily> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let family = match name.trim() {
        "other" => CoefficientFamily::Other(rest.trim().to_string()),
        _ => {
            let (name, p) = split_descriptor(spec)?;
            match name.as_str() {
                "const" | "constant" => {
                    p.ensure_only("const", &["F"])?;
                    CoefficientFamily::Constant(p.require_f64(&["F"])?)
                }
                "inverse-linear" | "inv" => {
                    p.ensure_only("inverse-linear", &["a", "b"])?;
                    CoefficientFamily::inverse_linear(p.f64_or(&["a"], 0.0)?, p.f64_or(&["b"], 0.0)?)?
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown coupling family '{other}' (const, inverse-linear, other)"
                    )))
                }
            }
        }
    };
    Ok(family)
}

fn equation(spec: &str, tol: f64) -> CliResult<Value> {
    let (name, p) = split_descriptor(spec)?;
    let eq = EquationSpec::from_descriptor(&name, &p)?;
    let cc = eq.dnls_coefficients().map(|c| clarkson_cosgrove(c, tol));
    let family = eq.coefficient_family();
    let painleve = family.as_ref().map(painleve_vnls);
    let derived = cc.map(|r| r.integrable).or(painleve);
    Ok(json!({
        "subject": "equation",
        "equation": eq.to_string(),
        "claimed_integrable": eq.claimed_integrable(),
        "integrable": derived,
        "clarkson_cosgrove": cc,
        "coupling_family": family,
    }))
}

pub fn classify(subject: Subject, spec: &str, tol: f64) -> CliResult<Value> {
    match subject {
        Subject::Dnls => dnls(spec, tol),
        Subject::Coupling => {
            let family = parse_family(spec)?;
            Ok(json!({"subject": "coupling", "integrable": painleve_vnls(&family), "family": family}))
        }
        Subject::Potential => {
            let verdict = classify_potential(&PotentialSpec::parse(spec)?);
            let transformable = matches!(verdict, PotentialVerdict::Transformable { .. });
            Ok(json!({"subject": "potential", "transformable": transformable, "result": verdict}))
        }
        Subject::Equation => equation(spec, tol),
    }
}

pub fn command(args: &ClassifyArgs) -> CliResult<Report> {
    let record = classify(args.subject, &args.spec, args.tol)?;
    let text = serde_json::to_string(&record).expect("verdicts serialise");
    Ok(Report::ok(text, record))
}
