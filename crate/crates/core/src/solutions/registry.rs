use std::collections::BTreeMap;
use std::sync::Arc;

use super::catalog::*;
use super::ClosedFormSolution;
use crate::equations::Kinetic;
use crate::error::{Error, Result};
use crate::params::{split_descriptor, ParamMap};

/// Defaults a builder may borrow from the surrounding run (e.g. the κ of the
/// equation being simulated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogContext {
    pub kappa: f64,
}

impl Default for CatalogContext {
    fn default() -> Self {
        Self { kappa: 1.0 }
    }
}

/// Builds a catalog solution from `key=value` parameters.
pub trait SolutionBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn build(&self, params: &ParamMap, ctx: &CatalogContext) -> Result<ClosedFormSolution>;
}

struct Chiral;
struct Standing;
struct Lens;
struct Extended;
struct Gaussian;
struct Bright;

fn sigma_param(p: &ParamMap, default: Kinetic) -> Result<Kinetic> {
    match p.get_f64(&["sigma"])? {
        Some(v) => Kinetic::from_value(v),
        None => Ok(default),
    }
}

impl SolutionBuilder for Chiral {
    fn name(&self) -> &'static str {
        "chiral"
    }
    fn summary(&self) -> &'static str {
        "travelling chiral soliton of the current-coupled NLS (v, w, kappa, x0, sign)"
    }
    fn build(&self, p: &ParamMap, ctx: &CatalogContext) -> Result<ClosedFormSolution> {
        p.ensure_only("chiral", &["v", "w", "omega", "kappa", "k", "x0", "sign"])?;
        let params = SolitonParams::new(
            p.f64_or(&["v"], 2.0)?,
            p.f64_or(&["w", "omega"], 1.0)?,
            p.f64_or(&["kappa", "k"], ctx.kappa)?,
        )?
        .with_x0(p.f64_or(&["x0"], 0.0)?);
        let negative = match p.get_str(&["sign"]) {
            None | Some("+") | Some("+1") | Some("1") => false,
            Some("-") | Some("-1") => true,
            Some(other) => return Err(Error::Parse(format!("bad sign '{other}'"))),
        };
        chiral_soliton(params.with_sign(negative))
    }
}

impl SolutionBuilder for Standing {
    fn name(&self) -> &'static str {
        "standing"
    }
    fn summary(&self) -> &'static str {
        "standing soliton e^{it/2} sech(x - x0) of the cubic NLS (x0)"
    }
    fn build(&self, p: &ParamMap, _ctx: &CatalogContext) -> Result<ClosedFormSolution> {
        p.ensure_only("standing", &["x0"])?;
        standing_soliton(p.f64_or(&["x0"], 0.0)?)
    }
}

impl SolutionBuilder for Lens {
    fn name(&self) -> &'static str {
        "lens"
    }
    fn summary(&self) -> &'static str {
        "time-dependent soliton of the F = 1/t NLS, t > 0 (x0)"
    }
    fn build(&self, p: &ParamMap, _ctx: &CatalogContext) -> Result<ClosedFormSolution> {
        p.ensure_only("lens", &["x0"])?;
        time_dependent_soliton(p.f64_or(&["x0"], 0.0)?)
    }
}

impl SolutionBuilder for Extended {
    fn name(&self) -> &'static str {
        "extended"
    }
    fn summary(&self) -> &'static str {
        "travelling wave of the current-coupled NLS with quintic term (v, kappa)"
    }
    fn build(&self, p: &ParamMap, ctx: &CatalogContext) -> Result<ClosedFormSolution> {
        p.ensure_only("extended", &["v", "kappa", "k"])?;
        extended_soliton(p.f64_or(&["v"], 2.0)?, p.f64_or(&["kappa", "k"], ctx.kappa)?)
    }
}

impl SolutionBuilder for Gaussian {
    fn name(&self) -> &'static str {
        "gaussian"
    }
    fn summary(&self) -> &'static str {
        "spreading Gaussian of the free equation (sigma = 0.5 or 1)"
    }
    fn build(&self, p: &ParamMap, _ctx: &CatalogContext) -> Result<ClosedFormSolution> {
        p.ensure_only("gaussian", &["sigma"])?;
        Ok(gaussian_free_packet(sigma_param(p, Kinetic::Half)?))
    }
}

impl SolutionBuilder for Bright {
    fn name(&self) -> &'static str {
        "bright"
    }
    fn summary(&self) -> &'static str {
        "standing soliton of i psi_t + sigma psi_xx + F|psi|^2 psi = 0 (sigma, F, x0)"
    }
    fn build(&self, p: &ParamMap, _ctx: &CatalogContext) -> Result<ClosedFormSolution> {
        p.ensure_only("bright", &["sigma", "F", "coupling", "x0"])?;
        bright_soliton(
            sigma_param(p, Kinetic::One)?,
            p.f64_or(&["F", "coupling"], 1.0)?,
            p.f64_or(&["x0"], 0.0)?,
        )
    }
}

/// Name-keyed registry of solution builders.
#[derive(Clone)]
pub struct SolutionCatalog {
    builders: BTreeMap<&'static str, Arc<dyn SolutionBuilder>>,
    aliases: BTreeMap<&'static str, &'static str>,
}

impl SolutionCatalog {
    pub fn empty() -> Self {
        Self {
            builders: BTreeMap::new(),
            aliases: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut c = Self::empty();
        c.register(Arc::new(Chiral));
        c.register(Arc::new(Standing));
        c.register(Arc::new(Lens));
        c.register(Arc::new(Extended));
        c.register(Arc::new(Gaussian));
        c.register(Arc::new(Bright));
        c.aliases.insert("trasol", "chiral");
        c.aliases.insert("travwave", "lens");
        c.aliases.insert("newsol", "extended");
        c
    }

    pub fn register(&mut self, builder: Arc<dyn SolutionBuilder>) {
        self.builders.insert(builder.name(), builder);
    }

    pub fn names(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.builders.values().map(|b| (b.name(), b.summary()))
    }

    /// Builds from a `name:key=value,...` descriptor.
    pub fn build(&self, descriptor: &str, ctx: &CatalogContext) -> Result<ClosedFormSolution> {
        let (name, params) = split_descriptor(descriptor)?;
        let key = self.aliases.get(name.as_str()).copied().unwrap_or(name.as_str());
        let builder = self.builders.get(key).ok_or_else(|| Error::UnknownName {
            kind: "solution",
            name: name.clone(),
        })?;
        builder.build(&params, ctx)
    }
}

impl Default for SolutionCatalog {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::EquationSpec;

    #[test]
    fn builds_every_name() {
        let cat = SolutionCatalog::standard();
        let ctx = CatalogContext::default();
        for (name, _) in cat.names() {
            let s = cat.build(name, &ctx).unwrap();
            assert!(s.name().starts_with(name), "{} vs {name}", s.name());
        }
    }

    #[test]
    fn descriptor_parameters_and_context() {
        let cat = SolutionCatalog::standard();
        let s = cat.build("chiral:v=2,w=1", &CatalogContext { kappa: 1.5 }).unwrap();
        assert_eq!(*s.solves(), EquationSpec::current(1.5).unwrap());
        assert!(matches!(
            cat.build("chiral:v=-1,w=0", &CatalogContext::default()),
            Err(Error::ChiralityViolation(_))
        ));
        assert!(cat.build("chiral:q=1", &CatalogContext::default()).is_err());
        assert!(matches!(
            cat.build("cnoidal", &CatalogContext::default()),
            Err(Error::UnknownName { .. })
        ));
        assert!(cat.build("travwave:x0=1", &CatalogContext::default()).is_ok());
    }
}
