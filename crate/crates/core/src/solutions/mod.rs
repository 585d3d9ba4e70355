//! Closed-form solutions, each bound to the equation it claims to solve.

mod catalog;
mod registry;

pub use catalog::{
    bright_soliton, chiral_soliton, extended_soliton, gaussian_free_packet, standing_soliton,
    time_dependent_soliton, SolitonParams,
};
pub use registry::{CatalogContext, SolutionBuilder, SolutionCatalog};

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::field::{ComplexField, Grid1D};

/// Open time interval `(start, end)`; infinite ends allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeDomain {
    pub start: f64,
    pub end: f64,
}

impl TimeDomain {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if start.is_nan() || end.is_nan() || start >= end {
            return Err(Error::InvalidParameter(format!("empty time domain ({start}, {end})")));
        }
        Ok(Self { start, end })
    }

    pub fn all() -> Self {
        Self {
            start: f64::NEG_INFINITY,
            end: f64::INFINITY,
        }
    }

    pub fn positive() -> Self {
        Self {
            start: 0.0,
            end: f64::INFINITY,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.start && t < self.end
    }

    /// True when `[lo, hi]` lies inside the open interval.
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.contains(lo) && self.contains(hi)
    }

    pub fn intersect(&self, other: &TimeDomain) -> Result<TimeDomain> {
        TimeDomain::new(self.start.max(other.start), self.end.min(other.end))
    }
}

impl fmt::Display for TimeDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

/// The evaluator behind a [`ClosedFormSolution`].
pub trait Profile: Send + Sync + fmt::Debug {
    /// `ψ(t, x)`; callers have already validated `t`.
    fn value(&self, t: f64, x: f64) -> Complex64;

    /// Map-specific singular points inside the declared domain.
    fn check_time(&self, _t: f64) -> Result<()> {
        Ok(())
    }

    /// Samples the profile on a grid. Non-local profiles override this.
    fn sample(&self, t: f64, grid: &Grid1D) -> Result<ComplexField> {
        ComplexField::from_fn(*grid, t, |x| self.value(t, x))
    }
}

/// Profile backed by a plain closure.
pub struct FnProfile<F>(pub F);

impl<F> fmt::Debug for FnProfile<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnProfile")
    }
}

impl<F> Profile for FnProfile<F>
where
    F: Fn(f64, f64) -> Complex64 + Send + Sync,
{
    fn value(&self, t: f64, x: f64) -> Complex64 {
        (self.0)(t, x)
    }
}

#[derive(Debug, Clone)]
pub struct ClosedFormSolution {
    name: String,
    solves: EquationSpec,
    domain: TimeDomain,
    profile: Arc<dyn Profile>,
    gauge_seam: bool,
}

impl ClosedFormSolution {
    pub fn new(
        name: impl Into<String>,
        solves: EquationSpec,
        domain: TimeDomain,
        profile: Arc<dyn Profile>,
    ) -> Self {
        Self {
            name: name.into(),
            solves,
            domain,
            profile,
            gauge_seam: false,
        }
    }

    pub fn from_fn<F>(name: impl Into<String>, solves: EquationSpec, domain: TimeDomain, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(name, solves, domain, Arc::new(FnProfile(f)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn solves(&self) -> &EquationSpec {
        &self.solves
    }

    pub fn domain(&self) -> &TimeDomain {
        &self.domain
    }

    pub fn profile(&self) -> &Arc<dyn Profile> {
        &self.profile
    }

    /// True when a gauge map contributed to this solution; residual norms
    /// then skip the seam nodes.
    pub fn has_gauge_seam(&self) -> bool {
        self.gauge_seam
    }

    pub(crate) fn mark_gauge_seam(mut self) -> Self {
        self.gauge_seam = true;
        self
    }

    /// Same evaluator, asserted to solve a different equation.
    pub fn with_claim(mut self, eq: EquationSpec) -> Self {
        self.solves = eq;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if !self.domain.contains(t) {
            return Err(Error::InvalidTime {
                t,
                reason: format!("{} is defined on {}", self.name, self.domain),
            });
        }
        self.profile.check_time(t)
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<Complex64> {
        self.check_time(t)?;
        Ok(self.profile.value(t, x))
    }

    pub fn sample(&self, t: f64, grid: &Grid1D) -> Result<ComplexField> {
        self.check_time(t)?;
        self.profile.sample(t, grid)
    }
}
