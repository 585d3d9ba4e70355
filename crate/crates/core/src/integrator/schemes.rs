use std::collections::BTreeMap;
use std::sync::Arc;

use crate::equations::RhsEvaluator;
use crate::error::{Error, Result};
use crate::Complex64;

/// A fixed-step scheme advancing the Fourier coefficients `û`.
pub trait Scheme: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Precomputes step-size dependent data.
    fn prepare<'a>(&self, rhs: &'a RhsEvaluator, dt: f64) -> Box<dyn Stepper + 'a>;
}

pub trait Stepper {
    /// Advances `u` (spectral) from `t` to `t + dt`.
    fn step(&mut self, t: f64, u: &mut [Complex64]) -> Result<()>;
}

/// `-i σ k²`, the symbol of the dispersive part.
fn linear_symbol(rhs: &RhsEvaluator) -> Vec<Complex64> {
    let sigma = rhs.equation().sigma().value();
    rhs.ops()
        .wavenumbers()
        .iter()
        .map(|&k| Complex64::new(0.0, -sigma * k * k))
        .collect()
}

/// Spectrum of the non-dispersive part at spectral state `u`.
fn nonlinear(rhs: &RhsEvaluator, t: f64, u: &[Complex64]) -> Result<Vec<Complex64>> {
    let psi = rhs.ops().inverse(u.to_vec());
    rhs.nonlinear_spectrum(t, &psi)
}

/// Integrating-factor RK4: the dispersive part is propagated exactly.
pub struct Ifrk4;

struct Ifrk4Stepper<'a> {
    rhs: &'a RhsEvaluator,
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl Scheme for Ifrk4 {
    fn name(&self) -> &'static str {
        "ifrk4"
    }
    fn summary(&self) -> &'static str {
        "integrating-factor RK4, exact linear propagation"
    }
    fn prepare<'a>(&self, rhs: &'a RhsEvaluator, dt: f64) -> Box<dyn Stepper + 'a> {
        let l = linear_symbol(rhs);
        Box::new(Ifrk4Stepper {
            rhs,
            dt,
            half: l.iter().map(|&z| (z * (0.5 * dt)).exp()).collect(),
            full: l.iter().map(|&z| (z * dt).exp()).collect(),
        })
    }
}

impl Stepper for Ifrk4Stepper<'_> {
    fn step(&mut self, t: f64, u: &mut [Complex64]) -> Result<()> {
        let (dt, e, e2) = (self.dt, &self.half, &self.full);
        let n = u.len();
        let scale = |v: Vec<Complex64>| -> Vec<Complex64> { v.into_iter().map(|z| z * dt).collect() };

        let k1 = scale(nonlinear(self.rhs, t, u)?);
        let u2: Vec<Complex64> = (0..n).map(|p| e[p] * (u[p] + 0.5 * k1[p])).collect();
        let k2 = scale(nonlinear(self.rhs, t + 0.5 * dt, &u2)?);
        let u3: Vec<Complex64> = (0..n).map(|p| e[p] * u[p] + 0.5 * k2[p]).collect();
        let k3 = scale(nonlinear(self.rhs, t + 0.5 * dt, &u3)?);
        let u4: Vec<Complex64> = (0..n).map(|p| e2[p] * u[p] + e[p] * k3[p]).collect();
        let k4 = scale(nonlinear(self.rhs, t + dt, &u4)?);
        for p in 0..n {
            u[p] = e2[p] * u[p] + (e2[p] * k1[p] + 2.0 * e[p] * (k2[p] + k3[p]) + k4[p]) / 6.0;
        }
        Ok(())
    }
}

/// Classical explicit RK4 on the full right-hand side, for cross-checks.
pub struct Rk4;

struct Rk4Stepper<'a> {
    rhs: &'a RhsEvaluator,
    dt: f64,
    symbol: Vec<Complex64>,
}

impl Scheme for Rk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }
    fn summary(&self) -> &'static str {
        "explicit RK4 (stable for dt below about 2.8 / (sigma k_max^2))"
    }
    fn prepare<'a>(&self, rhs: &'a RhsEvaluator, dt: f64) -> Box<dyn Stepper + 'a> {
        Box::new(Rk4Stepper {
            rhs,
            dt,
            symbol: linear_symbol(rhs),
        })
    }
}

impl Rk4Stepper<'_> {
    fn full(&self, t: f64, u: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut f = nonlinear(self.rhs, t, u)?;
        for ((fp, &lp), &up) in f.iter_mut().zip(&self.symbol).zip(u) {
            *fp += lp * up;
        }
        Ok(f)
    }
}

impl Stepper for Rk4Stepper<'_> {
    fn step(&mut self, t: f64, u: &mut [Complex64]) -> Result<()> {
        let dt = self.dt;
        let n = u.len();
        let axpy = |a: f64, k: &[Complex64]| -> Vec<Complex64> { (0..n).map(|p| u[p] + a * dt * k[p]).collect() };
        let k1 = self.full(t, u)?;
        let k2 = self.full(t + 0.5 * dt, &axpy(0.5, &k1))?;
        let k3 = self.full(t + 0.5 * dt, &axpy(0.5, &k2))?;
        let k4 = self.full(t + dt, &axpy(1.0, &k3))?;
        for p in 0..n {
            u[p] += dt / 6.0 * (k1[p] + 2.0 * (k2[p] + k3[p]) + k4[p]);
        }
        Ok(())
    }
}

/// Name-keyed registry of time-stepping schemes.
#[derive(Clone)]
pub struct SchemeRegistry {
    schemes: BTreeMap<&'static str, Arc<dyn Scheme>>,
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        Self {
            schemes: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Ifrk4));
        r.register(Arc::new(Rk4));
        r
    }

    pub fn register(&mut self, scheme: Arc<dyn Scheme>) {
        self.schemes.insert(scheme.name(), scheme);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Scheme>> {
        self.schemes
            .get(name.to_ascii_lowercase().as_str())
            .cloned()
            .ok_or_else(|| Error::UnknownName {
                kind: "scheme",
                name: name.to_string(),
            })
    }

    pub fn names(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.schemes.values().map(|s| (s.name(), s.summary()))
    }
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        Self::standard()
    }
}
