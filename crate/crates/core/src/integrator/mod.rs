//! Fixed-step pseudo-spectral time evolution.

mod schemes;

pub use schemes::{Ifrk4, Rk4, Scheme, SchemeRegistry, Stepper};

use serde::{Deserialize, Serialize};

use crate::equations::{EquationSpec, RhsEvaluator, RhsOptions};
use crate::error::{Error, Result};
use crate::field::{ComplexField, Grid1D, SpectralOps, DEFAULT_DECAY_GATE};
use crate::observables::{continuity_series, mass, momentum_with, peak_position, ContinuityOptions};

/// Largest `|ψ|` tolerated before a run is declared blown up.
pub const BLOW_UP_LIMIT: f64 = 1e6;

/// Minimum distance of the run interval from the pole of `1/(a + b t)`.
pub const VNLS_POLE_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
    pub scheme: String,
    pub dealias: bool,
    pub record_every: usize,
    /// Edge tolerance on `|ψ|`; `inf` disables the gate.
    pub decay_gate: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t0: 0.0,
            t1: 1.0,
            scheme: "ifrk4".into(),
            dealias: true,
            record_every: 100,
            decay_gate: DEFAULT_DECAY_GATE,
        }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, t0: f64, t1: f64) -> Self {
        Self {
            dt,
            t0,
            t1,
            ..Self::default()
        }
    }

    pub fn with_scheme(mut self, name: &str) -> Self {
        self.scheme = name.to_string();
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn with_decay_gate(mut self, gate: f64) -> Self {
        self.decay_gate = gate;
        self
    }

    /// Number of steps; `dt` is shrunk slightly when it does not divide the interval.
    pub fn steps(&self) -> usize {
        (((self.t1 - self.t0) / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        (self.t1 - self.t0) / self.steps() as f64
    }

    pub fn validate(&self, eq: &EquationSpec) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t0 < self.t1) {
            return bad(format!("need finite t0 < t1, got [{}, {}]", self.t0, self.t1));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.dt > self.t1 - self.t0 {
            return bad(format!("dt = {} exceeds the interval length {}", self.dt, self.t1 - self.t0));
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if !(self.decay_gate > 0.0) {
            return bad(format!("decay gate must be positive, got {}", self.decay_gate));
        }
        if let Some(ts) = eq.singular_time() {
            if ts > self.t0 - VNLS_POLE_MARGIN && ts < self.t1 + VNLS_POLE_MARGIN {
                return bad(format!(
                    "t0 must avoid the coefficient singularity: interval [{}, {}] comes within {VNLS_POLE_MARGIN} of the pole t = {ts} of {eq}",
                    self.t0, self.t1
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableRow {
    pub t: f64,
    pub mass: f64,
    pub momentum: f64,
    pub peak: Option<f64>,
    /// `L∞` of `∂t ρ + ∂x J`; absent where the stencil does not fit.
    pub continuity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub equation: EquationSpec,
    pub grid: Grid1D,
    pub scheme: String,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub fields: Vec<ComplexField>,
    pub observables: Vec<ObservableRow>,
}

impl TrajectoryRecord {
    pub fn last(&self) -> &ComplexField {
        self.fields.last().expect("a trajectory holds its initial condition")
    }

    pub fn mass_drift(&self) -> f64 {
        let m0 = self.observables[0].mass;
        let worst = self
            .observables
            .iter()
            .map(|o| (o.mass - m0).abs())
            .fold(0.0, f64::max);
        if m0 == 0.0 {
            worst
        } else {
            worst / m0
        }
    }
}

/// A run that may have stopped early; `record` holds what was reached.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub record: TrajectoryRecord,
    pub failure: Option<Error>,
}

fn row(psi: &ComplexField, ops: &SpectralOps) -> Result<ObservableRow> {
    Ok(ObservableRow {
        t: psi.time(),
        mass: mass(psi),
        momentum: momentum_with(psi, ops)?,
        peak: peak_position(psi),
        continuity: None,
    })
}

fn fill_continuity(record: &mut TrajectoryRecord) {
    let opts = ContinuityOptions::for_equation(&record.equation);
    if let Ok(series) = continuity_series(&record.equation, &record.fields, &opts) {
        for (o, c) in record.observables.iter_mut().zip(series) {
            o.continuity = c;
        }
    }
}

/// Evolves `psi0` over `[cfg.t0, cfg.t1]`.
pub fn evolve(eq: &EquationSpec, psi0: &ComplexField, cfg: &IntegratorConfig) -> Result<TrajectoryRecord> {
    let run = evolve_with(eq, psi0, cfg, &SchemeRegistry::standard())?;
    match run.failure {
        None => Ok(run.record),
        Some(e) => Err(e),
    }
}

/// Like [`evolve`], but returns the partial trajectory when a numerical
/// failure stops the run. Configuration errors still fail outright.
pub fn evolve_with(
    eq: &EquationSpec,
    psi0: &ComplexField,
    cfg: &IntegratorConfig,
    schemes: &SchemeRegistry,
) -> Result<Evolution> {
    cfg.validate(eq)?;
    let scheme = schemes.get(&cfg.scheme)?;
    psi0.check_decay(cfg.decay_gate)?;
    let grid = *psi0.grid();
    let psi0 = psi0.clone().with_time(cfg.t0);
    let opts = RhsOptions {
        dealias: cfg.dealias,
        ..RhsOptions::default()
    };
    let rhs = RhsEvaluator::new(*eq, &grid, opts);
    let ops = rhs.ops().clone();
    let steps = cfg.steps();
    let dt = cfg.effective_dt();
    let mut record = TrajectoryRecord {
        equation: *eq,
        grid,
        scheme: scheme.name().to_string(),
        dt,
        steps,
        times: vec![cfg.t0],
        observables: vec![row(&psi0, &ops)?],
        fields: vec![psi0.clone()],
    };

    let mut u = ops.forward(psi0.values());
    let mut stepper = scheme.prepare(&rhs, dt);
    let mut failure = None;
    for n in 0..steps {
        let t = cfg.t0 + n as f64 * dt;
        if let Err(e) = stepper.step(t, &mut u) {
            failure = Some(e);
            break;
        }
        let done = n + 1 == steps;
        if (n + 1) % cfg.record_every != 0 && !done {
            continue;
        }
        let t_next = if done { cfg.t1 } else { cfg.t0 + (n + 1) as f64 * dt };
        let values = ops.inverse(u.clone());
        let worst = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(worst <= BLOW_UP_LIMIT) {
            failure = Some(Error::BlowUp { t: t_next, value: worst });
            break;
        }
        let field = ComplexField::new(grid, values, t_next)?;
        if let Err(e) = field.check_decay(cfg.decay_gate) {
            failure = Some(e);
            break;
        }
        record.times.push(t_next);
        record.observables.push(row(&field, &ops)?);
        record.fields.push(field);
    }
    fill_continuity(&mut record);
    Ok(Evolution { record, failure })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub base_dt: f64,
    /// `|u(dt) - u(dt/2)|∞` and `|u(dt/2) - u(dt/4)|∞` at the final time.
    pub differences: [f64; 2],
    pub order: f64,
    /// The differences sit at round-off; `order` is meaningless.
    pub floor: bool,
}

/// Round-off level of step-to-step differences, relative to `max|ψ|`.
pub const CONVERGENCE_FLOOR: f64 = 1e-12;

/// Self-convergence order from runs at `dt`, `dt/2`, `dt/4` over `[t0, t1]`.
pub fn convergence_order_with(
    eq: &EquationSpec,
    psi0: &ComplexField,
    cfg: &IntegratorConfig,
) -> Result<ConvergenceReport> {
    let finals = [1.0, 0.5, 0.25]
        .iter()
        .map(|f| {
            let c = IntegratorConfig {
                dt: cfg.dt * f,
                record_every: usize::MAX,
                ..cfg.clone()
            };
            Ok(evolve(eq, psi0, &c)?.last().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let d1 = finals[0].max_abs_diff(&finals[1], 0);
    let d2 = finals[1].max_abs_diff(&finals[2], 0);
    let floor = d2 <= CONVERGENCE_FLOOR * finals[2].max_abs().max(1.0);
    Ok(ConvergenceReport {
        base_dt: cfg.dt,
        differences: [d1, d2],
        order: (d1 / d2).log2(),
        floor,
    })
}

/// [`convergence_order_with`] over one time unit from `psi0.time()`.
pub fn convergence_order(eq: &EquationSpec, psi0: &ComplexField, base_dt: f64) -> Result<ConvergenceReport> {
    let t0 = psi0.time();
    convergence_order_with(eq, psi0, &IntegratorConfig::new(base_dt, t0, t0 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::Kinetic;
    use crate::Complex64;

    #[test]
    fn config_validation() {
        let eq = EquationSpec::free(Kinetic::Half);
        assert!(IntegratorConfig::new(1e-3, 0.0, 1.0).validate(&eq).is_ok());
        assert!(IntegratorConfig::new(0.0, 0.0, 1.0).validate(&eq).is_err());
        assert!(IntegratorConfig::new(2.0, 0.0, 1.0).validate(&eq).is_err());
        assert!(IntegratorConfig::new(1e-3, 1.0, 1.0).validate(&eq).is_err());
        assert!(IntegratorConfig::new(1e-3, 0.0, 1.0)
            .with_record_every(0)
            .validate(&eq)
            .is_err());
        let tnls = EquationSpec::variable_coeff(0.0, 1.0).unwrap();
        assert!(IntegratorConfig::new(1e-3, 0.05, 1.0).validate(&tnls).is_err());
        assert!(IntegratorConfig::new(1e-3, 0.1, 1.0).validate(&tnls).is_ok());
        assert!(IntegratorConfig::new(1e-3, -2.0, -0.05).validate(&tnls).is_err());
    }

    #[test]
    fn step_count_covers_interval() {
        let c = IntegratorConfig::new(0.3, 0.0, 1.0);
        assert_eq!(c.steps(), 4);
        assert!((c.effective_dt() - 0.25).abs() < 1e-15);
        assert_eq!(IntegratorConfig::new(1e-3, 0.0, 5.0).steps(), 5000);
    }

    #[test]
    fn plane_wave_is_propagated_exactly() {
        let g = Grid1D::new(40.0, 256).unwrap();
        let k = std::f64::consts::PI * 12.0 / 40.0;
        let psi0 = ComplexField::from_fn(g, 0.0, |x| Complex64::new(0.0, k * x).exp()).unwrap();
        let eq = EquationSpec::free(Kinetic::Half);
        let cfg = IntegratorConfig::new(0.01, 0.0, 2.0).with_decay_gate(f64::INFINITY);
        let out = evolve(&eq, &psi0, &cfg).unwrap();
        let phase = Complex64::new(0.0, -0.5 * k * k * 2.0).exp();
        let expect = psi0.map(|_, z| z * phase).unwrap();
        assert!(out.last().max_abs_diff(&expect, 0) <= 1e-10);
    }

    #[test]
    fn zero_stays_zero() {
        let g = Grid1D::new(20.0, 128).unwrap();
        let z = ComplexField::zeros(g, 0.0);
        for eq in [
            EquationSpec::current(1.0).unwrap(),
            EquationSpec::dnls2(1.0).unwrap(),
            EquationSpec::oscillator(1.0, 1.0).unwrap(),
        ] {
            let out = evolve(&eq, &z, &IntegratorConfig::new(0.01, 0.0, 0.2).with_record_every(5)).unwrap();
            assert!(out.fields.iter().all(|f| f.max_abs() == 0.0));
            assert_eq!(out.times.len(), 5);
        }
    }

    #[test]
    fn leak_and_scheme_errors() {
        let g = Grid1D::new(20.0, 128).unwrap();
        let flat = ComplexField::from_fn(g, 0.0, |_| Complex64::new(1.0, 0.0)).unwrap();
        let eq = EquationSpec::free(Kinetic::Half);
        let cfg = IntegratorConfig::new(0.01, 0.0, 0.1);
        assert!(matches!(evolve(&eq, &flat, &cfg), Err(Error::BoundaryLeak { .. })));
        let z = ComplexField::zeros(g, 0.0);
        assert!(matches!(
            evolve(&eq, &z, &cfg.clone().with_scheme("euler")),
            Err(Error::UnknownName { .. })
        ));
    }

    #[test]
    fn packet_reaching_the_edge_stops_the_run() {
        let g = Grid1D::new(10.0, 256).unwrap();
        let psi0 =
            ComplexField::from_fn(g, 0.0, |x| Complex64::new((-(x - 3.0).powi(2)).exp(), 0.0) * Complex64::new(0.0, 6.0 * x).exp())
                .unwrap();
        let eq = EquationSpec::free(Kinetic::Half);
        let run = evolve_with(
            &eq,
            &psi0,
            &IntegratorConfig::new(0.01, 0.0, 3.0).with_record_every(1),
            &SchemeRegistry::standard(),
        )
        .unwrap();
        assert!(matches!(run.failure, Some(Error::BoundaryLeak { .. })));
        assert!(run.record.times.len() > 1);
        assert!(*run.record.times.last().unwrap() < 3.0);
    }
}
