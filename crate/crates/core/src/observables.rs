//! Diagnostics and residual oracles.

use serde::{Deserialize, Serialize};

use crate::equations::{current_with, CurrentKind, DerivativeRoute, EquationSpec, RhsEvaluator, RhsOptions};
use crate::error::{Error, Result};
use crate::field::{ComplexField, Grid1D, RealField, SpectralOps, DEFAULT_DECAY_GATE, FD_EDGE_NODES, GATE_EDGE_NODES};
use crate::integrator::TrajectoryRecord;
use crate::solutions::ClosedFormSolution;
use crate::Complex64;

/// Nodes per edge dropped from residual norms of gauge-mapped fields.
pub const SEAM_EXCLUDED_NODES: usize = 4;

/// Default time step of the finite-difference time derivative.
pub const DEFAULT_RESIDUAL_DT: f64 = 1e-3;

pub fn density(psi: &ComplexField) -> RealField {
    psi.density()
}

/// `Σ ρ dx`.
pub fn mass(psi: &ComplexField) -> f64 {
    psi.density().sum() * psi.grid().dx()
}

/// `Σ j dx` with a spectral current.
pub fn momentum(psi: &ComplexField) -> Result<f64> {
    momentum_with(psi, &SpectralOps::new(psi.grid()))
}

pub fn momentum_with(psi: &ComplexField, ops: &SpectralOps) -> Result<f64> {
    Ok(current_with(psi, ops)?.sum() * psi.grid().dx())
}

/// Density maximum refined by a parabola through `log ρ` (exact for
/// Gaussians). `None` for the zero field.
pub fn peak_position(psi: &ComplexField) -> Option<f64> {
    let rho = psi.density();
    let v = rho.values();
    let n = v.len();
    let (k, &top) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if top <= 0.0 {
        return None;
    }
    let grid = psi.grid();
    let (lo, hi) = (v[(k + n - 1) % n], v[(k + 1) % n]);
    let offset = if lo > 0.0 && hi > 0.0 {
        let (a, b, c) = (lo.ln(), top.ln(), hi.ln());
        let curv = a - 2.0 * b + c;
        if curv < 0.0 {
            0.5 * (a - c) / curv
        } else {
            0.0
        }
    } else {
        0.0
    };
    Some(grid.x(k) + offset * grid.dx())
}

/// Centered finite-difference stencil for `∂t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeStencil {
    Second,
    Fourth,
}

impl TimeStencil {
    /// Half-width in samples.
    pub fn reach(self) -> usize {
        match self {
            TimeStencil::Second => 1,
            TimeStencil::Fourth => 2,
        }
    }

    /// Weights for samples at offsets `-reach..=reach`, to be divided by `h`.
    fn weights(self) -> &'static [f64] {
        match self {
            TimeStencil::Second => &[-0.5, 0.0, 0.5],
            TimeStencil::Fourth => &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
        }
    }

    fn apply(self, samples: &[&[Complex64]], h: f64) -> Vec<Complex64> {
        let n = samples[0].len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (s, &w) in samples.iter().zip(self.weights()) {
            if w == 0.0 {
                continue;
            }
            for (o, z) in out.iter_mut().zip(s.iter()) {
                *o += z * (w / h);
            }
        }
        out
    }
}

/// How spatial derivatives in a residual are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteChoice {
    /// Spectral when the field passes the decay gate, interior FD otherwise.
    Auto,
    Spectral,
    InteriorFd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    pub time_step: f64,
    pub stencil: TimeStencil,
    pub route: RouteChoice,
    pub decay_gate: f64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            time_step: DEFAULT_RESIDUAL_DT,
            stencil: TimeStencil::Fourth,
            route: RouteChoice::Auto,
            decay_gate: DEFAULT_DECAY_GATE,
        }
    }
}

impl ResidualOptions {
    pub fn with_time_step(mut self, dt: f64) -> Self {
        self.time_step = dt;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: EquationSpec,
    pub solution: String,
    pub t_start: f64,
    pub t_end: f64,
    pub linf: f64,
    pub l2: f64,
    /// Nodes dropped at each edge.
    pub excluded_nodes: usize,
    pub route: DerivativeRoute,
    pub stencil: TimeStencil,
    pub time_step: f64,
}

impl ResidualReport {
    /// Worst case of several reports on the same equation.
    fn merge(mut self, other: &ResidualReport) -> Self {
        self.t_start = self.t_start.min(other.t_start);
        self.t_end = self.t_end.max(other.t_end);
        self.linf = self.linf.max(other.linf);
        self.l2 = self.l2.max(other.l2);
        self.excluded_nodes = self.excluded_nodes.max(other.excluded_nodes);
        if other.route == DerivativeRoute::InteriorFd {
            self.route = DerivativeRoute::InteriorFd;
        }
        self
    }
}

fn pick_route(choice: RouteChoice, center: &ComplexField, gate: f64) -> DerivativeRoute {
    match choice {
        RouteChoice::Spectral => DerivativeRoute::Spectral,
        RouteChoice::InteriorFd => DerivativeRoute::InteriorFd,
        RouteChoice::Auto if center.edge_magnitude() < gate => DerivativeRoute::Spectral,
        RouteChoice::Auto => DerivativeRoute::InteriorFd,
    }
}

fn excluded(route: DerivativeRoute, seam: bool) -> usize {
    if seam {
        SEAM_EXCLUDED_NODES
    } else if route == DerivativeRoute::InteriorFd {
        FD_EDGE_NODES
    } else {
        0
    }
}

/// `ψ_t - rhs` at the centre of `samples`, reported over interior nodes.
fn residual_from_samples(
    eq: &EquationSpec,
    samples: &[ComplexField],
    h: f64,
    opts: &ResidualOptions,
    seam: bool,
    name: &str,
) -> Result<ResidualReport> {
    let stencil = opts.stencil;
    let center = &samples[stencil.reach()];
    let route = pick_route(opts.route, center, opts.decay_gate);
    let slices: Vec<&[Complex64]> = samples.iter().map(|s| s.values()).collect();
    let dt = stencil.apply(&slices, h);
    let rhs = RhsEvaluator::new(*eq, center.grid(), RhsOptions::exact(route)).rhs(center.time(), center)?;
    let skip = excluded(route, seam);
    let n = dt.len();
    let dx = center.grid().dx();
    let (mut linf, mut sq) = (0.0f64, 0.0);
    for k in skip..n - skip {
        let r = (dt[k] - rhs.values()[k]).norm();
        linf = linf.max(r);
        sq += r * r * dx;
    }
    Ok(ResidualReport {
        equation: *eq,
        solution: name.to_string(),
        t_start: center.time(),
        t_end: center.time(),
        linf,
        l2: sq.sqrt(),
        excluded_nodes: skip,
        route,
        stencil,
        time_step: h,
    })
}

/// Residual of `i ψ_t = -σ ψ_xx + V[ψ]` for a closed-form solution at `t`.
pub fn pde_residual(eq: &EquationSpec, sol: &ClosedFormSolution, t: f64, grid: &Grid1D) -> Result<ResidualReport> {
    pde_residual_with(eq, sol, t, grid, &ResidualOptions::default())
}

pub fn pde_residual_with(
    eq: &EquationSpec,
    sol: &ClosedFormSolution,
    t: f64,
    grid: &Grid1D,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    let h = opts.time_step;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("residual time step must be positive, got {h}")));
    }
    let reach = opts.stencil.reach() as i64;
    let samples = (-reach..=reach)
        .map(|m| {
            let tm = if m == 0 { t } else { t + m as f64 * h };
            sol.check_time(tm).map_err(|e| match e {
                Error::InvalidTime { reason, .. } => Error::InvalidTime {
                    t,
                    reason: format!("stencil point {tm} leaves the domain: {reason}"),
                },
                other => other,
            })?;
            sol.sample(tm, grid)
        })
        .collect::<Result<Vec<_>>>()?;
    residual_from_samples(eq, &samples, h, opts, sol.has_gauge_seam(), sol.name())
}

/// Worst residual over several times.
pub fn pde_residual_window(
    eq: &EquationSpec,
    sol: &ClosedFormSolution,
    times: &[f64],
    grid: &Grid1D,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    let mut reports = times.iter().map(|&t| pde_residual_with(eq, sol, t, grid, opts));
    let first = reports
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty time window".into()))??;
    reports.try_fold(first, |acc, r| Ok(acc.merge(&r?)))
}

/// `n` evenly spaced times covering `[t0, t1]`.
pub fn window_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![t0];
    }
    (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect()
}

fn uniform_step(fields: &[ComplexField]) -> Result<f64> {
    if fields.len() < 2 {
        return Err(Error::InsufficientRecords {
            needed: 2,
            got: fields.len(),
        });
    }
    let h = fields[1].time() - fields[0].time();
    let uniform = fields
        .windows(2)
        .all(|w| ((w[1].time() - w[0].time()) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if !(h > 0.0 && uniform) {
        return Err(Error::InvalidParameter("records must be evenly spaced in time".into()));
    }
    Ok(h)
}

/// Residual of a sampled, evenly spaced sequence of fields, taken at every
/// record with a full stencil.
pub fn field_sequence_residual(
    eq: &EquationSpec,
    fields: &[ComplexField],
    seam: bool,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    let width = 2 * opts.stencil.reach() + 1;
    if fields.len() < width {
        return Err(Error::InsufficientRecords {
            needed: width,
            got: fields.len(),
        });
    }
    let h = uniform_step(fields)?;
    let mut out: Option<ResidualReport> = None;
    for window in fields.windows(width) {
        let r = residual_from_samples(eq, window, h, opts, seam, "samples")?;
        out = Some(match out {
            None => r,
            Some(acc) => acc.merge(&r),
        });
    }
    Ok(out.expect("at least one window"))
}

/// Residual of a recorded trajectory against the equation it was run with.
pub fn trajectory_residual(traj: &TrajectoryRecord, opts: &ResidualOptions) -> Result<ResidualReport> {
    field_sequence_residual(&traj.equation, &traj.fields, false, opts)
}

/// Flux `J` closing `∂t ρ + ∂x J = 0`.
pub fn continuity_flux(eq: &EquationSpec, psi: &ComplexField, kind: CurrentKind, ops: &SpectralOps) -> Result<RealField> {
    let j = current_with(psi, ops)?;
    let scale = 2.0 * eq.sigma().value();
    let shift = match kind {
        CurrentKind::Plain => 0.0,
        CurrentKind::Covariant => {
            let kappa = eq.kappa().ok_or_else(|| {
                Error::InvalidParameter(format!("covariant current needs a kappa; {eq} has none"))
            })?;
            kappa * kappa
        }
    };
    let values = j
        .values()
        .iter()
        .zip(psi.values())
        .map(|(&jk, z)| scale * (jk - shift * z.norm_sqr().powi(2)))
        .collect();
    RealField::new(*psi.grid(), values, psi.time())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityOptions {
    pub kind: CurrentKind,
    pub stencil: TimeStencil,
    /// Nodes dropped at each edge.
    pub margin: usize,
}

impl ContinuityOptions {
    pub fn for_equation(eq: &EquationSpec) -> Self {
        Self {
            kind: eq.default_current_kind(),
            stencil: TimeStencil::Second,
            margin: 0,
        }
    }
}

/// `L∞` of `∂t ρ + ∂x J` at every record that has a full stencil; the
/// remaining entries are `None`.
pub fn continuity_series(
    eq: &EquationSpec,
    fields: &[ComplexField],
    opts: &ContinuityOptions,
) -> Result<Vec<Option<f64>>> {
    let reach = opts.stencil.reach();
    let width = 2 * reach + 1;
    if fields.len() < width {
        return Err(Error::InsufficientRecords {
            needed: width,
            got: fields.len(),
        });
    }
    let h = uniform_step(fields)?;
    let ops = SpectralOps::new(fields[0].grid());
    let rho: Vec<Vec<Complex64>> = fields
        .iter()
        .map(|f| f.values().iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect())
        .collect();
    let mut out = vec![None; fields.len()];
    for m in reach..fields.len() - reach {
        let slices: Vec<&[Complex64]> = rho[m - reach..=m + reach].iter().map(Vec::as_slice).collect();
        let drho = opts.stencil.apply(&slices, h);
        let flux = continuity_flux(eq, &fields[m], opts.kind, &ops)?;
        let dflux = ops.derivative_values(&flux.to_complex().into_values(), 1)?;
        let n = drho.len();
        let worst = (opts.margin..n - opts.margin)
            .map(|k| (drho[k].re + dflux[k].re).abs())
            .fold(0.0, f64::max);
        out[m] = Some(worst);
    }
    Ok(out)
}

/// Continuity residual of a trajectory with the second-order stencil.
pub fn continuity_residual(traj: &TrajectoryRecord, kind: CurrentKind) -> Result<Vec<f64>> {
    let opts = ContinuityOptions {
        kind,
        ..ContinuityOptions::for_equation(&traj.equation)
    };
    Ok(continuity_series(&traj.equation, &traj.fields, &opts)?
        .into_iter()
        .flatten()
        .collect())
}

/// Relative `L∞` of `(ρ')² - v²ρ² + 4κ²vρ³ + 4κ⁴ρ⁴` over interior nodes,
/// scaled by the largest term.
pub fn density_ode_residual(v: f64, kappa: f64, rho: &RealField) -> Result<f64> {
    if !(v.is_finite() && kappa.is_finite()) {
        return Err(Error::NonFiniteInput(format!("v = {v}, kappa = {kappa}")));
    }
    let ops = SpectralOps::new(rho.grid());
    let d = ops.derivative_values(&rho.to_complex().into_values(), 1)?;
    let k2 = kappa * kappa;
    let n = rho.values().len();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for k in GATE_EDGE_NODES..n - GATE_EDGE_NODES {
        let r = rho.values()[k];
        let terms = [
            d[k].re * d[k].re,
            -v * v * r * r,
            4.0 * k2 * v * r.powi(3),
            4.0 * k2 * k2 * r.powi(4),
        ];
        worst = worst.max(terms.iter().sum::<f64>().abs());
        scale = terms.iter().fold(scale, |s, t| s.max(t.abs()));
    }
    Ok(if scale == 0.0 { 0.0 } else { worst / scale })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualConvergence {
    pub coarse_dt: f64,
    pub coarse: f64,
    pub fine: f64,
    /// `coarse / fine`; about 16 for the fourth-order stencil.
    pub factor: f64,
}

/// Residual at `dt` and `dt/2`.
pub fn residual_convergence(
    eq: &EquationSpec,
    sol: &ClosedFormSolution,
    t: f64,
    grid: &Grid1D,
    dt: f64,
) -> Result<ResidualConvergence> {
    let base = ResidualOptions::default();
    let coarse = pde_residual_with(eq, sol, t, grid, &base.with_time_step(dt))?.linf;
    let fine = pde_residual_with(eq, sol, t, grid, &base.with_time_step(0.5 * dt))?.linf;
    Ok(ResidualConvergence {
        coarse_dt: dt,
        coarse,
        fine,
        factor: coarse / fine,
    })
}
