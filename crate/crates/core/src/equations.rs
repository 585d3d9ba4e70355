//! Right-hand sides of the edge-state equation family.
//!
//! Every equation is written as `i ∂t psi = -sigma ∂x² psi + V[psi](t, x)`,
//! where the dispersive part carries the kinetic coefficient `sigma` and `V`
//! collects the nonlinear, derivative and potential terms. Integrators treat
//! the first part exactly in Fourier space and the second with RK stages;
//! residual oracles evaluate both.

use std::fmt;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{fd_derivative_interior, ComplexField, RealField, SpectralOps};
use crate::integrability::CoefficientFamily;
use crate::params::ParamMap;

/// Threshold below which `a + b t` or `cos(wt)` count as singular.
pub const SINGULAR_COEFFICIENT_TOL: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Coefficient multiplying `∂x²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kinetic {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "1")]
    One,
}

impl Kinetic {
    pub fn value(self) -> f64 {
        match self {
            Kinetic::Half => 0.5,
            Kinetic::One => 1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 0.5 {
            Ok(Kinetic::Half)
        } else if v == 1.0 {
            Ok(Kinetic::One)
        } else {
            Err(Error::InvalidParameter(format!(
                "kinetic coefficient must be 1/2 or 1, got {v}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Variant {
    /// `i ψ_t = -σ ψ_xx`.
    FreeLinear,
    /// `i ψ_t = -σ ψ_xx - F |ψ|² ψ`.
    CubicNls { coupling: f64 },
    /// `i ψ_t = -σ ψ_xx - |ψ|² ψ / (a + b t)`.
    VariableCoeffNls { a: f64, b: f64 },
    /// `i ψ_t = -½ ψ_xx - 2κ² j ψ`, with `j = Im(ψ* ψ_x)`.
    CurrentNls { kappa: f64 },
    /// `i φ_t = -½ (∂x - iκ²ρ)² φ - κ² j_cov φ`.
    GaugedNls { kappa: f64 },
    /// `i ψ_t = -½ ψ_xx - 2κ² j ψ - (3/2) κ⁴ |ψ|⁴ ψ`.
    ExtendedCurrentNls { kappa: f64 },
    /// `i φ_t = -½ φ_xx + 2iκ² ρ φ_x` (sign fixed by the inverse gauge map).
    Dnls2 { kappa: f64 },
    /// `i ψ_t = -ψ_xx + (2αx - F|ψ|²) ψ`.
    LinearPotentialNls { alpha: f64, coupling: f64 },
    /// `i ψ_t = -ψ_xx + (ω²x²/4 - F|ψ|²/cos ωt) ψ`.
    OscillatorNls { omega: f64, coupling: f64 },
}

/// A member of the equation family with its explicit kinetic convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquationSpec {
    variant: Variant,
    sigma: Kinetic,
}

/// Coefficients of `i(a ψψ* ψ_x + b ψ² ψ*_x) + c ψ³ψ*²` in the
/// derivative-NLS normal form `i ψ_t + ½ ψ_xx + ... = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DnlsCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DnlsCoefficients {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::NonFiniteInput(format!("({a}, {b}, {c})")));
        }
        Ok(Self { a, b, c })
    }
}

/// Which flux closes the continuity law `∂t ρ + ∂x J = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurrentKind {
    Plain,
    Covariant,
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

fn nonzero_kappa(v: f64) -> Result<()> {
    finite("kappa", v)?;
    if v == 0.0 {
        return Err(Error::InvalidParameter("kappa must be non-zero".into()));
    }
    Ok(())
}

impl EquationSpec {
    /// Validates the parameter invariants and the kinetic convention.
    pub fn new(variant: Variant, sigma: Kinetic) -> Result<Self> {
        use Variant::*;
        let fixed = match variant {
            FreeLinear => None,
            CubicNls { coupling } => {
                finite("F", coupling)?;
                None
            }
            VariableCoeffNls { a, b } => {
                finite("a", a)?;
                finite("b", b)?;
                if a == 0.0 && b == 0.0 {
                    return Err(Error::InvalidParameter("(a, b) must not both vanish".into()));
                }
                None
            }
            CurrentNls { kappa } | GaugedNls { kappa } | ExtendedCurrentNls { kappa } | Dnls2 { kappa } => {
                nonzero_kappa(kappa)?;
                Some(Kinetic::Half)
            }
            LinearPotentialNls { alpha, coupling } => {
                finite("alpha", alpha)?;
                finite("F", coupling)?;
                Some(Kinetic::One)
            }
            OscillatorNls { omega, coupling } => {
                finite("omega", omega)?;
                finite("F", coupling)?;
                Some(Kinetic::One)
            }
        };
        if let Some(required) = fixed {
            if required != sigma {
                return Err(Error::InvalidParameter(format!(
                    "{} requires kinetic coefficient {}",
                    variant_name(&variant),
                    required.value()
                )));
            }
        }
        Ok(Self { variant, sigma })
    }

    pub fn free(sigma: Kinetic) -> Self {
        Self {
            variant: Variant::FreeLinear,
            sigma,
        }
    }

    pub fn cubic(coupling: f64, sigma: Kinetic) -> Result<Self> {
        Self::new(Variant::CubicNls { coupling }, sigma)
    }

    /// `F(t) = 1/(a + b t)` with the ½ kinetic convention.
    pub fn variable_coeff(a: f64, b: f64) -> Result<Self> {
        Self::new(Variant::VariableCoeffNls { a, b }, Kinetic::Half)
    }

    pub fn current(kappa: f64) -> Result<Self> {
        Self::new(Variant::CurrentNls { kappa }, Kinetic::Half)
    }

    pub fn gauged(kappa: f64) -> Result<Self> {
        Self::new(Variant::GaugedNls { kappa }, Kinetic::Half)
    }

    pub fn extended_current(kappa: f64) -> Result<Self> {
        Self::new(Variant::ExtendedCurrentNls { kappa }, Kinetic::Half)
    }

    pub fn dnls2(kappa: f64) -> Result<Self> {
        Self::new(Variant::Dnls2 { kappa }, Kinetic::Half)
    }

    pub fn linear_potential(alpha: f64, coupling: f64) -> Result<Self> {
        Self::new(Variant::LinearPotentialNls { alpha, coupling }, Kinetic::One)
    }

    pub fn oscillator(omega: f64, coupling: f64) -> Result<Self> {
        Self::new(Variant::OscillatorNls { omega, coupling }, Kinetic::One)
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn sigma(&self) -> Kinetic {
        self.sigma
    }

    pub fn name(&self) -> &'static str {
        variant_name(&self.variant)
    }

    pub fn kappa(&self) -> Option<f64> {
        match self.variant {
            Variant::CurrentNls { kappa }
            | Variant::GaugedNls { kappa }
            | Variant::ExtendedCurrentNls { kappa }
            | Variant::Dnls2 { kappa } => Some(kappa),
            _ => None,
        }
    }

    /// Time at which `1/(a + b t)` blows up, if any.
    pub fn singular_time(&self) -> Option<f64> {
        match self.variant {
            Variant::VariableCoeffNls { a, b } if b != 0.0 => Some(-a / b + 0.0),
            _ => None,
        }
    }

    /// Derivative-NLS normal form, for the members that have one.
    pub fn dnls_coefficients(&self) -> Option<DnlsCoefficients> {
        let k2 = self.kappa()? * self.kappa()?;
        match self.variant {
            Variant::CurrentNls { .. } => Some(DnlsCoefficients { a: -k2, b: k2, c: 0.0 }),
            Variant::ExtendedCurrentNls { .. } => Some(DnlsCoefficients {
                a: -k2,
                b: k2,
                c: 1.5 * k2 * k2,
            }),
            Variant::Dnls2 { .. } => Some(DnlsCoefficients {
                a: -2.0 * k2,
                b: 0.0,
                c: 0.0,
            }),
            _ => None,
        }
    }

    /// Time dependence of the cubic coupling, for the cubic members.
    pub fn coefficient_family(&self) -> Option<CoefficientFamily> {
        match self.variant {
            Variant::CubicNls { coupling } => Some(CoefficientFamily::Constant(coupling)),
            Variant::VariableCoeffNls { a, b } => Some(CoefficientFamily::InverseLinear { a, b }),
            _ => None,
        }
    }

    /// Integrability as asserted for each catalog member.
    pub fn claimed_integrable(&self) -> Option<bool> {
        match self.variant {
            Variant::FreeLinear
            | Variant::CubicNls { .. }
            | Variant::VariableCoeffNls { .. }
            | Variant::ExtendedCurrentNls { .. }
            | Variant::Dnls2 { .. }
            | Variant::LinearPotentialNls { .. }
            | Variant::OscillatorNls { .. } => Some(true),
            Variant::CurrentNls { .. } => Some(false),
            Variant::GaugedNls { .. } => None,
        }
    }

    /// Flux closing the continuity law for this equation.
    pub fn default_current_kind(&self) -> CurrentKind {
        match self.variant {
            Variant::GaugedNls { .. } | Variant::Dnls2 { .. } => CurrentKind::Covariant,
            _ => CurrentKind::Plain,
        }
    }

    /// True when the right-hand side depends explicitly on x.
    pub fn has_potential(&self) -> bool {
        matches!(
            self.variant,
            Variant::LinearPotentialNls { .. } | Variant::OscillatorNls { .. }
        )
    }

    /// Looks up an equation by its CLI name.
    ///
    /// Recognised keys: `kappa|k`, `F|coupling`, `a`, `b`, `alpha`, `omega|w`, `sigma`.
    pub fn from_descriptor(name: &str, p: &ParamMap) -> Result<Self> {
        let sigma = match p.get_f64(&["sigma"])? {
            Some(v) => Some(Kinetic::from_value(v)?),
            None => None,
        };
        let kappa = || p.f64_or(&["kappa", "k"], 1.0);
        let eq = match name {
            "free" | "free-linear" => Self::free(sigma.unwrap_or(Kinetic::Half)),
            "cubic-nls" | "nls" => Self::cubic(p.f64_or(&["F", "coupling"], 1.0)?, sigma.unwrap_or(Kinetic::Half))?,
            "tnls" | "vnls" | "variable-coeff-nls" => {
                let (a0, b0) = if name == "tnls" { (0.0, 1.0) } else { (1.0, 0.0) };
                Self::new(
                    Variant::VariableCoeffNls {
                        a: p.f64_or(&["a"], a0)?,
                        b: p.f64_or(&["b"], b0)?,
                    },
                    sigma.unwrap_or(Kinetic::Half),
                )?
            }
            "current-nls" | "jnls" => Self::current(kappa()?)?,
            "gauged-nls" => Self::gauged(kappa()?)?,
            "extended-nls" | "6jnls" | "extended-current-nls" => Self::extended_current(kappa()?)?,
            "dnls2" => Self::dnls2(kappa()?)?,
            "linear-potential-nls" | "clleq" => Self::linear_potential(
                p.f64_or(&["alpha"], 0.25)?,
                p.f64_or(&["F", "coupling"], 2.0)?,
            )?,
            "oscillator-nls" => Self::oscillator(
                p.f64_or(&["omega", "w"], 1.0)?,
                p.f64_or(&["F", "coupling"], 1.0)?,
            )?,
            other => {
                return Err(Error::UnknownName {
                    kind: "equation",
                    name: other.to_string(),
                })
            }
        };
        Ok(eq)
    }
}

/// CLI names accepted by [`EquationSpec::from_descriptor`].
pub const EQUATION_NAMES: &[&str] = &[
    "free",
    "cubic-nls",
    "tnls",
    "vnls",
    "current-nls",
    "gauged-nls",
    "extended-nls",
    "dnls2",
    "linear-potential-nls",
    "oscillator-nls",
];

fn variant_name(v: &Variant) -> &'static str {
    match v {
        Variant::FreeLinear => "free",
        Variant::CubicNls { .. } => "cubic-nls",
        Variant::VariableCoeffNls { .. } => "vnls",
        Variant::CurrentNls { .. } => "current-nls",
        Variant::GaugedNls { .. } => "gauged-nls",
        Variant::ExtendedCurrentNls { .. } => "extended-nls",
        Variant::Dnls2 { .. } => "dnls2",
        Variant::LinearPotentialNls { .. } => "linear-potential-nls",
        Variant::OscillatorNls { .. } => "oscillator-nls",
    }
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.sigma.value();
        match self.variant {
            Variant::FreeLinear => write!(f, "free(sigma={s})"),
            Variant::CubicNls { coupling } => write!(f, "cubic-nls(F={coupling},sigma={s})"),
            Variant::VariableCoeffNls { a, b } => write!(f, "vnls(a={a},b={b},sigma={s})"),
            Variant::CurrentNls { kappa } => write!(f, "current-nls(kappa={kappa})"),
            Variant::GaugedNls { kappa } => write!(f, "gauged-nls(kappa={kappa})"),
            Variant::ExtendedCurrentNls { kappa } => write!(f, "extended-nls(kappa={kappa})"),
            Variant::Dnls2 { kappa } => write!(f, "dnls2(kappa={kappa})"),
            Variant::LinearPotentialNls { alpha, coupling } => {
                write!(f, "linear-potential-nls(alpha={alpha},F={coupling})")
            }
            Variant::OscillatorNls { omega, coupling } => {
                write!(f, "oscillator-nls(omega={omega},F={coupling})")
            }
        }
    }
}

/// How space derivatives inside the right-hand side are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeRoute {
    Spectral,
    /// Fourth-order finite differences; edge nodes are meaningless.
    InteriorFd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsOptions {
    /// Two-thirds filter on the non-dispersive part.
    pub dealias: bool,
    pub route: DerivativeRoute,
}

impl Default for RhsOptions {
    fn default() -> Self {
        Self {
            dealias: true,
            route: DerivativeRoute::Spectral,
        }
    }
}

impl RhsOptions {
    /// Undealiased pointwise products, as used by the residual oracles.
    pub fn exact(route: DerivativeRoute) -> Self {
        Self {
            dealias: false,
            route,
        }
    }
}

/// Reusable evaluator of one equation on one grid.
#[derive(Debug, Clone)]
pub struct RhsEvaluator {
    eq: EquationSpec,
    ops: SpectralOps,
    opts: RhsOptions,
    x: Vec<f64>,
}

impl RhsEvaluator {
    pub fn new(eq: EquationSpec, grid: &crate::field::Grid1D, opts: RhsOptions) -> Self {
        Self {
            eq,
            ops: SpectralOps::new(grid),
            opts,
            x: grid.coords(),
        }
    }

    pub fn equation(&self) -> &EquationSpec {
        &self.eq
    }

    pub fn ops(&self) -> &SpectralOps {
        &self.ops
    }

    pub fn options(&self) -> &RhsOptions {
        &self.opts
    }

    fn derivative(&self, psi: &[Complex64], order: u32) -> Result<Vec<Complex64>> {
        match self.opts.route {
            DerivativeRoute::Spectral => self.ops.derivative_values(psi, order),
            DerivativeRoute::InteriorFd => {
                let f = ComplexField::new(*self.ops.grid(), psi.to_vec(), 0.0)?;
                Ok(fd_derivative_interior(&f, order)?.into_values())
            }
        }
    }

    /// Non-dispersive part `V` of `i ψ_t`, unfiltered.
    pub fn potential_term(&self, t: f64, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let rho: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        let out = match self.eq.variant {
            Variant::FreeLinear => vec![Complex64::new(0.0, 0.0); psi.len()],
            Variant::CubicNls { coupling } => cubic(psi, &rho, coupling),
            Variant::VariableCoeffNls { a, b } => {
                let denom = a + b * t;
                if denom.abs() < SINGULAR_COEFFICIENT_TOL {
                    return Err(Error::SingularCoefficient {
                        t,
                        what: format!("a + b t = {denom:e}"),
                    });
                }
                cubic(psi, &rho, 1.0 / denom)
            }
            Variant::CurrentNls { kappa } => {
                let dpsi = self.derivative(psi, 1)?;
                let k2 = kappa * kappa;
                psi.iter()
                    .zip(&dpsi)
                    .map(|(&z, &dz)| z * (-2.0 * k2 * (z.conj() * dz).im))
                    .collect()
            }
            Variant::GaugedNls { kappa } => {
                let dpsi = self.derivative(psi, 1)?;
                let k2 = kappa * kappa;
                psi.iter()
                    .zip(&dpsi)
                    .zip(&rho)
                    .map(|((&z, &dz), &r)| {
                        let w = z.conj() * dz;
                        let a = k2 * r;
                        // ∂x(κ²ρ) = 2κ² Re(ψ* ψ_x)
                        let ax = 2.0 * k2 * w.re;
                        let j_cov = w.im - k2 * r * r;
                        I * 0.5 * ax * z + I * a * dz + z * (0.5 * a * a - k2 * j_cov)
                    })
                    .collect()
            }
            Variant::ExtendedCurrentNls { kappa } => {
                let dpsi = self.derivative(psi, 1)?;
                let k2 = kappa * kappa;
                psi.iter()
                    .zip(&dpsi)
                    .zip(&rho)
                    .map(|((&z, &dz), &r)| z * (-2.0 * k2 * (z.conj() * dz).im - 1.5 * k2 * k2 * r * r))
                    .collect()
            }
            Variant::Dnls2 { kappa } => {
                let dpsi = self.derivative(psi, 1)?;
                let k2 = kappa * kappa;
                dpsi.iter()
                    .zip(&rho)
                    .map(|(&dz, &r)| I * (2.0 * k2 * r) * dz)
                    .collect()
            }
            Variant::LinearPotentialNls { alpha, coupling } => psi
                .iter()
                .zip(&rho)
                .zip(&self.x)
                .map(|((&z, &r), &x)| z * (2.0 * alpha * x - coupling * r))
                .collect(),
            Variant::OscillatorNls { omega, coupling } => {
                let c = (omega * t).cos();
                if c.abs() < SINGULAR_COEFFICIENT_TOL {
                    return Err(Error::SingularCoefficient {
                        t,
                        what: format!("cos(omega t) = {c:e}"),
                    });
                }
                let g = coupling / c;
                psi.iter()
                    .zip(&rho)
                    .zip(&self.x)
                    .map(|((&z, &r), &x)| z * (0.25 * omega * omega * x * x - g * r))
                    .collect()
            }
        };
        Ok(out)
    }

    /// Spectrum of the non-dispersive contribution to `ψ_t` (i.e. `-i V`),
    /// filtered when dealiasing is on.
    pub fn nonlinear_spectrum(&self, t: f64, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let v = self.potential_term(t, psi)?;
        let minus_i_v: Vec<Complex64> = v.into_iter().map(|z| -I * z).collect();
        let mut spec = self.ops.forward(&minus_i_v);
        if self.opts.dealias {
            self.ops.dealias(&mut spec);
        }
        Ok(spec)
    }

    /// `ψ_t` as a field.
    pub fn rhs(&self, t: f64, psi: &ComplexField) -> Result<ComplexField> {
        let values = psi.values();
        let sigma = self.eq.sigma.value();
        let d2 = self.derivative(values, 2)?;
        let mut v = self.potential_term(t, values)?;
        if self.opts.dealias {
            let mut spec = self.ops.forward(&v);
            self.ops.dealias(&mut spec);
            v = self.ops.inverse(spec);
        }
        let out = d2
            .iter()
            .zip(&v)
            .map(|(&dd, &vv)| -I * (-sigma * dd + vv))
            .collect();
        ComplexField::new(*psi.grid(), out, t)
    }
}

fn cubic(psi: &[Complex64], rho: &[f64], coupling: f64) -> Vec<Complex64> {
    psi.iter().zip(rho).map(|(&z, &r)| z * (-coupling * r)).collect()
}

/// `ψ_t = -i · RHS`, spectral derivatives with the two-thirds filter.
pub fn rhs(eq: &EquationSpec, t: f64, psi: &ComplexField) -> Result<ComplexField> {
    rhs_with(eq, t, psi, RhsOptions::default())
}

pub fn rhs_with(eq: &EquationSpec, t: f64, psi: &ComplexField, opts: RhsOptions) -> Result<ComplexField> {
    RhsEvaluator::new(*eq, psi.grid(), opts).rhs(t, psi)
}

/// `j = Im(ψ* ∂x ψ)` with a spectral derivative.
pub fn current(psi: &ComplexField) -> Result<RealField> {
    current_with(psi, &SpectralOps::new(psi.grid()))
}

pub fn current_with(psi: &ComplexField, ops: &SpectralOps) -> Result<RealField> {
    let d = ops.derivative_values(psi.values(), 1)?;
    let j = psi
        .values()
        .iter()
        .zip(&d)
        .map(|(z, dz)| (z.conj() * dz).im)
        .collect();
    RealField::new(*psi.grid(), j, psi.time())
}

/// `(1/2i)[φ*(∂x - iκ²ρ)φ - c.c.]`, evaluated from the covariant derivative.
pub fn covariant_current(phi: &ComplexField, kappa: f64) -> Result<RealField> {
    covariant_current_with(phi, kappa, &SpectralOps::new(phi.grid()))
}

pub fn covariant_current_with(phi: &ComplexField, kappa: f64, ops: &SpectralOps) -> Result<RealField> {
    let d = ops.derivative_values(phi.values(), 1)?;
    let k2 = kappa * kappa;
    let j = phi
        .values()
        .iter()
        .zip(&d)
        .map(|(&z, &dz)| {
            let cov = dz - I * (k2 * z.norm_sqr()) * z;
            (z.conj() * cov).im
        })
        .collect();
    RealField::new(*phi.grid(), j, phi.time())
}
