//! Frame changes that add a linear or harmonic potential (`σ = 1` only).

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{pull_field, MappedProfile, PointMap, SolutionMap, MAP_MARGIN};
use crate::equations::{EquationSpec, Kinetic, Variant};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::solutions::{ClosedFormSolution, TimeDomain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum FrameMap {
    /// `ψ = e^{-i(2αxt + 4α²t³/3)} Ψ(t, x + 2αt²)`.
    Accelerated { alpha: f64 },
    /// `ψ = (cos ωt)^{-1/2} e^{-iωx² tan(ωt)/4} Ψ(tan(ωt)/ω, x/cos ωt)`.
    Niederer { omega: f64 },
}

impl FrameMap {
    pub fn accelerated(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self::Accelerated { alpha })
    }

    pub fn niederer(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega must be finite, got {omega}")));
        }
        Ok(Self::Niederer { omega })
    }

    fn label(&self) -> String {
        match self {
            Self::Accelerated { alpha } => format!("accel:a={alpha}"),
            Self::Niederer { omega } => format!("niederer:w={omega}"),
        }
    }

    /// Cubic coupling of a `σ = 1` free or cubic source.
    fn source_coupling(&self, eq: &EquationSpec) -> Result<f64> {
        if eq.sigma() != Kinetic::One {
            return Err(Error::IncompatibleSource {
                map: self.label(),
                detail: format!("{eq} uses kinetic coefficient 1/2; frame maps need 1"),
            });
        }
        match *eq.variant() {
            Variant::FreeLinear => Ok(0.0),
            Variant::CubicNls { coupling } => Ok(coupling),
            _ => Err(Error::IncompatibleSource {
                map: self.label(),
                detail: format!("{eq} is not a free or cubic NLS"),
            }),
        }
    }

    pub fn target_equation(&self, source: &EquationSpec) -> Result<EquationSpec> {
        let f = self.source_coupling(source)?;
        match *self {
            Self::Accelerated { alpha } => EquationSpec::linear_potential(alpha, f),
            Self::Niederer { omega } => EquationSpec::oscillator(omega, f),
        }
    }

    /// Times where the map is regular.
    fn regular_window(&self) -> TimeDomain {
        match *self {
            Self::Niederer { omega } if omega != 0.0 => {
                let h = FRAC_PI_2 / omega.abs();
                TimeDomain { start: -h, end: h }
            }
            _ => TimeDomain::all(),
        }
    }

    fn time_limit(&self, t: f64) -> f64 {
        match *self {
            Self::Niederer { omega } if omega != 0.0 => {
                let h = FRAC_PI_2 / omega.abs();
                if t >= h {
                    f64::INFINITY
                } else if t <= -h {
                    f64::NEG_INFINITY
                } else {
                    (omega * t).tan() / omega
                }
            }
            _ => t,
        }
    }
}

impl PointMap for FrameMap {
    fn check(&self, t: f64) -> Result<()> {
        if let Self::Niederer { omega } = *self {
            if (omega * t).abs() >= FRAC_PI_2 - MAP_MARGIN {
                return Err(Error::SingularMapPoint {
                    t,
                    what: format!("|wt| reaches pi/2 for w = {omega}"),
                });
            }
        }
        Ok(())
    }

    fn pull(&self, t: f64, x: f64) -> (Complex64, f64, f64) {
        match *self {
            Self::Accelerated { alpha } => {
                let phase = -(2.0 * alpha * x * t + 4.0 / 3.0 * alpha * alpha * t.powi(3));
                (Complex64::new(0.0, phase).exp(), t, x + 2.0 * alpha * t * t)
            }
            Self::Niederer { omega } if omega == 0.0 => (Complex64::new(1.0, 0.0), t, x),
            Self::Niederer { omega } => {
                let (s, c) = (omega * t).sin_cos();
                let tan = s / c;
                let phase = -0.25 * omega * x * x * tan;
                (Complex64::new(0.0, phase).exp() / c.sqrt(), tan / omega, x / c)
            }
        }
    }

    fn target_time(&self, source_t: f64) -> Result<f64> {
        Ok(match *self {
            Self::Niederer { omega } if omega != 0.0 => (omega * source_t).atan() / omega,
            _ => source_t,
        })
    }
}

impl SolutionMap for FrameMap {
    fn descriptor(&self) -> String {
        self.label()
    }

    fn source_window(&self, target: TimeDomain) -> Result<TimeDomain> {
        let w = target.intersect(&self.regular_window())?;
        TimeDomain::new(self.time_limit(w.start), self.time_limit(w.end))
    }

    fn apply(&self, sol: &ClosedFormSolution, target: TimeDomain) -> Result<ClosedFormSolution> {
        let solves = self.target_equation(sol.solves())?;
        let window = target.intersect(&self.regular_window())?;
        let needed = self.source_window(window)?;
        let src = sol.domain();
        if needed.start < src.start || needed.end > src.end {
            return Err(Error::IncompatibleSource {
                map: self.label(),
                detail: format!("{} is defined on {src}, the map needs {needed}", sol.name()),
            });
        }
        let profile = MappedProfile {
            inner: sol.profile().clone(),
            steps: vec![Arc::new(*self) as Arc<dyn PointMap>],
        };
        Ok(ClosedFormSolution::new(
            format!("{}[{}]", self.label(), sol.name()),
            solves,
            window,
            Arc::new(profile),
        ))
    }

    fn apply_field(&self, field: &ComplexField, source: &EquationSpec) -> Result<(ComplexField, EquationSpec)> {
        let eq = self.target_equation(source)?;
        let mapped = pull_field(&[Arc::new(*self) as Arc<dyn PointMap>], field)?;
        Ok((mapped, eq))
    }
}

/// Maps a `σ = 1` free or cubic solution into the frame with potential `2αx`.
pub fn apply_accelerated_frame(sol: &ClosedFormSolution, alpha: f64) -> Result<ClosedFormSolution> {
    FrameMap::accelerated(alpha)?.apply(sol, *sol.domain())
}

/// Maps a `σ = 1` free or cubic solution into the harmonic trap `ω²x²/4`,
/// restricted to `|ωt| < π/2`.
pub fn apply_niederer(sol: &ClosedFormSolution, omega: f64) -> Result<ClosedFormSolution> {
    let map = FrameMap::niederer(omega)?;
    let window = map.regular_window().intersect(sol.domain())?;
    map.apply(sol, window)
}
