//! Schrödinger-group maps acting on free, cubic and variable-coefficient NLS
//! solutions.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{pull_field, MappedProfile, PointMap, SolutionMap, MAP_MARGIN};
use crate::equations::{EquationSpec, Kinetic, Variant};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::solutions::{ClosedFormSolution, TimeDomain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum ConformalMapSpec {
    Dilatation { delta: f64 },
    Expansion { kappa: f64 },
    TimeTranslation { epsilon: f64 },
    /// `(t, x) ↦ (-1/t, -x/t)`.
    Lens,
    /// Applied first to last.
    Composite { steps: Vec<ConformalMapSpec> },
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

impl ConformalMapSpec {
    pub fn dilatation(delta: f64) -> Result<Self> {
        finite("delta", delta)?;
        if delta == 0.0 {
            return Err(Error::InvalidParameter("dilatation factor must be non-zero".into()));
        }
        Ok(Self::Dilatation { delta })
    }

    pub fn expansion(kappa: f64) -> Result<Self> {
        finite("kappa", kappa)?;
        Ok(Self::Expansion { kappa })
    }

    pub fn time_translation(epsilon: f64) -> Result<Self> {
        finite("epsilon", epsilon)?;
        Ok(Self::TimeTranslation { epsilon })
    }

    pub fn composite(steps: Vec<ConformalMapSpec>) -> Self {
        Self::Composite { steps }
    }

    fn primitives(&self) -> Vec<Prim> {
        match self {
            Self::Dilatation { delta } => vec![Prim::Dilate(*delta)],
            Self::Expansion { kappa } => vec![Prim::Expand(*kappa)],
            Self::TimeTranslation { epsilon } => vec![Prim::Shift(*epsilon)],
            Self::Lens => vec![Prim::Lens],
            Self::Composite { steps } => steps.iter().flat_map(|s| s.primitives()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Prim {
    Dilate(f64),
    Expand(f64),
    Shift(f64),
    Lens,
}

/// Cubic coupling `F(t) = 1/(a + b t)`, or none.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Law {
    Free,
    Inverse { a: f64, b: f64 },
}

impl Law {
    fn of(eq: &EquationSpec, map: &str) -> Result<Self> {
        match *eq.variant() {
            Variant::FreeLinear | Variant::CubicNls { coupling: 0.0 } => Ok(Law::Free),
            Variant::CubicNls { coupling } => Ok(Law::Inverse { a: 1.0 / coupling, b: 0.0 }),
            Variant::VariableCoeffNls { a, b } => Ok(Law::Inverse { a, b }),
            _ => Err(Error::IncompatibleSource {
                map: map.into(),
                detail: format!("{eq} is not a free, cubic or variable-coefficient NLS"),
            }),
        }
    }

    fn equation(self, sigma: Kinetic) -> Result<EquationSpec> {
        match self {
            Law::Free => Ok(EquationSpec::free(sigma)),
            Law::Inverse { a, b } if b == 0.0 => EquationSpec::cubic(1.0 / a, sigma),
            // `+ 0.0` clears negative zeros.
            Law::Inverse { a, b } => EquationSpec::new(Variant::VariableCoeffNls { a: a + 0.0, b: b + 0.0 }, sigma),
        }
    }
}

/// A time strictly inside the window.
fn interior_point(w: &TimeDomain) -> f64 {
    match (w.start.is_finite(), w.end.is_finite()) {
        (true, true) => 0.5 * (w.start + w.end),
        (true, false) => w.start + 1.0,
        (false, true) => w.end - 1.0,
        (false, false) => 0.0,
    }
}

impl Prim {
    fn descriptor(&self) -> String {
        match self {
            Prim::Dilate(d) => format!("dilate:d={d}"),
            Prim::Expand(k) => format!("expand:k={k}"),
            Prim::Shift(e) => format!("shift:e={e}"),
            Prim::Lens => "D".into(),
        }
    }

    /// Pole of the time map, if any.
    fn pole(&self) -> Option<f64> {
        match *self {
            Prim::Expand(k) if k != 0.0 => Some(1.0 / k),
            Prim::Lens => Some(0.0),
            _ => None,
        }
    }

    /// Increasing time map with the one-sided limits at its pole.
    fn time_limit(&self, t: f64, from_above: bool) -> f64 {
        if self.pole() == Some(t) {
            return if from_above { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        match *self {
            Prim::Dilate(d) => d * d * t,
            Prim::Shift(e) => t + e,
            Prim::Expand(k) if k == 0.0 => t,
            Prim::Expand(k) if t.is_infinite() => -1.0 / k,
            Prim::Expand(k) => t / (1.0 - k * t),
            Prim::Lens if t.is_infinite() => 0.0,
            Prim::Lens => -1.0 / t,
        }
    }

    fn source_window(&self, target: TimeDomain) -> Result<TimeDomain> {
        if let Some(p) = self.pole() {
            if target.contains(p) {
                return Err(Error::SingularMapPoint {
                    t: p,
                    what: format!("{} is singular inside the target window {target}", self.descriptor()),
                });
            }
        }
        TimeDomain::new(self.time_limit(target.start, true), self.time_limit(target.end, false))
    }

    fn transport(&self, law: Law, window: &TimeDomain) -> Law {
        let Law::Inverse { a, b } = law else {
            return Law::Free;
        };
        let t = interior_point(window);
        let (a, b) = match *self {
            Prim::Shift(e) => (a + b * e, b),
            Prim::Dilate(d) => {
                let d3 = d.abs().powi(3);
                (a / d3, b * d * d / d3)
            }
            Prim::Expand(k) => {
                let sg = (1.0 - k * t).signum();
                (sg * a, sg * (b - a * k))
            }
            Prim::Lens => {
                let sg = t.signum();
                (-sg * b, sg * a)
            }
        };
        Law::Inverse { a, b }
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    prim: Prim,
    sigma: f64,
}

impl PointMap for Step {
    fn check(&self, t: f64) -> Result<()> {
        let s = match self.prim {
            Prim::Expand(k) => 1.0 - k * t,
            Prim::Lens => t,
            _ => return Ok(()),
        };
        if s.abs() < MAP_MARGIN {
            return Err(Error::SingularMapPoint {
                t,
                what: format!("{} at its pole", self.prim.descriptor()),
            });
        }
        Ok(())
    }

    fn pull(&self, t: f64, x: f64) -> (Complex64, f64, f64) {
        let one = Complex64::new(1.0, 0.0);
        match self.prim {
            Prim::Dilate(d) => (one / d.abs().sqrt(), d * d * t, d * x),
            Prim::Shift(e) => (one, t + e, x),
            Prim::Expand(k) => {
                let s = 1.0 - k * t;
                let phase = -k * x * x / (4.0 * self.sigma * s);
                (Complex64::new(0.0, phase).exp() / s.abs().sqrt(), t / s, x / s)
            }
            Prim::Lens => {
                let phase = x * x / (4.0 * self.sigma * t);
                (Complex64::new(0.0, phase).exp() / t.abs().sqrt(), -1.0 / t, -x / t)
            }
        }
    }

    fn target_time(&self, source_t: f64) -> Result<f64> {
        let t = match self.prim {
            Prim::Dilate(d) => source_t / (d * d),
            Prim::Shift(e) => source_t - e,
            Prim::Expand(k) => {
                let den = 1.0 + k * source_t;
                if den == 0.0 {
                    return Err(Error::SingularMapPoint {
                        t: source_t,
                        what: "source time is the image of infinity".into(),
                    });
                }
                source_t / den
            }
            Prim::Lens => {
                if source_t == 0.0 {
                    return Err(Error::SingularMapPoint {
                        t: source_t,
                        what: "source time is the image of infinity".into(),
                    });
                }
                -1.0 / source_t
            }
        };
        Ok(t)
    }
}

/// Applies `map` and restricts the result to `target`.
///
/// The source must be defined on the whole image of `target`.
pub fn apply_conformal(
    map: &ConformalMapSpec,
    sol: &ClosedFormSolution,
    target: TimeDomain,
) -> Result<ClosedFormSolution> {
    let prims = map.primitives();
    let label = map.descriptor_string();
    let mut law = Law::of(sol.solves(), &label)?;

    let mut windows = vec![target; prims.len()];
    let mut w = target;
    for (i, p) in prims.iter().enumerate().rev() {
        windows[i] = w;
        w = p.source_window(w)?;
    }
    let src = sol.domain();
    if w.start < src.start || w.end > src.end {
        return Err(Error::IncompatibleSource {
            map: label,
            detail: format!("{} is defined on {src}, the map needs {w}", sol.name()),
        });
    }
    for (p, window) in prims.iter().zip(&windows) {
        law = p.transport(law, window);
    }
    let sigma = sol.solves().sigma();
    let solves = law.equation(sigma)?;
    let steps: Vec<Arc<dyn PointMap>> = prims
        .iter()
        .map(|&prim| Arc::new(Step { prim, sigma: sigma.value() }) as Arc<dyn PointMap>)
        .collect();
    let profile = MappedProfile {
        inner: sol.profile().clone(),
        steps,
    };
    let out = ClosedFormSolution::new(format!("{label}[{}]", sol.name()), solves, target, Arc::new(profile));
    Ok(if sol.has_gauge_seam() { out.mark_gauge_seam() } else { out })
}

impl ConformalMapSpec {
    fn descriptor_string(&self) -> String {
        let prims = self.primitives();
        if prims.is_empty() {
            return "identity".into();
        }
        prims.iter().map(Prim::descriptor).collect::<Vec<_>>().join("+")
    }
}

impl SolutionMap for ConformalMapSpec {
    fn descriptor(&self) -> String {
        self.descriptor_string()
    }

    fn source_window(&self, target: TimeDomain) -> Result<TimeDomain> {
        self.primitives()
            .iter()
            .rev()
            .try_fold(target, |w, p| p.source_window(w))
    }

    fn apply(&self, sol: &ClosedFormSolution, target: TimeDomain) -> Result<ClosedFormSolution> {
        apply_conformal(self, sol, target)
    }

    fn apply_field(&self, field: &ComplexField, source: &EquationSpec) -> Result<(ComplexField, EquationSpec)> {
        let label = self.descriptor_string();
        let mut law = Law::of(source, &label)?;
        let prims = self.primitives();
        let sigma = source.sigma();
        let steps: Vec<Arc<dyn PointMap>> = prims
            .iter()
            .map(|&prim| Arc::new(Step { prim, sigma: sigma.value() }) as Arc<dyn PointMap>)
            .collect();
        let mapped = pull_field(&steps, field)?;
        // Branch signs from the times actually visited.
        let mut t = field.time();
        for (p, step) in prims.iter().zip(&steps) {
            t = step.target_time(t)?;
            let eps = 1e-9 * (1.0 + t.abs());
            law = p.transport(law, &TimeDomain::new(t - eps, t + eps)?);
        }
        Ok((mapped, law.equation(sigma)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid1D;
    use crate::solutions::{bright_soliton, gaussian_free_packet, standing_soliton, time_dependent_soliton};

    fn close(a: &ClosedFormSolution, b: &ClosedFormSolution, times: &[f64]) -> f64 {
        let mut err: f64 = 0.0;
        for &t in times {
            for i in -20..=20 {
                let x = 0.37 * i as f64;
                err = err.max((a.eval(t, x).unwrap() - b.eval(t, x).unwrap()).norm());
            }
        }
        err
    }

    #[test]
    fn identity_parameters() {
        let s = standing_soliton(0.3).unwrap();
        let all = TimeDomain::all();
        for m in [
            ConformalMapSpec::dilatation(1.0).unwrap(),
            ConformalMapSpec::expansion(0.0).unwrap(),
            ConformalMapSpec::time_translation(0.0).unwrap(),
        ] {
            let out = apply_conformal(&m, &s, all).unwrap();
            assert_eq!(out.solves(), s.solves());
            assert!(close(&out, &s, &[-1.0, 0.5, 2.0]) == 0.0);
        }
    }

    #[test]
    fn lens_of_standing_is_the_time_dependent_soliton() {
        let s = standing_soliton(0.0).unwrap();
        let d = apply_conformal(&ConformalMapSpec::Lens, &s, TimeDomain::positive()).unwrap();
        assert_eq!(*d.solves(), EquationSpec::variable_coeff(0.0, 1.0).unwrap());
        let lens = time_dependent_soliton(0.0).unwrap();
        assert!(close(&d, &lens, &[0.5, 1.0, 3.0]) < 1e-14);
    }

    #[test]
    fn shift_expand_shift_equals_lens() {
        let s = standing_soliton(0.4).unwrap();
        let comp = ConformalMapSpec::composite(vec![
            ConformalMapSpec::time_translation(1.0).unwrap(),
            ConformalMapSpec::expansion(1.0).unwrap(),
            ConformalMapSpec::time_translation(1.0).unwrap(),
        ]);
        let a = apply_conformal(&comp, &s, TimeDomain::positive()).unwrap();
        let b = apply_conformal(&ConformalMapSpec::Lens, &s, TimeDomain::positive()).unwrap();
        assert_eq!(a.solves(), b.solves());
        assert!(close(&a, &b, &[0.3, 1.0, 2.5]) < 1e-13);
    }

    #[test]
    fn singular_window_and_points() {
        let s = standing_soliton(0.0).unwrap();
        let e = ConformalMapSpec::expansion(1.0).unwrap();
        assert!(matches!(
            apply_conformal(&e, &s, TimeDomain::positive()),
            Err(Error::SingularMapPoint { .. })
        ));
        let near = apply_conformal(&e, &s, TimeDomain::new(0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(near.eval(1.0 - 1e-8, 0.0), Err(Error::SingularMapPoint { .. })));
        assert!(near.eval(0.5, 0.0).is_ok());
    }

    #[test]
    fn source_domain_must_cover_the_image() {
        let lens = time_dependent_soliton(0.0).unwrap();
        let shift = ConformalMapSpec::time_translation(-2.0).unwrap();
        assert!(matches!(
            apply_conformal(&shift, &lens, TimeDomain::positive()),
            Err(Error::IncompatibleSource { .. })
        ));
        let ok = apply_conformal(&shift, &lens, TimeDomain::new(2.0, f64::INFINITY).unwrap()).unwrap();
        assert_eq!(*ok.solves(), EquationSpec::variable_coeff(-2.0, 1.0).unwrap());
    }

    #[test]
    fn coupling_transport_under_dilatation() {
        let b = bright_soliton(Kinetic::One, 2.0, 0.0).unwrap();
        let d = apply_conformal(&ConformalMapSpec::dilatation(2.0).unwrap(), &b, TimeDomain::all()).unwrap();
        assert_eq!(*d.solves(), EquationSpec::cubic(16.0, Kinetic::One).unwrap());
        let g = gaussian_free_packet(Kinetic::Half);
        let e = apply_conformal(&ConformalMapSpec::expansion(0.5).unwrap(), &g, TimeDomain::new(-1.0, 1.0).unwrap())
            .unwrap();
        assert_eq!(*e.solves(), EquationSpec::free(Kinetic::Half));
    }

    #[test]
    fn rejects_derivative_equations() {
        let c = crate::solutions::chiral_soliton(crate::solutions::SolitonParams::new(2.0, 1.0, 1.0).unwrap())
            .unwrap();
        assert!(matches!(
            apply_conformal(&ConformalMapSpec::Lens, &c, TimeDomain::positive()),
            Err(Error::IncompatibleSource { .. })
        ));
    }

    #[test]
    fn field_route_matches_solution_route() {
        let g = Grid1D::new(40.0, 1024).unwrap();
        let s = standing_soliton(0.0).unwrap();
        let map = ConformalMapSpec::dilatation(1.5).unwrap();
        let src = s.sample(1.8, &g).unwrap();
        let (field, eq) = map.apply_field(&src, s.solves()).unwrap();
        assert!((field.time() - 0.8).abs() < 1e-15);
        let exact = apply_conformal(&map, &s, TimeDomain::all()).unwrap();
        assert_eq!(eq, *exact.solves());
        assert!(field.max_abs_diff(&exact.sample(0.8, &g).unwrap(), 0) < 1e-10);
    }
}
