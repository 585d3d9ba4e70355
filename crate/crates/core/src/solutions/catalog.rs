use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ClosedFormSolution, TimeDomain};
use crate::equations::{EquationSpec, Kinetic};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Parameters of the chiral travelling soliton.
///
/// `alpha` is stored alongside `(v, omega)` and re-checked against
/// `alpha² = v² - 2 omega` by [`SolitonParams::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub v: f64,
    pub omega: f64,
    pub alpha: f64,
    pub x0: f64,
    pub kappa: f64,
    /// Overall sign, `+1` or `-1`.
    pub sign: f64,
}

impl SolitonParams {
    pub fn new(v: f64, omega: f64, kappa: f64) -> Result<Self> {
        check_chiral(v, omega, kappa)?;
        let p = Self {
            v,
            omega,
            alpha: (v * v - 2.0 * omega).sqrt(),
            x0: 0.0,
            kappa,
            sign: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.sign = if negative { -1.0 } else { 1.0 };
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_chiral(self.v, self.omega, self.kappa)?;
        let width2 = self.v * self.v - 2.0 * self.omega;
        if !(self.alpha > 0.0) || (self.alpha * self.alpha - width2).abs() > 1e-12 * width2.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} does not match sqrt(v^2 - 2w) = {}",
                self.alpha,
                width2.sqrt()
            )));
        }
        if self.sign != 1.0 && self.sign != -1.0 {
            return Err(Error::InvalidParameter(format!("sign must be +1 or -1, got {}", self.sign)));
        }
        if !self.x0.is_finite() {
            return Err(Error::InvalidParameter("x0 must be finite".into()));
        }
        Ok(())
    }

    /// Effective cubic coupling `2κ²v` seen by the profile.
    pub fn coupling(&self) -> f64 {
        2.0 * self.kappa * self.kappa * self.v
    }

    pub fn amplitude(&self) -> f64 {
        self.alpha * (1.0 / self.coupling()).sqrt()
    }
}

fn check_chiral(v: f64, omega: f64, kappa: f64) -> Result<()> {
    if !(v.is_finite() && omega.is_finite() && kappa.is_finite()) {
        return Err(Error::InvalidParameter("soliton parameters must be finite".into()));
    }
    if v <= 0.0 {
        return Err(Error::ChiralityViolation(v));
    }
    let width2 = v * v - 2.0 * omega;
    if width2 <= 0.0 {
        return Err(Error::WidthViolation(width2));
    }
    if kappa == 0.0 {
        return Err(Error::InvalidParameter("kappa must be non-zero".into()));
    }
    Ok(())
}

/// `± e^{i(vx - ωt)} sqrt(1/(2κ²v)) α / cosh(α(x - vt - x0))`, solving the
/// current-coupled NLS.
pub fn chiral_soliton(p: SolitonParams) -> Result<ClosedFormSolution> {
    p.validate()?;
    let eq = EquationSpec::current(p.kappa)?;
    let amp = p.sign * p.amplitude();
    Ok(ClosedFormSolution::from_fn(
        format!("chiral(v={},w={},kappa={})", p.v, p.omega, p.kappa),
        eq,
        TimeDomain::all(),
        move |t, x| (I * (p.v * x - p.omega * t)).exp() * (amp * sech(p.alpha * (x - p.v * t - p.x0))),
    ))
}

/// `e^{it/2} / cosh(x - x0)`, solving the cubic NLS with `F = 1`, `σ = ½`.
pub fn standing_soliton(x0: f64) -> Result<ClosedFormSolution> {
    if !x0.is_finite() {
        return Err(Error::InvalidParameter("x0 must be finite".into()));
    }
    Ok(ClosedFormSolution::from_fn(
        format!("standing(x0={x0})"),
        EquationSpec::cubic(1.0, Kinetic::Half)?,
        TimeDomain::all(),
        move |t, x| (I * (0.5 * t)).exp() * sech(x - x0),
    ))
}

/// `sqrt(2σ/F) e^{iσt} / cosh(x - x0)`, the standing soliton of
/// `i ψ_t + σ ψ_xx + F |ψ|² ψ = 0` for either kinetic convention.
pub fn bright_soliton(sigma: Kinetic, coupling: f64, x0: f64) -> Result<ClosedFormSolution> {
    if !(coupling > 0.0 && coupling.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bright soliton needs a focusing coupling F > 0, got {coupling}"
        )));
    }
    if !x0.is_finite() {
        return Err(Error::InvalidParameter("x0 must be finite".into()));
    }
    let s = sigma.value();
    let amp = (2.0 * s / coupling).sqrt();
    Ok(ClosedFormSolution::from_fn(
        format!("bright(sigma={s},F={coupling},x0={x0})"),
        EquationSpec::cubic(coupling, sigma)?,
        TimeDomain::all(),
        move |t, x| (I * (s * t)).exp() * (amp * sech(x - x0)),
    ))
}

/// `t^{-1/2} exp[i(x²/2t - 1/2t)] / cosh(-x/t - x0)` for `t > 0`, solving
/// `i ψ_t + ½ ψ_xx + |ψ|² ψ / t = 0`.
///
/// The `x²/2t` chirp is the lens phase `x²/(4σt)` at `σ = ½`.
pub fn time_dependent_soliton(x0: f64) -> Result<ClosedFormSolution> {
    if !x0.is_finite() {
        return Err(Error::InvalidParameter("x0 must be finite".into()));
    }
    Ok(ClosedFormSolution::from_fn(
        format!("lens(x0={x0})"),
        EquationSpec::variable_coeff(0.0, 1.0)?,
        TimeDomain::positive(),
        move |t, x| {
            let phase = x * x / (2.0 * t) - 1.0 / (2.0 * t);
            (I * phase).exp() * (sech(-x / t - x0) / t.sqrt())
        },
    ))
}

/// `sqrt(ρ) e^{ivx/2}` with
/// `ρ = (|v|/2κ²) / (√2 cosh[v(x - vt/2)] + sign v)`, solving the
/// current-coupled NLS with the quintic term.
pub fn extended_soliton(v: f64, kappa: f64) -> Result<ClosedFormSolution> {
    if !(v.is_finite() && kappa.is_finite()) {
        return Err(Error::InvalidParameter("parameters must be finite".into()));
    }
    if v == 0.0 {
        return Err(Error::DegenerateVelocity);
    }
    let eq = EquationSpec::extended_current(kappa)?;
    let scale = v.abs() / (2.0 * kappa * kappa);
    let s = v.signum();
    Ok(ClosedFormSolution::from_fn(
        format!("extended(v={v},kappa={kappa})"),
        eq,
        TimeDomain::all(),
        move |t, x| {
            let rho = scale / (std::f64::consts::SQRT_2 * (v * (x - 0.5 * v * t)).cosh() + s);
            (I * (0.5 * v * x)).exp() * rho.sqrt()
        },
    ))
}

/// `(1 + 4iσt)^{-1/2} exp(-x²/(1 + 4iσt))`, spreading Gaussian of the free
/// equation `i ψ_t + σ ψ_xx = 0`.
pub fn gaussian_free_packet(sigma: Kinetic) -> ClosedFormSolution {
    let s = sigma.value();
    ClosedFormSolution::from_fn(
        format!("gaussian(sigma={s})"),
        EquationSpec::free(sigma),
        TimeDomain::all(),
        move |t, x| {
            let g = Complex64::new(1.0, 4.0 * s * t);
            (-(x * x) / g).exp() / g.sqrt()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid1D;

    fn mass(f: &crate::field::ComplexField) -> f64 {
        f.density().sum() * f.grid().dx()
    }

    #[test]
    fn chiral_peak_value() {
        let s = chiral_soliton(SolitonParams::new(2.0, 1.0, 1.0).unwrap()).unwrap();
        for t in [0.0, 1.3] {
            let peak = s.eval(t, 2.0 * t).unwrap().norm();
            assert!((peak - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        let p = SolitonParams::new(2.0, 1.0, 1.0).unwrap();
        assert!((p.alpha - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.coupling(), 4.0);
    }

    #[test]
    fn chirality_and_width_violations() {
        assert_eq!(SolitonParams::new(-1.0, 0.0, 1.0), Err(Error::ChiralityViolation(-1.0)));
        assert_eq!(SolitonParams::new(0.0, -1.0, 1.0), Err(Error::ChiralityViolation(0.0)));
        assert!(matches!(SolitonParams::new(1.0, 0.5, 1.0), Err(Error::WidthViolation(_))));
        assert!(SolitonParams::new(1.0, 0.0, 0.0).is_err());
        let mut p = SolitonParams::new(2.0, 1.0, 1.0).unwrap();
        p.alpha = 1.0;
        assert!(chiral_soliton(p).is_err());
    }

    #[test]
    fn chiral_sign_and_translation() {
        let p = SolitonParams::new(2.0, 1.0, 1.0).unwrap();
        let plus = chiral_soliton(p).unwrap();
        let minus = chiral_soliton(p.with_sign(true)).unwrap();
        let shifted = chiral_soliton(p.with_x0(3.0)).unwrap();
        for &(t, x) in &[(0.0, 0.1), (0.7, 1.9), (3.1, 5.0)] {
            assert_eq!(plus.eval(t, x).unwrap(), -minus.eval(t, x).unwrap());
            let moved = plus.eval(0.0, x - 2.0 * t).unwrap().norm();
            assert!((plus.eval(t, x).unwrap().norm() - moved).abs() < 1e-14);
            assert!((shifted.eval(t, x + 3.0).unwrap().norm() - plus.eval(t, x).unwrap().norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn standing_values() {
        let s = standing_soliton(0.0).unwrap();
        assert_eq!(s.eval(0.0, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        for t in [0.0, 1.0, 5.0] {
            for x in [-2.0, 0.3, 4.0] {
                assert!((s.eval(t, x).unwrap().norm() - sech(x)).abs() < 1e-15);
            }
        }
        let g = Grid1D::default();
        assert!((mass(&s.sample(0.0, &g).unwrap()) - 2.0).abs() <= 1e-10);
    }

    #[test]
    fn time_dependent_values() {
        let s = time_dependent_soliton(0.0).unwrap();
        let z = s.eval(1.0, 0.0).unwrap();
        assert!((z - Complex64::new(0.0, -0.5).exp()).norm() < 1e-15);
        assert!(matches!(s.eval(0.0, 1.0), Err(Error::InvalidTime { .. })));
        assert!(matches!(s.eval(-1.0, 1.0), Err(Error::InvalidTime { .. })));
        let g = Grid1D::default();
        let m1 = mass(&s.sample(1.0, &g).unwrap());
        let m2 = mass(&s.sample(2.0, &g).unwrap());
        assert!((m1 - m2).abs() <= 1e-8, "{m1} vs {m2}");
    }

    #[test]
    fn extended_peak_and_degenerate() {
        let s = extended_soliton(2.0, 1.0).unwrap();
        for t in [0.0, 0.8] {
            let rho = s.eval(t, t).unwrap().norm_sqr();
            assert!((rho - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        }
        assert_eq!(extended_soliton(0.0, 1.0).unwrap_err(), Error::DegenerateVelocity);
        assert!(extended_soliton(1.0, 0.0).is_err());
        let back = extended_soliton(-2.0, 1.0).unwrap();
        assert!(back.eval(0.0, 0.0).unwrap().norm_sqr() > 0.0);
    }

    #[test]
    fn gaussian_initial_profile_and_mass() {
        let g = Grid1D::default();
        for sigma in [Kinetic::Half, Kinetic::One] {
            let s = gaussian_free_packet(sigma);
            for x in [-1.0, 0.0, 2.0] {
                let z = s.eval(0.0, x).unwrap();
                assert!((z.re - (-x * x).exp()).abs() < 1e-15 && z.im.abs() < 1e-15);
            }
            let m0 = mass(&s.sample(0.0, &g).unwrap());
            let m1 = mass(&s.sample(1.0, &g).unwrap());
            assert!((m0 - m1).abs() <= 1e-10);
        }
    }

    #[test]
    fn bright_soliton_requires_focusing() {
        assert!(bright_soliton(Kinetic::One, 0.0, 0.0).is_err());
        let b = bright_soliton(Kinetic::One, 2.0, 0.0).unwrap();
        assert!((b.eval(0.0, 0.0).unwrap().norm() - 1.0).abs() < 1e-15);
    }
}
