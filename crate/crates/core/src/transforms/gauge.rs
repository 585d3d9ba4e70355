//! Non-local gauge map `ψ = exp[-iκ² ∫_{-L}^x ρ] φ` and its inverse.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SolutionMap;
use crate::equations::{EquationSpec, Variant};
use crate::error::{Error, Result};
use crate::field::{cumulative_integral, ComplexField, Grid1D, DEFAULT_DECAY_GATE, DEFAULT_HALF_LENGTH};
use crate::solutions::{ClosedFormSolution, Profile, TimeDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeDirection {
    /// `φ → ψ = e^{-iκ²∫ρ} φ`.
    Forward,
    /// `ψ → φ = e^{+iκ²∫ρ} ψ`.
    Backward,
}

impl GaugeDirection {
    fn sign(self) -> f64 {
        match self {
            GaugeDirection::Forward => -1.0,
            GaugeDirection::Backward => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeTransform {
    pub kappa: f64,
    pub direction: GaugeDirection,
    /// Lower limit of the density integral (the left grid edge).
    pub reference_point: f64,
    /// Edge tolerance on `ρ` for sampled fields.
    pub decay_gate: f64,
}

impl GaugeTransform {
    pub fn new(kappa: f64, direction: GaugeDirection) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be finite, got {kappa}")));
        }
        Ok(Self {
            kappa,
            direction,
            reference_point: -DEFAULT_HALF_LENGTH,
            decay_gate: DEFAULT_DECAY_GATE,
        })
    }

    pub fn forward(kappa: f64) -> Result<Self> {
        Self::new(kappa, GaugeDirection::Forward)
    }

    pub fn backward(kappa: f64) -> Result<Self> {
        Self::new(kappa, GaugeDirection::Backward)
    }

    /// Uses `-L` of `grid` as the reference point.
    pub fn on_grid(mut self, grid: &Grid1D) -> Self {
        self.reference_point = -grid.half_length();
        self
    }

    pub fn inverse(&self) -> Self {
        let direction = match self.direction {
            GaugeDirection::Forward => GaugeDirection::Backward,
            GaugeDirection::Backward => GaugeDirection::Forward,
        };
        Self { direction, ..*self }
    }

    fn phase_rate(&self) -> f64 {
        self.direction.sign() * self.kappa * self.kappa
    }

    /// Applies the map to a sampled field (reference point = left grid edge).
    pub fn apply_to_field(&self, field: &ComplexField) -> Result<ComplexField> {
        if self.kappa == 0.0 {
            return Ok(field.clone());
        }
        let rho = field.density();
        let edge = rho.edge_magnitude();
        if edge >= self.decay_gate {
            return Err(Error::BoundaryLeak {
                value: edge,
                gate: self.decay_gate,
            });
        }
        let p = cumulative_integral(&rho)?;
        let rate = self.phase_rate();
        let values = field
            .values()
            .iter()
            .zip(p.values())
            .map(|(&z, &pk)| z * Complex64::new(0.0, rate * pk).exp())
            .collect();
        ComplexField::new(*field.grid(), values, field.time())
    }

    /// Equation reached from `source`, if this map relates them.
    pub fn target_equation(&self, source: &EquationSpec) -> Result<EquationSpec> {
        if self.kappa == 0.0 {
            return Ok(*source);
        }
        let k = self.kappa;
        let mismatch = |have: f64| Error::IncompatibleSource {
            map: self.descriptor(),
            detail: format!("source has kappa = {have}, map has kappa = {k}"),
        };
        let same = |have: f64| have * have == k * k;
        use GaugeDirection::*;
        match (self.direction, *source.variant()) {
            (Forward, Variant::GaugedNls { kappa }) if same(kappa) => EquationSpec::current(kappa),
            (Forward, Variant::Dnls2 { kappa }) if same(kappa) => EquationSpec::extended_current(kappa),
            (Backward, Variant::CurrentNls { kappa }) if same(kappa) => EquationSpec::gauged(kappa),
            (Backward, Variant::ExtendedCurrentNls { kappa }) if same(kappa) => EquationSpec::dnls2(kappa),
            (_, Variant::GaugedNls { kappa })
            | (_, Variant::Dnls2 { kappa })
            | (_, Variant::CurrentNls { kappa })
            | (_, Variant::ExtendedCurrentNls { kappa })
                if !same(kappa) =>
            {
                Err(mismatch(kappa))
            }
            _ => Err(Error::IncompatibleSource {
                map: self.descriptor(),
                detail: format!("no gauge image is defined for {source}"),
            }),
        }
    }

    fn descriptor(&self) -> String {
        let dir = match self.direction {
            GaugeDirection::Forward => "forward",
            GaugeDirection::Backward => "backward",
        };
        format!("gauge:k={},dir={dir}", self.kappa)
    }
}

/// Gauge map on sampled fields, forward direction.
pub fn gauge_forward(phi: &ComplexField, kappa: f64) -> Result<ComplexField> {
    GaugeTransform::forward(kappa)?.apply_to_field(phi)
}

/// Gauge map on sampled fields, backward direction.
pub fn gauge_backward(psi: &ComplexField, kappa: f64) -> Result<ComplexField> {
    GaugeTransform::backward(kappa)?.apply_to_field(psi)
}

// 5-point Gauss–Legendre on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];
const QUAD_PANEL: f64 = 0.05;

/// `∫_a^b f` by composite Gauss–Legendre (signed for `b < a`).
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let panels = ((b - a).abs() / QUAD_PANEL).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        total += GL_NODES
            .iter()
            .zip(&GL_WEIGHTS)
            .map(|(&n, &w)| w * f(mid + 0.5 * h * n))
            .sum::<f64>();
    }
    0.5 * h * total
}

struct GaugedProfile {
    inner: Arc<dyn Profile>,
    map: GaugeTransform,
}

impl fmt::Debug for GaugedProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugedProfile").field("map", &self.map).finish()
    }
}

impl Profile for GaugedProfile {
    fn value(&self, t: f64, x: f64) -> Complex64 {
        let p = integrate(|y| self.inner.value(t, y).norm_sqr(), self.map.reference_point, x);
        self.inner.value(t, x) * Complex64::new(0.0, self.map.phase_rate() * p).exp()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        self.inner.check_time(t)
    }

    fn sample(&self, t: f64, grid: &Grid1D) -> Result<ComplexField> {
        let base = self.inner.sample(t, grid)?;
        let mut map = self.map;
        map.reference_point = -grid.half_length();
        let mapped = map.apply_to_field(&base)?;
        // Reference point off the grid edge: constant phase offset.
        let offset = integrate(
            |y| self.inner.value(t, y).norm_sqr(),
            self.map.reference_point,
            -grid.half_length(),
        );
        if offset == 0.0 {
            return Ok(mapped);
        }
        let rot = Complex64::new(0.0, self.map.phase_rate() * offset).exp();
        mapped.map(|_, z| z * rot)
    }
}

impl SolutionMap for GaugeTransform {
    fn descriptor(&self) -> String {
        GaugeTransform::descriptor(self)
    }

    fn source_window(&self, target: TimeDomain) -> Result<TimeDomain> {
        Ok(target)
    }

    fn apply(&self, sol: &ClosedFormSolution, target: TimeDomain) -> Result<ClosedFormSolution> {
        let domain = sol.domain().intersect(&target)?;
        if self.kappa == 0.0 {
            return Ok(ClosedFormSolution::new(sol.name(), *sol.solves(), domain, sol.profile().clone()));
        }
        let solves = self.target_equation(sol.solves())?;
        let profile = GaugedProfile {
            inner: sol.profile().clone(),
            map: *self,
        };
        Ok(ClosedFormSolution::new(
            format!("{}[{}]", SolutionMap::descriptor(self), sol.name()),
            solves,
            domain,
            Arc::new(profile),
        )
        .mark_gauge_seam())
    }

    fn apply_field(&self, field: &ComplexField, source: &EquationSpec) -> Result<(ComplexField, EquationSpec)> {
        let eq = self.target_equation(source)?;
        Ok((self.on_grid(field.grid()).apply_to_field(field)?, eq))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{covariant_current, current};
    use crate::solutions::{chiral_soliton, extended_soliton, SolitonParams};

    fn decayed_field(g: Grid1D, a: f64, b: f64) -> ComplexField {
        ComplexField::from_fn(g, 0.3, |x| {
            Complex64::new(a * (-(x - 1.0).powi(2) / 3.0).exp(), b * (-(x + 2.0).powi(2) / 2.0).exp())
                * Complex64::new(0.0, 0.4 * x).exp()
        })
        .unwrap()
    }

    #[test]
    fn kappa_zero_is_identity() {
        let g = Grid1D::default();
        let f = decayed_field(g, 1.0, 0.5);
        assert_eq!(gauge_forward(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn modulus_is_preserved_and_round_trip() {
        let g = Grid1D::default();
        let f = decayed_field(g, 1.2, -0.7);
        let psi = gauge_forward(&f, 1.3).unwrap();
        for (a, b) in psi.values().iter().zip(f.values()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-15);
        }
        let back = gauge_backward(&psi, 1.3).unwrap();
        assert!(back.max_abs_diff(&f, 0) <= 1e-12);
    }

    #[test]
    fn undecayed_field_leaks() {
        let g = Grid1D::new(10.0, 128).unwrap();
        let f = ComplexField::from_fn(g, 0.0, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(gauge_forward(&f, 1.0), Err(Error::BoundaryLeak { .. })));
    }

    #[test]
    fn current_of_gauged_field_is_covariant_current() {
        let g = Grid1D::default();
        let phi = decayed_field(g, 1.0, 0.8);
        let kappa = 1.1;
        let lhs = current(&gauge_forward(&phi, kappa).unwrap()).unwrap();
        let rhs = covariant_current(&phi, kappa).unwrap();
        assert!(lhs.max_abs_diff(&rhs, 4) <= 1e-10);
    }

    #[test]
    fn pointwise_quadrature_matches_sampled_route() {
        let g = Grid1D::default();
        let sol = extended_soliton(2.0, 1.0).unwrap();
        let mapped = GaugeTransform::backward(1.0).unwrap().apply(&sol, TimeDomain::all()).unwrap();
        assert_eq!(*mapped.solves(), EquationSpec::dnls2(1.0).unwrap());
        assert!(mapped.has_gauge_seam());
        let sampled = mapped.sample(0.4, &g).unwrap();
        for k in [300, 512, 530, 700] {
            let z = mapped.eval(0.4, g.x(k)).unwrap();
            assert!((z - sampled.values()[k]).norm() <= 1e-11, "k = {k}");
        }
    }

    #[test]
    fn equation_bookkeeping() {
        let chiral = chiral_soliton(SolitonParams::new(2.0, 1.0, 1.0).unwrap()).unwrap();
        let fwd = GaugeTransform::forward(1.0).unwrap();
        assert!(matches!(
            fwd.apply(&chiral, TimeDomain::all()),
            Err(Error::IncompatibleSource { .. })
        ));
        let back = GaugeTransform::backward(1.0).unwrap().apply(&chiral, TimeDomain::all()).unwrap();
        assert_eq!(*back.solves(), EquationSpec::gauged(1.0).unwrap());
        let wrong = GaugeTransform::backward(2.0).unwrap();
        assert!(wrong.apply(&chiral, TimeDomain::all()).is_err());
    }

    #[test]
    fn quadrature_is_accurate() {
        let v = integrate(|y| 1.0 / y.cosh().powi(2), -40.0, 1.0);
        assert!((v - (1f64.tanh() + 40f64.tanh())).abs() < 1e-13);
        assert_eq!(integrate(|y| y, 2.0, 2.0), 0.0);
        assert!((integrate(|y| y, 1.0, 0.0) + 0.5).abs() < 1e-15);
    }
}
