//! Maps between solutions of different members of the equation family.
//!
//! Every map acts on [`ClosedFormSolution`]s and, when asked, on sampled
//! fields. Point maps use the pullback form `new(t, x) = w(t, x) old(T, X)`.

mod conformal;
mod frames;
mod gauge;

pub use conformal::{apply_conformal, ConformalMapSpec};
pub use frames::{apply_accelerated_frame, apply_niederer, FrameMap};
pub use gauge::{gauge_backward, gauge_forward, GaugeDirection, GaugeTransform};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::field::{ComplexField, SpectralOps};
use crate::params::{split_descriptor, ParamMap};
use crate::solutions::{ClosedFormSolution, Profile, TimeDomain};

/// Distance to a singular point of a map below which evaluation is refused.
pub const MAP_MARGIN: f64 = 1e-6;

/// A map from solutions of one equation to solutions of another.
pub trait SolutionMap: Send + Sync + fmt::Debug {
    /// Round-trippable `name:key=value` form.
    fn descriptor(&self) -> String;

    /// Source times reached from the target window.
    fn source_window(&self, target: TimeDomain) -> Result<TimeDomain>;

    fn apply(&self, sol: &ClosedFormSolution, target: TimeDomain) -> Result<ClosedFormSolution>;

    /// Maps a sampled source field; the result carries the target time.
    fn apply_field(&self, field: &ComplexField, source: &EquationSpec) -> Result<(ComplexField, EquationSpec)>;
}

/// One pointwise step `(t, x) ↦ (w, T, X)`.
pub(crate) trait PointMap: Send + Sync + fmt::Debug {
    fn check(&self, t: f64) -> Result<()>;
    fn pull(&self, t: f64, x: f64) -> (Complex64, f64, f64);
    /// Inverse of the time part of `pull`.
    fn target_time(&self, source_t: f64) -> Result<f64>;
}

/// Composition of point maps; `steps[0]` is applied to the solution first.
#[derive(Debug)]
pub(crate) struct MappedProfile {
    pub inner: Arc<dyn Profile>,
    pub steps: Vec<Arc<dyn PointMap>>,
}

impl MappedProfile {
    fn pull_all(&self, t: f64, x: f64) -> (Complex64, f64, f64) {
        let mut w = Complex64::new(1.0, 0.0);
        let (mut t, mut x) = (t, x);
        for step in self.steps.iter().rev() {
            let (wi, ti, xi) = step.pull(t, x);
            w *= wi;
            t = ti;
            x = xi;
        }
        (w, t, x)
    }
}

impl Profile for MappedProfile {
    fn value(&self, t: f64, x: f64) -> Complex64 {
        let (w, t0, x0) = self.pull_all(t, x);
        w * self.inner.value(t0, x0)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let mut t = t;
        for step in self.steps.iter().rev() {
            step.check(t)?;
            t = step.pull(t, 0.0).1;
        }
        self.inner.check_time(t)
    }
}

/// Applies point maps to a sampled field by band-limited interpolation.
/// Points outside the box are taken as zero.
pub(crate) fn pull_field(steps: &[Arc<dyn PointMap>], field: &ComplexField) -> Result<ComplexField> {
    let mut t = field.time();
    for step in steps {
        t = step.target_time(t)?;
    }
    let profile = MappedProfile {
        inner: Arc::new(Interpolant::new(field)),
        steps: steps.to_vec(),
    };
    profile.check_time(t)?;
    ComplexField::from_fn(*field.grid(), t, |x| profile.value(t, x))
}

/// Trigonometric interpolant of a periodic field.
#[derive(Debug)]
struct Interpolant {
    half_length: f64,
    n: usize,
    coeffs: Vec<Complex64>,
}

impl Interpolant {
    fn new(field: &ComplexField) -> Self {
        let grid = field.grid();
        let ops = SpectralOps::new(grid);
        let n = grid.num_points();
        let spec = ops.forward(field.values());
        // Modes m = -N/2..N/2 stored from index 0; the Nyquist mode is split
        // evenly between ±N/2.
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        for (p, c) in spec.iter().enumerate() {
            let m = if p < n / 2 { p as i64 } else { p as i64 - n as i64 };
            let idx = (m + n as i64 / 2) as usize;
            if p == n / 2 {
                coeffs[0] = 0.5 * c / n as f64;
                coeffs[n] = 0.5 * c / n as f64;
            } else {
                coeffs[idx] = c / n as f64;
            }
        }
        Self {
            half_length: grid.half_length(),
            n,
            coeffs,
        }
    }
}

impl Profile for Interpolant {
    fn value(&self, _t: f64, x: f64) -> Complex64 {
        let l = self.half_length;
        if !(x >= -l && x <= l) {
            return Complex64::new(0.0, 0.0);
        }
        let theta = std::f64::consts::PI * (x + l) / l;
        let step = Complex64::new(0.0, theta).exp();
        let mut phase = Complex64::new(0.0, -theta * (self.n / 2) as f64).exp();
        let mut total = Complex64::new(0.0, 0.0);
        for c in &self.coeffs {
            total += c * phase;
            phase *= step;
        }
        total
    }
}

/// Maps applied left to right.
#[derive(Debug, Clone, Default)]
pub struct MapChain {
    maps: Vec<Arc<dyn SolutionMap>>,
}

impl MapChain {
    pub fn new(maps: Vec<Arc<dyn SolutionMap>>) -> Self {
        Self { maps }
    }

    pub fn maps(&self) -> &[Arc<dyn SolutionMap>] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Target windows for every map, last entry = `target`.
    fn windows(&self, target: TimeDomain) -> Result<Vec<TimeDomain>> {
        let mut windows = vec![target; self.maps.len()];
        let mut w = target;
        for (i, map) in self.maps.iter().enumerate().rev() {
            windows[i] = w;
            w = map.source_window(w)?;
        }
        Ok(windows)
    }
}

impl SolutionMap for MapChain {
    fn descriptor(&self) -> String {
        if self.maps.is_empty() {
            return "identity".into();
        }
        self.maps.iter().map(|m| m.descriptor()).collect::<Vec<_>>().join("+")
    }

    fn source_window(&self, target: TimeDomain) -> Result<TimeDomain> {
        self.maps
            .iter()
            .rev()
            .try_fold(target, |w, m| m.source_window(w))
    }

    fn apply(&self, sol: &ClosedFormSolution, target: TimeDomain) -> Result<ClosedFormSolution> {
        let windows = self.windows(target)?;
        let mut current = sol.clone();
        for (map, window) in self.maps.iter().zip(windows) {
            current = map.apply(&current, window)?;
        }
        if self.maps.is_empty() {
            let domain = sol.domain().intersect(&target)?;
            return Ok(ClosedFormSolution::new(sol.name(), *sol.solves(), domain, sol.profile().clone()));
        }
        Ok(current)
    }

    fn apply_field(&self, field: &ComplexField, source: &EquationSpec) -> Result<(ComplexField, EquationSpec)> {
        let mut state = (field.clone(), *source);
        for map in &self.maps {
            state = map.apply_field(&state.0, &state.1)?;
        }
        Ok(state)
    }
}

/// Defaults the parser fills in when a descriptor omits them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapDefaults {
    pub gauge_direction: GaugeDirection,
    pub kappa: f64,
}

impl Default for MapDefaults {
    fn default() -> Self {
        Self {
            gauge_direction: GaugeDirection::Forward,
            kappa: 1.0,
        }
    }
}

pub trait MapBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn build(&self, params: &ParamMap, defaults: &MapDefaults) -> Result<Arc<dyn SolutionMap>>;
}

struct GaugeBuilder;
struct DilateBuilder;
struct ExpandBuilder;
struct ShiftBuilder;
struct LensBuilder;
struct AccelBuilder;
struct NiedererBuilder;

impl MapBuilder for GaugeBuilder {
    fn name(&self) -> &'static str {
        "gauge"
    }
    fn summary(&self) -> &'static str {
        "psi = exp(-i k^2 int rho) phi (k, dir=forward|backward)"
    }
    fn build(&self, p: &ParamMap, d: &MapDefaults) -> Result<Arc<dyn SolutionMap>> {
        p.ensure_only("gauge", &["k", "kappa", "dir", "ref"])?;
        let direction = match p.get_str(&["dir"]) {
            None => d.gauge_direction,
            Some("forward") | Some("fwd") => GaugeDirection::Forward,
            Some("backward") | Some("bwd") | Some("inverse") => GaugeDirection::Backward,
            Some(other) => return Err(Error::Parse(format!("bad gauge direction '{other}'"))),
        };
        let mut g = GaugeTransform::new(p.f64_or(&["k", "kappa"], d.kappa)?, direction)?;
        if let Some(r) = p.get_f64(&["ref"])? {
            g.reference_point = r;
        }
        Ok(Arc::new(g))
    }
}

impl MapBuilder for DilateBuilder {
    fn name(&self) -> &'static str {
        "dilate"
    }
    fn summary(&self) -> &'static str {
        "dilatation (t, x) -> (d^2 t, d x) (d)"
    }
    fn build(&self, p: &ParamMap, _d: &MapDefaults) -> Result<Arc<dyn SolutionMap>> {
        p.ensure_only("dilate", &["d", "delta"])?;
        Ok(Arc::new(ConformalMapSpec::dilatation(p.require_f64(&["d", "delta"])?)?))
    }
}

impl MapBuilder for ExpandBuilder {
    fn name(&self) -> &'static str {
        "expand"
    }
    fn summary(&self) -> &'static str {
        "expansion (t, x) -> (t/(1-kt), x/(1-kt)) (k)"
    }
    fn build(&self, p: &ParamMap, _d: &MapDefaults) -> Result<Arc<dyn SolutionMap>> {
        p.ensure_only("expand", &["k", "kappa"])?;
        Ok(Arc::new(ConformalMapSpec::expansion(p.require_f64(&["k", "kappa"])?)?))
    }
}

impl MapBuilder for ShiftBuilder {
    fn name(&self) -> &'static str {
        "shift"
    }
    fn summary(&self) -> &'static str {
        "time translation t -> t + e (e)"
    }
    fn build(&self, p: &ParamMap, _d: &MapDefaults) -> Result<Arc<dyn SolutionMap>> {
        p.ensure_only("shift", &["e", "eps", "epsilon"])?;
        Ok(Arc::new(ConformalMapSpec::time_translation(
            p.require_f64(&["e", "eps", "epsilon"])?,
        )?))
    }
}

impl MapBuilder for LensBuilder {
    fn name(&self) -> &'static str {
        "D"
    }
    fn summary(&self) -> &'static str {
        "lens map (t, x) -> (-1/t, -x/t)"
    }
    fn build(&self, p: &ParamMap, _d: &MapDefaults) -> Result<Arc<dyn SolutionMap>> {
        p.ensure_only("D", &[])?;
        Ok(Arc::new(ConformalMapSpec::Lens))
    }
}

impl MapBuilder for AccelBuilder {
    fn name(&self) -> &'static str {
        "accel"
    }
    fn summary(&self) -> &'static str {
        "accelerated frame adding the potential 2 a x (a)"
    }
    fn build(&self, p: &ParamMap, _d: &MapDefaults) -> Result<Arc<dyn SolutionMap>> {
        p.ensure_only("accel", &["a", "alpha"])?;
        Ok(Arc::new(FrameMap::accelerated(p.require_f64(&["a", "alpha"])?)?))
    }
}

impl MapBuilder for NiedererBuilder {
    fn name(&self) -> &'static str {
        "niederer"
    }
    fn summary(&self) -> &'static str {
        "Niederer map adding the potential w^2 x^2 / 4 (w)"
    }
    fn build(&self, p: &ParamMap, _d: &MapDefaults) -> Result<Arc<dyn SolutionMap>> {
        p.ensure_only("niederer", &["w", "omega"])?;
        Ok(Arc::new(FrameMap::niederer(p.require_f64(&["w", "omega"])?)?))
    }
}

/// Name-keyed registry of map builders.
#[derive(Clone)]
pub struct MapRegistry {
    builders: BTreeMap<&'static str, Arc<dyn MapBuilder>>,
    aliases: BTreeMap<&'static str, &'static str>,
}

impl MapRegistry {
    pub fn empty() -> Self {
        Self {
            builders: BTreeMap::new(),
            aliases: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(GaugeBuilder));
        r.register(Arc::new(DilateBuilder));
        r.register(Arc::new(ExpandBuilder));
        r.register(Arc::new(ShiftBuilder));
        r.register(Arc::new(LensBuilder));
        r.register(Arc::new(AccelBuilder));
        r.register(Arc::new(NiedererBuilder));
        r.aliases.insert("lens", "D");
        r.aliases.insert("dilatation", "dilate");
        r.aliases.insert("expansion", "expand");
        r.aliases.insert("translate", "shift");
        r
    }

    pub fn register(&mut self, builder: Arc<dyn MapBuilder>) {
        self.builders.insert(builder.name(), builder);
    }

    pub fn names(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.builders.values().map(|b| (b.name(), b.summary()))
    }

    pub fn build(&self, descriptor: &str, defaults: &MapDefaults) -> Result<Arc<dyn SolutionMap>> {
        let (name, params) = split_descriptor(descriptor)?;
        let key = self.aliases.get(name.as_str()).copied().unwrap_or(name.as_str());
        let builder = self.builders.get(key).ok_or_else(|| Error::UnknownName {
            kind: "map",
            name: name.clone(),
        })?;
        builder.build(&params, defaults)
    }

    /// Parses `map+map+...`, applied left to right.
    pub fn parse(&self, expr: &str, defaults: &MapDefaults) -> Result<MapChain> {
        let maps = split_chain(expr)?
            .iter()
            .map(|d| self.build(d, defaults))
            .collect::<Result<Vec<_>>>()?;
        Ok(MapChain::new(maps))
    }
}

impl Default for MapRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

/// Splits on `+` unless it continues a number such as `1e+3`.
fn split_chain(expr: &str) -> Result<Vec<String>> {
    let mut parts: Vec<String> = Vec::new();
    for piece in expr.split('+') {
        if piece.trim().is_empty() {
            return Err(Error::Parse(format!("empty map in '{expr}'")));
        }
        let starts_name = piece.trim_start().chars().next().is_some_and(|c| c.is_ascii_alphabetic());
        match parts.last_mut() {
            Some(last) if !starts_name => {
                last.push('+');
                last.push_str(piece);
            }
            _ => parts.push(piece.to_string()),
        }
    }
    let parts: Vec<String> = parts.into_iter().map(|p| p.trim().to_string()).collect();
    if parts.is_empty() || parts.iter().any(String::is_empty) {
        return Err(Error::Parse(format!("empty map in '{expr}'")));
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid1D;

    #[test]
    fn chain_splitting_keeps_exponents() {
        assert_eq!(split_chain("shift:e=1e+3+D").unwrap(), vec!["shift:e=1e+3", "D"]);
        assert_eq!(split_chain(" gauge:k=1 + dilate:d=2 ").unwrap(), vec!["gauge:k=1", "dilate:d=2"]);
        assert!(split_chain("D++D").is_err());
        assert!(split_chain("").is_err());
    }

    #[test]
    fn registry_round_trips_descriptors() {
        let reg = MapRegistry::standard();
        let d = MapDefaults::default();
        for expr in [
            "gauge:k=1.5,dir=backward",
            "dilate:d=2",
            "expand:k=0.5",
            "shift:e=1",
            "D",
            "accel:a=0.25",
            "niederer:w=1",
        ] {
            let chain = reg.parse(expr, &d).unwrap();
            let again = reg.parse(&chain.descriptor(), &d).unwrap();
            assert_eq!(chain.descriptor(), again.descriptor(), "{expr}");
        }
        assert!(matches!(reg.parse("boost:v=1", &d), Err(Error::UnknownName { .. })));
        assert!(reg.parse("dilate", &d).is_err());
        assert!(reg.parse("D:x=1", &d).is_err());
    }

    #[test]
    fn interpolant_reproduces_nodes_and_smooth_values() {
        let g = Grid1D::new(20.0, 256).unwrap();
        let f = ComplexField::from_fn(g, 0.0, |x| {
            Complex64::new((-x * x / 4.0).exp(), 0.0) * Complex64::new(0.0, 0.7 * x).exp()
        })
        .unwrap();
        let it = Interpolant::new(&f);
        for k in [0, 17, 128, 200] {
            assert!((it.value(0.0, g.x(k)) - f.values()[k]).norm() < 1e-12);
        }
        let x = 0.123;
        let exact = Complex64::new((-x * x / 4.0f64).exp(), 0.0) * Complex64::new(0.0, 0.7 * x).exp();
        assert!((it.value(0.0, x) - exact).norm() < 1e-12);
        assert_eq!(it.value(0.0, 25.0), Complex64::new(0.0, 0.0));
    }
}
