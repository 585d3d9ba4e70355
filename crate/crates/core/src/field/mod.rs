//! Periodic 1D grid, sampled fields, and the calculus primitives built on them.
//!
//! The domain is `[-L, L)` with `N` equispaced nodes `x_k = -L + k dx`.
//! Fields are immutable snapshots tagged with the time they were sampled at.

mod calculus;
mod spectral;

pub use calculus::{cumulative_integral, fd_derivative_interior, FD_EDGE_NODES};
pub use spectral::{spectral_derivative, SpectralOps};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half-length of the periodic box.
pub const DEFAULT_HALF_LENGTH: f64 = 40.0;
/// Default number of nodes.
pub const DEFAULT_NUM_POINTS: usize = 1024;
/// Default boundary-decay tolerance on |psi|.
pub const DEFAULT_DECAY_GATE: f64 = 1e-10;
/// Number of nodes per edge inspected by the decay gate.
pub const GATE_EDGE_NODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_length: f64,
    num_points: usize,
}

impl Grid1D {
    pub fn new(half_length: f64, num_points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half length must be positive and finite, got {half_length}"
            )));
        }
        if num_points < 16 || !num_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "N must be a power of two >= 16, got {num_points}"
            )));
        }
        Ok(Self {
            half_length,
            num_points,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.num_points as f64
    }

    /// Coordinate of node `k`.
    pub fn x(&self, k: usize) -> f64 {
        -self.half_length + k as f64 * self.dx()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.num_points).map(|k| self.x(k)).collect()
    }
}

impl Default for Grid1D {
    fn default() -> Self {
        Self {
            half_length: DEFAULT_HALF_LENGTH,
            num_points: DEFAULT_NUM_POINTS,
        }
    }
}

fn check_len(grid: &Grid1D, got: usize) -> Result<()> {
    if got != grid.num_points() {
        return Err(Error::ShapeMismatch {
            expected: grid.num_points(),
            got,
        });
    }
    Ok(())
}

/// Complex scalar field sampled on a [`Grid1D`] at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
    time: f64,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>, time: f64) -> Result<Self> {
        check_len(&grid, values.len())?;
        if let Some(k) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteInput(format!(
                "sample {k} (x = {}) is {}",
                grid.x(k),
                values[k]
            )));
        }
        Ok(Self { grid, values, time })
    }

    pub fn zeros(grid: Grid1D, time: f64) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.num_points()],
            time,
        }
    }

    /// Samples `f(x)` on every node.
    pub fn from_fn(grid: Grid1D, time: f64, mut f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        let values = (0..grid.num_points()).map(|k| f(grid.x(k))).collect();
        Self::new(grid, values, time)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Pointwise map, re-validated for finiteness.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &z)| f(self.grid.x(k), z))
            .collect();
        Self::new(self.grid, values, self.time)
    }

    /// Pointwise combination with another field on the same grid.
    pub fn zip_with(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if other.grid != self.grid {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, values, self.time)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// L-infinity distance to `other`, optionally skipping `margin` nodes per edge.
    pub fn max_abs_diff(&self, other: &ComplexField, margin: usize) -> f64 {
        let n = self.values.len();
        self.values[margin..n - margin]
            .iter()
            .zip(&other.values[margin..n - margin])
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn density(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.norm_sqr()).collect(),
            time: self.time,
        }
    }

    /// Largest |psi| over the outermost [`GATE_EDGE_NODES`] nodes of each edge.
    pub fn edge_magnitude(&self) -> f64 {
        edge_max(self.values.iter().map(|z| z.norm()), self.values.len())
    }

    /// Fails with [`Error::BoundaryLeak`] when the field has not decayed at the edges.
    pub fn check_decay(&self, gate: f64) -> Result<()> {
        let value = self.edge_magnitude();
        if value >= gate {
            return Err(Error::BoundaryLeak { value, gate });
        }
        Ok(())
    }
}

fn edge_max(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values
        .enumerate()
        .filter(|(k, _)| *k < GATE_EDGE_NODES || *k >= n - GATE_EDGE_NODES)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

/// Real scalar field: densities, currents, coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid1D,
    values: Vec<f64>,
    time: f64,
}

impl RealField {
    pub fn new(grid: Grid1D, values: Vec<f64>, time: f64) -> Result<Self> {
        check_len(&grid, values.len())?;
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(format!(
                "sample {k} (x = {}) is {}",
                grid.x(k),
                values[k]
            )));
        }
        Ok(Self { grid, values, time })
    }

    pub fn from_fn(grid: Grid1D, time: f64, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let values = (0..grid.num_points()).map(|k| f(grid.x(k))).collect();
        Self::new(grid, values, time)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            time: self.time,
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn edge_magnitude(&self) -> f64 {
        edge_max(self.values.iter().copied(), self.values.len())
    }

    pub fn max_abs_diff(&self, other: &RealField, margin: usize) -> f64 {
        let n = self.values.len();
        self.values[margin..n - margin]
            .iter()
            .zip(&other.values[margin..n - margin])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid1D::new(10.0, 1000).is_err());
        assert!(Grid1D::new(10.0, 8).is_err());
        assert!(Grid1D::new(-1.0, 64).is_err());
        assert!(Grid1D::new(f64::NAN, 64).is_err());
        assert!(Grid1D::new(10.0, 16).is_ok());
    }

    #[test]
    fn grid_endpoints() {
        let g = Grid1D::new(40.0, 1024).unwrap();
        assert_eq!(g.x(0), -40.0);
        assert!((g.x(1023) - (40.0 - g.dx())).abs() < 1e-13);
        assert_eq!(g, Grid1D::default());
    }

    #[test]
    fn fields_reject_non_finite_and_wrong_length() {
        let g = Grid1D::new(10.0, 16).unwrap();
        let mut v = vec![Complex64::new(1.0, 0.0); 16];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            ComplexField::new(g, v, 0.0),
            Err(Error::NonFiniteInput(_))
        ));
        assert!(matches!(
            RealField::new(g, vec![0.0; 15], 0.0),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(RealField::new(g, vec![f64::INFINITY; 16], 0.0).is_err());
    }

    #[test]
    fn decay_gate() {
        let g = Grid1D::default();
        let f = ComplexField::from_fn(g, 0.0, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        assert!(f.check_decay(1e-10).is_ok());
        let c = ComplexField::from_fn(g, 0.0, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            c.check_decay(1e-10),
            Err(Error::BoundaryLeak { .. })
        ));
    }
}
