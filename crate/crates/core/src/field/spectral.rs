use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{ComplexField, Grid1D};
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// FFT plans and wavenumber tables for one grid.
///
/// Wavenumbers follow `k_m = pi m / L` with `m` in `[-N/2, N/2)`, stored in
/// FFT order. Plans are shared (`Arc`); scratch buffers are allocated per call,
/// so a single instance may be used from several threads.
#[derive(Clone)]
pub struct SpectralOps {
    grid: Grid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
    keep: Vec<bool>,
}

impl std::fmt::Debug for SpectralOps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralOps").field("grid", &self.grid).finish()
    }
}

impl SpectralOps {
    pub fn new(grid: &Grid1D) -> Self {
        let n = grid.num_points();
        let (forward, inverse) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(n), p.plan_fft_inverse(n))
        });
        let scale = PI / grid.half_length();
        let modes: Vec<i64> = (0..n)
            .map(|p| if p < n / 2 { p as i64 } else { p as i64 - n as i64 })
            .collect();
        let cutoff = (n / 3) as i64;
        Self {
            grid: *grid,
            forward,
            inverse,
            wavenumbers: modes.iter().map(|&m| scale * m as f64).collect(),
            keep: modes.iter().map(|&m| m.abs() <= cutoff).collect(),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn is_nyquist(&self, p: usize) -> bool {
        p == self.grid.num_points() / 2
    }

    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// Normalised inverse transform.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<Complex64> {
        self.inverse.process(&mut spectrum);
        let norm = 1.0 / self.grid.num_points() as f64;
        spectrum.iter_mut().for_each(|z| *z *= norm);
        spectrum
    }

    /// Multiplies a spectrum in place by the symbol of d/dx or d²/dx².
    pub fn apply_derivative_symbol(&self, spectrum: &mut [Complex64], order: u32) -> Result<()> {
        match order {
            1 => {
                for (p, (z, &k)) in spectrum.iter_mut().zip(&self.wavenumbers).enumerate() {
                    *z = if self.is_nyquist(p) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        *z * Complex64::new(0.0, k)
                    };
                }
            }
            2 => {
                for (z, &k) in spectrum.iter_mut().zip(&self.wavenumbers) {
                    *z *= -k * k;
                }
            }
            other => return Err(Error::InvalidOrder(other)),
        }
        Ok(())
    }

    pub fn derivative_values(&self, values: &[Complex64], order: u32) -> Result<Vec<Complex64>> {
        if !(1..=2).contains(&order) {
            return Err(Error::InvalidOrder(order));
        }
        let mut spec = self.forward(values);
        self.apply_derivative_symbol(&mut spec, order)?;
        Ok(self.inverse(spec))
    }

    pub fn derivative(&self, f: &ComplexField, order: u32) -> Result<ComplexField> {
        let values = self.derivative_values(f.values(), order)?;
        ComplexField::new(*f.grid(), values, f.time())
    }

    /// Zeroes the modes with |m| > N/3 (two-thirds rule).
    pub fn dealias(&self, spectrum: &mut [Complex64]) {
        for (z, &keep) in spectrum.iter_mut().zip(&self.keep) {
            if !keep {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Periodic antiderivative of the zero-mean part of `values`, plus the mean.
    ///
    /// Returns `(g, mean)` with `g' = values - mean` and `g` real for real input.
    pub(crate) fn periodic_antiderivative(&self, values: &[f64]) -> (Vec<f64>, f64) {
        let n = values.len();
        let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut spec = self.forward(&complex);
        let mean = spec[0].re / n as f64;
        for (p, z) in spec.iter_mut().enumerate() {
            let k = self.wavenumbers[p];
            *z = if p == 0 || self.is_nyquist(p) {
                Complex64::new(0.0, 0.0)
            } else {
                *z / Complex64::new(0.0, k)
            };
        }
        (self.inverse(spec).into_iter().map(|z| z.re).collect(), mean)
    }
}

/// Fourier spectral derivative of order 1 or 2.
///
/// The Nyquist mode of the first derivative is zeroed.
pub fn spectral_derivative(f: &ComplexField, order: u32) -> Result<ComplexField> {
    SpectralOps::new(f.grid()).derivative(f, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_has_zero_derivative() {
        let g = Grid1D::new(10.0, 64).unwrap();
        let f = ComplexField::from_fn(g, 0.0, |_| c(2.5, -1.0)).unwrap();
        for order in 1..=2 {
            let d = spectral_derivative(&f, order).unwrap();
            assert!(d.max_abs() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_is_eigenfunction() {
        let g = Grid1D::new(10.0, 128).unwrap();
        let k0 = 5.0;
        let k = k0 * PI / g.half_length();
        let f = ComplexField::from_fn(g, 0.0, |x| c(0.0, k * x).exp()).unwrap();
        let d = spectral_derivative(&f, 1).unwrap();
        for (dz, z) in d.values().iter().zip(f.values()) {
            let expect = c(0.0, k) * z;
            assert!((dz - expect).norm() <= 1e-12 * expect.norm());
        }
    }

    #[test]
    fn gaussian_second_derivative() {
        let g = Grid1D::new(20.0, 512).unwrap();
        let f = ComplexField::from_fn(g, 0.0, |x| c((-x * x).exp(), 0.0)).unwrap();
        let d = spectral_derivative(&f, 2).unwrap();
        let err = (0..g.len())
            .map(|k| {
                let x = g.x(k);
                (d.values()[k] - c((4.0 * x * x - 2.0) * (-x * x).exp(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "err = {err}");
    }

    #[test]
    fn rejects_order_three() {
        let g = Grid1D::new(10.0, 16).unwrap();
        let f = ComplexField::zeros(g, 0.0);
        assert_eq!(spectral_derivative(&f, 3), Err(Error::InvalidOrder(3)));
    }

    #[test]
    fn dealias_mask_keeps_low_modes() {
        let g = Grid1D::new(10.0, 48usize.next_power_of_two()).unwrap();
        let ops = SpectralOps::new(&g);
        let mut spec = vec![c(1.0, 0.0); g.len()];
        ops.dealias(&mut spec);
        let kept = spec.iter().filter(|z| z.re != 0.0).count();
        // |m| <= 21 for N = 64
        assert_eq!(kept, 43);
    }

    fn smooth_field(g: Grid1D, a: [f64; 4]) -> ComplexField {
        ComplexField::from_fn(g, 0.0, |x| {
            c(
                a[0] * (-(x - a[1]).powi(2) / 4.0).exp(),
                a[2] * (-(x + a[3]).powi(2) / 3.0).exp(),
            )
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn derivative_is_linear(a in prop::array::uniform4(-2.0f64..2.0),
                                b in prop::array::uniform4(-2.0f64..2.0),
                                s in -3.0f64..3.0, r in -3.0f64..3.0) {
            let g = Grid1D::new(20.0, 256).unwrap();
            let f = smooth_field(g, a);
            let h = smooth_field(g, b);
            let combo = f.zip_with(&h, |u, v| u * s + v * r).unwrap();
            let lhs = spectral_derivative(&combo, 1).unwrap();
            let df = spectral_derivative(&f, 1).unwrap();
            let dh = spectral_derivative(&h, 1).unwrap();
            let rhs = df.zip_with(&dh, |u, v| u * s + v * r).unwrap();
            let scale = lhs.max_abs().max(1.0);
            prop_assert!(lhs.max_abs_diff(&rhs, 0) <= 1e-12 * scale);
        }

        #[test]
        fn first_twice_equals_second(a in prop::array::uniform4(-2.0f64..2.0)) {
            let g = Grid1D::new(20.0, 256).unwrap();
            let f = smooth_field(g, a);
            let d1 = spectral_derivative(&spectral_derivative(&f, 1).unwrap(), 1).unwrap();
            let d2 = spectral_derivative(&f, 2).unwrap();
            let scale = d2.max_abs().max(1.0);
            prop_assert!(d1.max_abs_diff(&d2, 0) <= 1e-9 * scale);
        }
    }
}
