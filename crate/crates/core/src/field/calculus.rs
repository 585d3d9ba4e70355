use rustfft::num_complex::Complex64;

use super::{ComplexField, RealField, SpectralOps, DEFAULT_DECAY_GATE};
use crate::error::{Error, Result};

/// Nodes per edge left undefined (zero) by [`fd_derivative_interior`].
pub const FD_EDGE_NODES: usize = 2;

/// Fourth-order centered finite differences, order 1 or 2.
///
/// Does not assume periodicity. The outermost [`FD_EDGE_NODES`] nodes on each
/// side are set to zero and must be excluded from any norm taken downstream.
pub fn fd_derivative_interior(f: &ComplexField, order: u32) -> Result<ComplexField> {
    let v = f.values();
    let n = v.len();
    let dx = f.grid().dx();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    match order {
        1 => {
            let s = 1.0 / (12.0 * dx);
            for k in FD_EDGE_NODES..n - FD_EDGE_NODES {
                out[k] = (v[k - 2] - v[k - 1] * 8.0 + v[k + 1] * 8.0 - v[k + 2]) * s;
            }
        }
        2 => {
            let s = 1.0 / (12.0 * dx * dx);
            for k in FD_EDGE_NODES..n - FD_EDGE_NODES {
                out[k] = (-v[k - 2] + v[k - 1] * 16.0 - v[k] * 30.0 + v[k + 1] * 16.0 - v[k + 2]) * s;
            }
        }
        other => return Err(Error::InvalidOrder(other)),
    }
    ComplexField::new(*f.grid(), out, f.time())
}

/// `P(x_k) = ∫_{-L}^{x_k} rho(y) dy`, with `P(-L) = 0`.
///
/// Densities that have decayed at both edges (or are constant) are integrated
/// spectrally; anything else falls back to a fourth-order local cubic rule.
pub fn cumulative_integral(rho: &RealField) -> Result<RealField> {
    let v = rho.values();
    let grid = *rho.grid();
    let n = v.len();
    let dx = grid.dx();
    let constant = v.iter().all(|&y| y == v[0]);
    let out = if rho.edge_magnitude() < DEFAULT_DECAY_GATE || constant {
        let ops = SpectralOps::new(&grid);
        let (g, mean) = ops.periodic_antiderivative(v);
        (0..n)
            .map(|k| g[k] - g[0] + mean * (grid.x(k) + grid.half_length()))
            .collect()
    } else {
        let s = dx / 24.0;
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(n);
        out.push(0.0);
        for k in 0..n - 1 {
            let piece = if k == 0 {
                9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]
            } else if k == n - 2 {
                v[n - 4] - 5.0 * v[n - 3] + 19.0 * v[n - 2] + 9.0 * v[n - 1]
            } else {
                -v[k - 1] + 13.0 * v[k] + 13.0 * v[k + 1] - v[k + 2]
            };
            acc += s * piece;
            out.push(acc);
        }
        out
    };
    RealField::new(grid, out, rho.time())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid1D;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn fd_constant_and_linear() {
        let g = Grid1D::new(10.0, 64).unwrap();
        let c = ComplexField::from_fn(g, 0.0, |_| Complex64::new(3.0, 1.0)).unwrap();
        for order in 1..=2 {
            assert!(fd_derivative_interior(&c, order).unwrap().max_abs() < 1e-12);
        }
        let lin = ComplexField::from_fn(g, 0.0, |x| Complex64::new(x, 0.0)).unwrap();
        let d = fd_derivative_interior(&lin, 1).unwrap();
        for k in FD_EDGE_NODES..g.len() - FD_EDGE_NODES {
            assert!((d.values()[k] - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn fd_sech_derivative_is_fourth_order() {
        let err = |n: usize| {
            let g = Grid1D::new(20.0, n).unwrap();
            let f = ComplexField::from_fn(g, 0.0, |x| Complex64::new(sech(x), 0.0)).unwrap();
            let d = fd_derivative_interior(&f, 1).unwrap();
            (FD_EDGE_NODES..g.len() - FD_EDGE_NODES)
                .map(|k| {
                    let x = g.x(k);
                    (d.values()[k].re + sech(x) * x.tanh()).abs()
                })
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(512), err(1024));
        assert!(fine <= 2e-6, "err = {fine}");
        assert!(coarse / fine > 14.0, "ratio = {}", coarse / fine);
    }

    #[test]
    fn fd_rejects_order_zero() {
        let g = Grid1D::new(10.0, 16).unwrap();
        assert!(fd_derivative_interior(&ComplexField::zeros(g, 0.0), 0).is_err());
    }

    #[test]
    fn cumulative_of_zero_and_one() {
        let g = Grid1D::new(10.0, 256).unwrap();
        let z = cumulative_integral(&RealField::new(g, vec![0.0; 256], 0.0).unwrap()).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        let one = cumulative_integral(&RealField::new(g, vec![1.0; 256], 0.0).unwrap()).unwrap();
        for k in 0..g.len() {
            assert!((one.values()[k] - (g.x(k) + 10.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn cumulative_of_sech_squared() {
        let g = Grid1D::new(20.0, 1024).unwrap();
        let rho = RealField::from_fn(g, 0.0, |x| sech(x).powi(2)).unwrap();
        let p = cumulative_integral(&rho).unwrap();
        assert_eq!(p.values()[0], 0.0);
        let err = (0..g.len())
            .map(|k| (p.values()[k] - (g.x(k).tanh() + 20f64.tanh())).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-8, "err = {err}");
    }

    #[test]
    fn local_rule_is_exact_for_cubics() {
        let g = Grid1D::new(2.0, 64).unwrap();
        let rho = RealField::from_fn(g, 0.0, |x| 1.0 + x - 0.5 * x * x + 0.25 * x.powi(3)).unwrap();
        let p = cumulative_integral(&rho).unwrap();
        let anti = |x: f64| x + x * x / 2.0 - x.powi(3) / 6.0 + x.powi(4) / 16.0;
        for k in 0..g.len() {
            let expect = anti(g.x(k)) - anti(-2.0);
            assert!((p.values()[k] - expect).abs() <= 1e-12, "k = {k}");
        }
    }

    #[test]
    fn integral_then_derivative_recovers_density() {
        let g = Grid1D::new(20.0, 1024).unwrap();
        let rho = RealField::from_fn(g, 0.0, |x| (-(x - 1.0).powi(2)).exp() + 0.5 * sech(2.0 * x).powi(2))
            .unwrap();
        let p = cumulative_integral(&rho).unwrap();
        let d = fd_derivative_interior(&p.to_complex(), 1).unwrap();
        let err = (FD_EDGE_NODES..g.len() - FD_EDGE_NODES)
            .map(|k| (d.values()[k].re - rho.values()[k]).abs())
            .fold(0.0, f64::max);
        assert!(err <= 3e-5, "err = {err}");
    }
}
