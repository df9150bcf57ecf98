//! Uniform node-centred grid on the unit interval and the quadrature and
//! differencing operators used by every other module.

use crate::error::{Result, WaveError};
use serde::{Deserialize, Serialize};

/// Smallest grid supported by the one-sided fourth-order stencils.
pub const MIN_CELLS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_cells: usize,
    dx: f64,
}

impl Grid {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(WaveError::Invalid(format!(
                "n_cells must be at least {MIN_CELLS}, got {n_cells}"
            )));
        }
        Ok(Self {
            n_cells,
            dx: 1.0 / n_cells as f64,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Node coordinate; computed as a ratio so both endpoints are exact.
    pub fn x(&self, i: usize) -> f64 {
        i as f64 / self.n_cells as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.x(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| f(self.x(i))).collect()
    }

    pub fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.n_nodes() {
            return Err(WaveError::DimensionMismatch {
                expected: self.n_nodes(),
                found: values.len(),
            });
        }
        Ok(())
    }

    /// Composite trapezoid rule over [0, 1].
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_nodes());
        self.trapezoid_by(|i| values[i])
    }

    /// Composite trapezoid rule of a nodal integrand given by index.
    pub fn trapezoid_by(&self, f: impl Fn(usize) -> f64) -> f64 {
        let n = self.n_cells;
        let interior: f64 = (1..n).map(&f).sum();
        self.dx * (0.5 * (f(0) + f(n)) + interior)
    }

    /// Running trapezoid integral from x = 0; the first entry is 0.
    pub fn cumulative_trapezoid(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.n_nodes());
        let mut out = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        out.push(acc);
        for w in values.windows(2) {
            acc += 0.5 * self.dx * (w[0] + w[1]);
            out.push(acc);
        }
        out
    }

    /// Nodal derivative: fourth-order central differences in the interior,
    /// fourth-order one-sided stencils on the two nodes next to each wall.
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.n_nodes());
        let n = self.n_cells;
        let scale = 1.0 / (12.0 * self.dx);
        let mut d = vec![0.0; n + 1];
        d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * scale;
        d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * scale;
        for i in 2..n - 1 {
            d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * scale;
        }
        d[n - 1] =
            (3.0 * f[n] + 10.0 * f[n - 1] - 18.0 * f[n - 2] + 6.0 * f[n - 3] - f[n - 4]) * scale;
        d[n] = (25.0 * f[n] - 48.0 * f[n - 1] + 36.0 * f[n - 2] - 16.0 * f[n - 3] + 3.0 * f[n - 4])
            * scale;
        d
    }

    /// L^p norm by trapezoid quadrature.
    pub fn lp_norm(&self, f: &[f64], p: f64) -> f64 {
        self.trapezoid_by(|i| f[i].abs().powf(p)).powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn endpoints_are_exact() {
        for n in [4, 7, 49, 100, 256, 1000] {
            let g = Grid::new(n).unwrap();
            assert_eq!(g.x(0), 0.0);
            assert_eq!(g.x(n), 1.0);
            assert!((g.dx() * n as f64 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(Grid::new(3).is_err());
        assert!(Grid::new(0).is_err());
    }

    #[test]
    fn derivative_is_exact_on_quartics() {
        let g = Grid::new(16).unwrap();
        let f = g.sample(|x| x.powi(4) - 2.0 * x.powi(3) + x);
        let d = g.derivative(&f);
        for (i, di) in d.iter().enumerate() {
            let x = g.x(i);
            let exact = 4.0 * x.powi(3) - 6.0 * x * x + 1.0;
            assert!((di - exact).abs() < 1e-11, "node {i}: {di} vs {exact}");
        }
    }

    #[test]
    fn derivative_converges_at_fourth_order() {
        let err = |n: usize| {
            let g = Grid::new(n).unwrap();
            let d = g.derivative(&g.sample(|x| (PI * x).sin()));
            (0..=n)
                .map(|i| (d[i] - PI * (PI * g.x(i)).cos()).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(64) / err(128)).log2();
        assert!(order > 3.8, "observed order {order}");
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let g = Grid::new(10).unwrap();
        let f = g.sample(|x| 3.0 * x + 1.0);
        assert!((g.trapezoid(&f) - 2.5).abs() < 1e-14);
        let c = g.cumulative_trapezoid(&f);
        assert!((c[10] - 2.5).abs() < 1e-14);
        assert!((c[5] - (1.5 * 0.25 + 0.5)).abs() < 1e-14);
    }
}
