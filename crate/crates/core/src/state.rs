//! Solver state in Riemann invariants and the transforms to and from the
//! physical variables `(z, z_t)`.

use crate::error::{Result, WaveError};
use crate::grid::Grid;
use serde::{Deserialize, Serialize};

/// Tolerance on the Dirichlet and compatibility conditions of input data.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Nodal values of `rho = z_x + z_t` and `xi = z_x - z_t` at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannState {
    pub rho: Vec<f64>,
    pub xi: Vec<f64>,
    pub t: f64,
}

impl RiemannState {
    pub fn zero(grid: &Grid) -> Self {
        Self {
            rho: vec![0.0; grid.n_nodes()],
            xi: vec![0.0; grid.n_nodes()],
            t: 0.0,
        }
    }

    pub fn new(rho: Vec<f64>, xi: Vec<f64>, t: f64, grid: &Grid) -> Result<Self> {
        grid.check_len(&rho)?;
        grid.check_len(&xi)?;
        Ok(Self { rho, xi, t })
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// `z_t = (rho - xi) / 2` at every node.
    pub fn velocity(&self) -> Vec<f64> {
        self.rho
            .iter()
            .zip(&self.xi)
            .map(|(r, x)| 0.5 * (r - x))
            .collect()
    }

    /// `z_x = (rho + xi) / 2` at every node.
    pub fn slope(&self) -> Vec<f64> {
        self.rho
            .iter()
            .zip(&self.xi)
            .map(|(r, x)| 0.5 * (r + x))
            .collect()
    }

    /// Largest `|rho - xi|` over the two wall nodes.
    pub fn boundary_defect(&self) -> f64 {
        let n = self.rho.len() - 1;
        (self.rho[0] - self.xi[0])
            .abs()
            .max((self.rho[n] - self.xi[n]).abs())
    }

    /// Max-norm distance over both invariants.
    pub fn max_distance(&self, other: &RiemannState) -> f64 {
        self.rho
            .iter()
            .zip(&other.rho)
            .chain(self.xi.iter().zip(&other.xi))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_wall(what: &'static str, values: &[f64]) -> Result<()> {
    let n = values.len() - 1;
    for (x, v) in [(0.0, values[0]), (1.0, values[n])] {
        if v.abs() > BOUNDARY_TOL {
            return Err(WaveError::BoundaryViolation { what, x, value: v });
        }
    }
    Ok(())
}

/// `rho = D z0 + z1`, `xi = D z0 - z1`. The wall values of `z1` are within
/// tolerance of zero and are set to exactly zero, so the returned state is
/// compatible at both walls.
pub fn riemann_from_physical(z0: &[f64], z1: &[f64], grid: &Grid) -> Result<RiemannState> {
    grid.check_len(z0)?;
    grid.check_len(z1)?;
    check_wall("z0", z0)?;
    check_wall("z1", z1)?;
    let zx = grid.derivative(z0);
    Ok(riemann_from_slope(&zx, z1))
}

/// Same as [`riemann_from_physical`] with `z_x` given directly.
pub fn riemann_from_slope(zx: &[f64], zt: &[f64]) -> RiemannState {
    let n = zt.len() - 1;
    let (rho, xi) = zx
        .iter()
        .zip(zt)
        .enumerate()
        .map(|(i, (&s, &u))| {
            let u = if i == 0 || i == n { 0.0 } else { u };
            (s + u, s - u)
        })
        .unzip();
    RiemannState { rho, xi, t: 0.0 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalFields {
    pub z: Vec<f64>,
    pub z_t: Vec<f64>,
    /// `|z(1)|` from integrating `z_x` from the left wall.
    pub defect: f64,
}

pub fn physical_from_riemann(state: &RiemannState, grid: &Grid) -> PhysicalFields {
    let z = grid.cumulative_trapezoid(&state.slope());
    let defect = z[z.len() - 1].abs();
    PhysicalFields {
        z,
        z_t: state.velocity(),
        defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_displacement_gives_equal_invariants() {
        let grid = Grid::new(256).unwrap();
        let z0 = grid.sample(|x| (PI * x).sin());
        let mut z0c = z0.clone();
        z0c[256] = 0.0;
        let s = riemann_from_physical(&z0c, &vec![0.0; 257], &grid).unwrap();
        for i in 0..=256 {
            let exact = PI * (PI * grid.x(i)).cos();
            assert!((s.rho[i] - exact).abs() < 1e-6);
            assert_eq!(s.rho[i], s.xi[i]);
        }
    }

    #[test]
    fn velocity_only_data() {
        let grid = Grid::new(64).unwrap();
        let v = grid.sample(|x| x * (1.0 - x));
        let s = riemann_from_physical(&vec![0.0; 65], &v, &grid).unwrap();
        for (i, vi) in v.iter().enumerate() {
            assert_eq!(s.rho[i], *vi);
            assert_eq!(s.xi[i], -vi);
        }
        assert_eq!(s.boundary_defect(), 0.0);
    }

    #[test]
    fn round_trip_recovers_profile() {
        let grid = Grid::new(256).unwrap();
        let s = RiemannState {
            rho: grid.sample(|x| PI * (PI * x).cos()),
            xi: grid.sample(|x| PI * (PI * x).cos()),
            t: 0.0,
        };
        let f = physical_from_riemann(&s, &grid);
        for i in 0..=256 {
            assert!((f.z[i] - (PI * grid.x(i)).sin()).abs() < 1e-3);
            assert_eq!(f.z_t[i], 0.0);
        }
        assert!(f.defect < 1e-3);

        let back = riemann_from_physical(
            &{
                let mut z = f.z.clone();
                z[256] = 0.0;
                z
            },
            &f.z_t,
            &grid,
        )
        .unwrap();
        assert!(back.max_distance(&s) < 1e-3);
    }

    #[test]
    fn opposite_invariants_have_zero_displacement() {
        let grid = Grid::new(32).unwrap();
        let v = grid.sample(|x| (3.0 * x).cos());
        let s = RiemannState {
            rho: v.clone(),
            xi: v.iter().map(|a| -a).collect(),
            t: 0.0,
        };
        let f = physical_from_riemann(&s, &grid);
        assert!(f.z.iter().all(|&z| z == 0.0));
        assert_eq!(f.z_t, v);
    }

    #[test]
    fn zero_state_round_trip() {
        let grid = Grid::new(16).unwrap();
        let f = physical_from_riemann(&RiemannState::zero(&grid), &grid);
        assert!(f.z.iter().chain(&f.z_t).all(|&v| v == 0.0));
    }

    #[test]
    fn input_errors() {
        let grid = Grid::new(16).unwrap();
        assert!(matches!(
            riemann_from_physical(&[0.0; 5], &[0.0; 17], &grid),
            Err(WaveError::DimensionMismatch { .. })
        ));
        let mut z0 = vec![0.0; 17];
        z0[16] = 1e-9;
        assert!(matches!(
            riemann_from_physical(&z0, &[0.0; 17], &grid),
            Err(WaveError::BoundaryViolation { what: "z0", .. })
        ));
    }
}
