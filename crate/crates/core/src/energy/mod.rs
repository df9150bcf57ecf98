//! Scalar functionals of a state or trajectory: p-energies, dissipation
//! integrals, convex functionals, decay fits and the Sobolev regularity check.

mod fit;
mod sobolev;

pub use fit::{decay_fit, observability_ratio, DecayFit, EnergyReport, DEFAULT_FLOOR_RELATIVE};
pub use sobolev::{sobolev_bound_check, w1p_norm, SobolevCheck};

use crate::damping::DampingProfile;
use crate::error::{Result, WaveError};
use crate::grid::Grid;
use crate::nonlinearity::Nonlinearity;
use crate::powers::{modified_big_g, modified_g, signed_power_unchecked};
use crate::state::RiemannState;
use std::fmt;
use std::sync::Arc;

/// `|x|^p` with exact fast paths for the common integer exponents.
#[inline]
pub fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 4.0 {
        let s = a * a;
        s * s
    } else if p == 3.0 {
        a * a * a
    } else if a == 0.0 {
        0.0
    } else {
        a.powf(p)
    }
}

#[inline]
fn signed_pow(x: f64, r: f64) -> f64 {
    if r == 0.0 {
        if x == 0.0 {
            0.0
        } else {
            x.signum()
        }
    } else {
        signed_power_unchecked(x, r)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(WaveError::Domain(format!("p must be in [1, inf), got {p}")));
    }
    Ok(())
}

/// `E_p = (1/p) int (|rho|^p + |xi|^p) dx` by the trapezoid rule.
pub fn energy_p(state: &RiemannState, p: f64, grid: &Grid) -> Result<f64> {
    check_p(p)?;
    grid.check_len(&state.rho)?;
    grid.check_len(&state.xi)?;
    Ok(energy_unchecked(&state.rho, &state.xi, p, grid))
}

pub(crate) fn energy_unchecked(rho: &[f64], xi: &[f64], p: f64, grid: &Grid) -> f64 {
    grid.trapezoid_by(|i| abs_pow(rho[i], p) + abs_pow(xi[i], p)) / p
}

/// `-int damping(i, u_i) (sgn-power(rho, p-1) - sgn-power(xi, p-1)) dx`, where
/// `damping(i, u)` is the source term at node `i` for velocity `u`.
pub fn dissipation_with(
    state: &RiemannState,
    p: f64,
    grid: &Grid,
    damping: impl Fn(usize, f64) -> f64,
) -> f64 {
    let r = p - 1.0;
    -grid.trapezoid_by(|i| {
        let (rho, xi) = (state.rho[i], state.xi[i]);
        let src = damping(i, 0.5 * (rho - xi));
        if src == 0.0 {
            0.0
        } else {
            src * (signed_pow(rho, r) - signed_pow(xi, r))
        }
    })
}

/// `dE_p/dt = -int a g((rho - xi)/2) (sgn-power(rho, p-1) - sgn-power(xi, p-1)) dx`.
pub fn dissipation_rate(
    state: &RiemannState,
    p: f64,
    a: &DampingProfile,
    g: &Nonlinearity,
    grid: &Grid,
) -> f64 {
    let a = a.sample(grid);
    dissipation_with(state, p, grid, |i, u| a[i] * g.value(u))
}

/// Dissipation of the linear problem with coefficient `a theta`.
pub fn aux_dissipation_rate(
    state: &RiemannState,
    p: f64,
    a: &[f64],
    theta: &[f64],
    grid: &Grid,
) -> f64 {
    dissipation_with(state, p, grid, |i, u| a[i] * theta[i] * u)
}

/// Convex `F` with `F(0) = 0` and its derivative.
#[derive(Clone)]
pub struct ConvexFunctional {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    f_prime: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl fmt::Debug for ConvexFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFunctional")
            .field("label", &self.label)
            .finish()
    }
}

impl ConvexFunctional {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            f_prime: Arc::new(f_prime),
            label: label.into(),
        }
    }

    /// `F = |.|^p / p`, `F' = sgn-power(., p-1)`.
    pub fn power(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self::new(
            format!("|y|^{p}/{p}"),
            move |y| abs_pow(y, p) / p,
            move |y| signed_pow(y, p - 1.0),
        ))
    }

    /// The modified primitive `G` for 1 < p < 2, with `G' = g`.
    pub fn modified(p: f64) -> Result<Self> {
        if !(p > 1.0 && p < 2.0) {
            return Err(WaveError::Domain(format!(
                "modified functional requires 1 < p < 2, got {p}"
            )));
        }
        Ok(Self::new(
            format!("G_{p}"),
            move |y| modified_big_g(y, p),
            move |y| modified_g(y, p),
        ))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn value(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    #[inline]
    pub fn derivative(&self, y: f64) -> f64 {
        (self.f_prime)(y)
    }

    /// Lattice check on [-10, 10]: `F(0) = 0`, second differences `>= -1e-12`
    /// and `F'` within `1e-6 (1 + |F'|)` of central differences.
    pub fn check(&self) -> Result<()> {
        let fail = |detail: String| {
            Err(WaveError::Hypothesis {
                hypothesis: "convexity",
                detail: format!("F = {}: {detail}", self.label),
            })
        };
        if self.value(0.0) != 0.0 {
            return fail(format!("F(0) = {}", self.value(0.0)));
        }
        let h = 1e-2;
        for k in -1000..=1000 {
            let y = k as f64 * h;
            let second = self.value(y + h) - 2.0 * self.value(y) + self.value(y - h);
            if second < -1e-12 {
                return fail(format!("second difference {second:e} at y = {y}"));
            }
            let e = 1e-6;
            let fd = (self.value(y + e) - self.value(y - e)) / (2.0 * e);
            let d = self.derivative(y);
            if (fd - d).abs() > 1e-6 * (1.0 + d.abs()) {
                return fail(format!("F'({y}) = {d} but central difference gives {fd}"));
            }
        }
        Ok(())
    }
}

/// `Phi = int (F(rho) + F(xi)) dx`.
pub fn phi_functional(state: &RiemannState, f: &ConvexFunctional, grid: &Grid) -> f64 {
    grid.trapezoid_by(|i| f.value(state.rho[i]) + f.value(state.xi[i]))
}

/// `-int a g((rho - xi)/2) (F'(rho) - F'(xi)) dx`.
pub fn phi_dissipation(
    state: &RiemannState,
    f: &ConvexFunctional,
    a: &DampingProfile,
    g: &Nonlinearity,
    grid: &Grid,
) -> f64 {
    let a = a.sample(grid);
    -grid.trapezoid_by(|i| {
        let (rho, xi) = (state.rho[i], state.xi[i]);
        a[i] * g.value(0.5 * (rho - xi)) * (f.derivative(rho) - f.derivative(xi))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powers::modified_fg;
    use std::f64::consts::PI;

    fn constant_state(grid: &Grid, rho: f64, xi: f64) -> RiemannState {
        RiemannState {
            rho: vec![rho; grid.n_nodes()],
            xi: vec![xi; grid.n_nodes()],
            t: 0.0,
        }
    }

    #[test]
    fn energy_examples() {
        let grid = Grid::new(256).unwrap();
        assert_eq!(
            energy_p(&RiemannState::zero(&grid), 2.0, &grid).unwrap(),
            0.0
        );
        assert!(
            (energy_p(&constant_state(&grid, 1.0, 1.0), 1.0, &grid).unwrap() - 2.0).abs() < 1e-14
        );
        let c = grid.sample(|x| PI * (PI * x).cos());
        let s = RiemannState {
            rho: c.clone(),
            xi: c,
            t: 0.0,
        };
        let e = energy_p(&s, 2.0, &grid).unwrap();
        assert!((e - PI * PI / 2.0).abs() < 1e-6, "{e}");
        assert!(energy_p(&s, 0.5, &grid).is_err());
    }

    #[test]
    fn dissipation_examples() {
        let grid = Grid::new(128).unwrap();
        let s = constant_state(&grid, 2.0, 0.0);
        let g = Nonlinearity::identity();
        let d = dissipation_rate(&s, 2.0, &DampingProfile::constant(1.0), &g, &grid);
        assert!((d + 2.0).abs() < 1e-14);
        assert_eq!(
            dissipation_rate(&s, 2.0, &DampingProfile::zero(), &g, &grid),
            0.0
        );
    }

    #[test]
    fn dissipation_is_nonpositive_for_monotone_g() {
        let grid = Grid::new(64).unwrap();
        let s = RiemannState {
            rho: grid.sample(|x| (7.0 * x).sin() * 3.0),
            xi: grid.sample(|x| (3.0 * x).cos() - 0.5),
            t: 0.0,
        };
        let a = DampingProfile::smooth_indicator(0.3, 1.0, 2.0, 0.1);
        for g in Nonlinearity::library() {
            for p in [1.0, 1.5, 2.0, 3.0, 4.0] {
                assert!(dissipation_rate(&s, p, &a, &g, &grid) <= 0.0);
            }
        }
    }

    #[test]
    fn phi_reduces_to_energy_and_dissipation() {
        let grid = Grid::new(64).unwrap();
        let s = RiemannState {
            rho: grid.sample(|x| (5.0 * x).sin()),
            xi: grid.sample(|x| x * x - 0.3),
            t: 0.0,
        };
        let f = ConvexFunctional::power(2.0).unwrap();
        let e = energy_p(&s, 2.0, &grid).unwrap();
        assert!((phi_functional(&s, &f, &grid) - e).abs() < 1e-14);
        let a = DampingProfile::constant(0.7);
        let g = Nonlinearity::arctan();
        let d1 = phi_dissipation(&s, &f, &a, &g, &grid);
        let d2 = dissipation_rate(&s, 2.0, &a, &g, &grid);
        assert!((d1 - d2).abs() < 1e-14);
        assert_eq!(phi_functional(&RiemannState::zero(&grid), &f, &grid), 0.0);
        assert_eq!(
            phi_dissipation(&s, &f, &DampingProfile::zero(), &g, &grid),
            0.0
        );
    }

    #[test]
    fn shipped_functionals_are_convex() {
        for p in [1.0, 1.5, 2.0, 4.0] {
            ConvexFunctional::power(p).unwrap().check().unwrap();
        }
        for p in [1.1, 1.5, 1.9] {
            let f = ConvexFunctional::modified(p).unwrap();
            f.check().unwrap();
            assert_eq!(f.value(0.7), modified_fg(0.7, p).unwrap().1);
        }
        let concave = ConvexFunctional::new("-y^2", |y| -y * y, |y| -2.0 * y);
        assert!(concave.check().is_err());
    }

    #[test]
    fn modified_primitive_is_quadratic_on_the_unit_ball() {
        // G(y) / y^2 between positive constants on 0 < |y| <= 1; G(y) / |y|^p
        // bounded above there but tending to 0 at the origin.
        for p in [1.2, 1.5, 1.8] {
            let (mut lo, mut hi, mut hi_p) = (f64::INFINITY, 0.0f64, 0.0f64);
            for k in 1..=10_000 {
                let y = k as f64 / 10_000.0;
                let big_g = modified_fg(-y, p).unwrap().1;
                lo = lo.min(big_g / (y * y));
                hi = hi.max(big_g / (y * y));
                hi_p = hi_p.max(big_g / y.powf(p));
            }
            let g1 = modified_fg(1.0, p).unwrap().1;
            assert!((lo - g1).abs() < 1e-12, "p = {p}");
            assert!(hi <= (p - 1.0) / 2.0 + 1e-12);
            assert!(hi_p <= (p - 1.0) / 2.0 + 1e-12);
        }
    }
}
