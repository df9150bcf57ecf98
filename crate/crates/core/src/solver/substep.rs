use super::DampingRule;
use crate::damping::DampingProfile;
use crate::error::{Result, WaveError};
use crate::grid::Grid;
use crate::nonlinearity::Nonlinearity;
use crate::state::RiemannState;

const NEWTON_MAX_ITER: usize = 50;
const BISECTION_MAX_ITER: usize = 200;
const ROOT_TOL: f64 = 1e-14;

/// One exact advection step of length `dt = dx`: `rho` moves left, `xi`
/// moves right, and the walls reflect the incoming characteristic.
pub fn transport_shift(state: &RiemannState, grid: &Grid) -> RiemannState {
    let mut out = state.clone();
    shift_in_place(&mut out);
    out.t += grid.dx();
    out
}

pub(crate) fn shift_in_place(state: &mut RiemannState) {
    let n = state.rho.len() - 1;
    state.rho.copy_within(1..=n, 0);
    state.xi.copy_within(0..n, 1);
    state.xi[0] = state.rho[0];
    state.rho[n] = state.xi[n];
}

/// Root of `m + c g(m) = u_old` for monotone `g`. Newton from `u_old`,
/// safeguarded by the bracket `[min(0, u_old), max(0, u_old)]`, with a
/// bisection fallback.
pub fn implicit_root(u_old: f64, c: f64, g: &Nonlinearity) -> Result<f64> {
    if c == 0.0 {
        return Ok(u_old);
    }
    if let Some(k) = g.linear_slope() {
        return Ok(u_old / (1.0 + c * k));
    }
    let tol = ROOT_TOL * u_old.abs().max(1.0);
    let residual = |m: f64| m + c * g.value(m) - u_old;
    let (mut lo, mut hi) = (u_old.min(0.0), u_old.max(0.0));
    let bracketed = residual(lo) <= 0.0 && residual(hi) >= 0.0;
    let mut m = u_old;
    for _ in 0..NEWTON_MAX_ITER {
        let r = residual(m);
        if r.abs() <= tol {
            return Ok(m);
        }
        if bracketed {
            if r > 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        let next = m - r / (1.0 + c * g.derivative(m));
        m = if !next.is_finite() || (bracketed && !(lo..=hi).contains(&next)) {
            if !bracketed {
                break;
            }
            0.5 * (lo + hi)
        } else {
            next
        };
    }
    if bracketed {
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            let r = residual(mid);
            if r.abs() <= tol || hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()) {
                return Ok(mid);
            }
            if r > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Err(WaveError::NonConvergence {
        u_old,
        coefficient: c,
    })
}

/// Linear-implicit update for `u' = -a k u` over a substep of length `h`,
/// with `c = h a`.
#[inline]
pub(crate) fn linear_update(u: f64, c: f64, k: f64, rule: DampingRule) -> f64 {
    match rule {
        DampingRule::BackwardEuler => u / (1.0 + c * k),
        DampingRule::ImplicitMidpoint => {
            let m = u / (1.0 + (0.5 * c) * k);
            2.0 * m - u
        }
    }
}

#[inline]
pub(crate) fn nonlinear_update(u: f64, c: f64, g: &Nonlinearity, rule: DampingRule) -> Result<f64> {
    if c == 0.0 || u == 0.0 {
        return Ok(u);
    }
    if let Some(k) = g.linear_slope() {
        return Ok(linear_update(u, c, k, rule));
    }
    match rule {
        DampingRule::BackwardEuler => implicit_root(u, c, g),
        DampingRule::ImplicitMidpoint => Ok(2.0 * implicit_root(u, 0.5 * c, g)? - u),
    }
}

/// Applies `u -> update(i, u)` at every node, keeping `rho + xi` fixed.
#[inline]
pub(crate) fn apply_velocity_update(
    state: &mut RiemannState,
    mut update: impl FnMut(usize, f64) -> Result<f64>,
) -> Result<()> {
    for i in 0..state.rho.len() {
        let u = 0.5 * (state.rho[i] - state.xi[i]);
        let d = update(i, u)? - u;
        state.rho[i] += d;
        state.xi[i] -= d;
    }
    Ok(())
}

/// One backward-Euler step of `u' = -a g(u)` of length `dt_half` at every
/// node, with `s = (rho + xi)/2` held fixed.
pub fn damping_substep(
    state: &RiemannState,
    dt_half: f64,
    a: &DampingProfile,
    g: &Nonlinearity,
    grid: &Grid,
) -> Result<RiemannState> {
    damping_substep_with_rule(state, dt_half, a, g, grid, DampingRule::BackwardEuler)
}

pub fn damping_substep_with_rule(
    state: &RiemannState,
    h: f64,
    a: &DampingProfile,
    g: &Nonlinearity,
    grid: &Grid,
    rule: DampingRule,
) -> Result<RiemannState> {
    grid.check_len(&state.rho)?;
    grid.check_len(&state.xi)?;
    let a = a.sample(grid);
    let mut out = state.clone();
    apply_velocity_update(&mut out, |i, u| nonlinear_update(u, h * a[i], g, rule))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spike(grid: &Grid, i: usize) -> RiemannState {
        let mut s = RiemannState::zero(grid);
        s.rho[i] = 1.0;
        s
    }

    #[test]
    fn shift_moves_rho_left() {
        let grid = Grid::new(16).unwrap();
        let s = transport_shift(&spike(&grid, 5), &grid);
        assert_eq!(s.rho[4], 1.0);
        assert_eq!(s.rho.iter().sum::<f64>(), 1.0);
        assert!(s.xi.iter().all(|&v| v == 0.0));
        assert_eq!(s.t, grid.dx());
        let z = transport_shift(&RiemannState::zero(&grid), &grid);
        assert!(z.rho.iter().chain(&z.xi).all(|&v| v == 0.0));
    }

    #[test]
    fn shift_reflects_at_the_walls() {
        let grid = Grid::new(8).unwrap();
        let s = transport_shift(&spike(&grid, 1), &grid);
        assert_eq!((s.rho[0], s.xi[0]), (1.0, 1.0));
        let mut right = RiemannState::zero(&grid);
        right.xi[7] = 2.0;
        let s = transport_shift(&right, &grid);
        assert_eq!((s.rho[8], s.xi[8]), (2.0, 2.0));
    }

    #[test]
    fn backward_euler_closed_form() {
        let grid = Grid::new(8).unwrap();
        let mut s = RiemannState::zero(&grid);
        s.rho[3] = 1.0;
        s.xi[3] = -1.0;
        let out = damping_substep(
            &s,
            0.1,
            &DampingProfile::constant(1.0),
            &Nonlinearity::identity(),
            &grid,
        )
        .unwrap();
        let u = 0.5 * (out.rho[3] - out.xi[3]);
        assert!((u - 1.0 / 1.1).abs() < 1e-15);
        assert!((u - 0.909091).abs() < 1e-6);
        assert_eq!(out.rho[3] + out.xi[3], 0.0);
        assert_eq!(out.rho[2], 0.0);
    }

    #[test]
    fn newton_matches_linear_closed_form() {
        let g = Nonlinearity::custom("id", |s| s, |_| 1.0);
        for u in [-3.0, -0.1, 0.5, 2.0] {
            let m = implicit_root(u, 0.3, &g).unwrap();
            assert!((m - u / 1.3).abs() < 1e-14);
        }
    }

    #[test]
    fn newton_on_library() {
        for g in Nonlinearity::library() {
            for u in [-50.0, -1.0, -1e-6, 1e-9, 0.3, 7.0, 80.0] {
                for c in [1e-4, 0.01, 0.5, 10.0] {
                    let m = implicit_root(u, c, &g).unwrap();
                    let r = m + c * g.value(m) - u;
                    assert!(r.abs() <= 1e-14 * u.abs().max(1.0) * 4.0, "{g:?} {u} {c}");
                    assert!(m.abs() <= u.abs() && m * u >= 0.0);
                }
            }
        }
    }

    #[test]
    fn stiff_root_falls_back_to_bisection() {
        // g' spikes at the origin, so plain Newton from u_old overshoots.
        let g = Nonlinearity::custom(
            "cbrt",
            |s: f64| s.cbrt(),
            |s: f64| {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    s.abs().powf(-2.0 / 3.0) / 3.0
                }
            },
        );
        let m = implicit_root(1.0, 5.0, &g).unwrap();
        assert!((m + 5.0 * m.cbrt() - 1.0).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn damping_contracts_velocity(u in -100.0f64..100.0, c in 0.0f64..5.0) {
            for g in Nonlinearity::library() {
                for rule in [DampingRule::BackwardEuler, DampingRule::ImplicitMidpoint] {
                    let un = nonlinear_update(u, c, &g, rule).unwrap();
                    prop_assert!(un.abs() <= u.abs() * (1.0 + 1e-15));
                }
            }
        }

        #[test]
        fn damping_preserves_slope(seed in 0u64..1000) {
            let grid = Grid::new(32).unwrap();
            let f = seed as f64 * 0.37;
            let s = RiemannState {
                rho: grid.sample(|x| (f + 9.0 * x).sin() * 4.0),
                xi: grid.sample(|x| (f * 0.5 + 4.0 * x).cos() * 3.0),
                t: 0.0,
            };
            let a = DampingProfile::smooth_indicator(0.4, 1.0, 3.0, 0.1);
            for g in Nonlinearity::library() {
                let out = damping_substep_with_rule(&s, 0.05, &a, &g, &grid, DampingRule::ImplicitMidpoint).unwrap();
                for i in 0..=32 {
                    let before = s.rho[i] + s.xi[i];
                    let after = out.rho[i] + out.xi[i];
                    prop_assert!((before - after).abs() <= 1e-14 * before.abs().max(1.0));
                }
            }
        }
    }
}
