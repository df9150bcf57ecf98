use super::substep::{apply_velocity_update, linear_update, nonlinear_update, shift_in_place};
use super::theta::ThetaField;
use super::trajectory::Trajectory;
use super::{Scenario, Splitting, MONOTONE_SLACK};
use crate::energy::{dissipation_with, energy_unchecked, w1p_norm};
use crate::error::{Result, WaveError};
use crate::state::RiemannState;

/// One full step (damping and transport) of the nonlinear problem.
pub fn step(state: &RiemannState, scenario: &Scenario) -> Result<RiemannState> {
    let grid = &scenario.grid;
    grid.check_len(&state.rho)?;
    grid.check_len(&state.xi)?;
    let a = scenario.a.sample(grid);
    let mut out = state.clone();
    advance(&mut out, scenario, 0, &mut |s, _, _, h| {
        apply_velocity_update(s, |i, u| {
            nonlinear_update(u, h * a[i], &scenario.g, scenario.damping_rule)
        })
    })?;
    out.t = state.t + grid.dx();
    Ok(out)
}

type Damp<'a> = dyn FnMut(&mut RiemannState, usize, f64, f64) -> Result<()> + 'a;

/// Splits step `n` into damping substeps and transport. The damping callback
/// receives the step index, the substep midpoint as a fraction of `dt`, and
/// the substep length.
fn advance(state: &mut RiemannState, scenario: &Scenario, n: usize, damp: &mut Damp) -> Result<()> {
    let dt = scenario.dt();
    match scenario.splitting {
        Splitting::Strang => {
            damp(state, n, 0.25, 0.5 * dt)?;
            shift_in_place(state);
            damp(state, n, 0.75, 0.5 * dt)?;
        }
        Splitting::Lie => {
            damp(state, n, 0.5, dt)?;
            shift_in_place(state);
        }
    }
    Ok(())
}

fn energies(state: &RiemannState, scenario: &Scenario, out: &mut [f64]) {
    for (e, p) in out.iter_mut().zip(&scenario.p_list) {
        *e = energy_unchecked(&state.rho, &state.xi, p.p(), &scenario.grid);
    }
}

/// Shared time loop: records diagnostics, checks monotonicity of every
/// `E_p`, and calls `on_step` with each new state.
fn integrate(
    scenario: &Scenario,
    mut state: RiemannState,
    damp: &mut Damp,
    rate: &dyn Fn(&RiemannState, usize, f64) -> Result<f64>,
    on_step: &mut dyn FnMut(usize, &RiemannState),
) -> Result<Trajectory> {
    scenario.validate()?;
    let grid = scenario.grid;
    let n_steps = scenario.n_steps();
    let n_cells = grid.n_cells() as f64;
    let mut traj = Trajectory::new(grid, n_steps, scenario.record_every, scenario.p_values());
    let np = scenario.p_list.len();
    let p_first = scenario.p_list[0].p();

    let record = |traj: &mut Trajectory, state: &RiemannState, e: &[f64], n: usize| -> Result<()> {
        traj.times.push(state.t);
        for (k, p) in scenario.p_list.iter().enumerate() {
            traj.energies[k].push(e[k]);
            traj.dissipation[k].push(rate(state, n, p.p())?);
        }
        let zt = state.velocity();
        traj.max_zt
            .push(zt.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        traj.w1p_zt.push(w1p_norm(&zt, p_first, &grid));
        if scenario.keep_states {
            traj.states.push(state.clone());
        }
        Ok(())
    };

    state.t = 0.0;
    let mut e_prev = vec![0.0; np];
    energies(&state, scenario, &mut e_prev);
    let e0 = e_prev.clone();
    let mut e_now = vec![0.0; np];
    record(&mut traj, &state, &e_prev, 0)?;
    on_step(0, &state);

    for n in 0..n_steps {
        advance(&mut state, scenario, n, damp)?;
        state.t = (n + 1) as f64 / n_cells;
        on_step(n + 1, &state);
        let due = (n + 1) % scenario.record_every == 0 || n + 1 == n_steps;
        if scenario.check_monotone || due {
            energies(&state, scenario, &mut e_now);
        }
        if scenario.check_monotone {
            for k in 0..np {
                let slack = MONOTONE_SLACK * e0[k].max(1.0);
                if !(e_now[k] <= e_prev[k] + slack) {
                    return Err(WaveError::Monotonicity {
                        p: scenario.p_list[k].p(),
                        t: state.t,
                        before: e_prev[k],
                        after: e_now[k],
                        slack,
                        dump: format!(
                            "scenario '{}', step {} of {}, g = {}, a = {}, N = {}, max|z_t| = {:e}, wall defect = {:e}",
                            scenario.name,
                            n + 1,
                            n_steps,
                            scenario.g.label(),
                            scenario.a.label(),
                            grid.n_cells(),
                            state.velocity().iter().fold(0.0f64, |m, v| m.max(v.abs())),
                            state.boundary_defect()
                        ),
                    });
                }
            }
            std::mem::swap(&mut e_prev, &mut e_now);
            if due {
                record(&mut traj, &state, &e_prev, n + 1)?;
            }
        } else if due {
            record(&mut traj, &state, &e_now, n + 1)?;
        }
    }
    Ok(traj)
}

fn simulate_observed(
    scenario: &Scenario,
    on_step: &mut dyn FnMut(usize, &RiemannState),
) -> Result<Trajectory> {
    scenario.validate()?;
    let grid = scenario.grid;
    let init = scenario.initial.riemann(&grid)?;
    let a = scenario.a.sample(&grid);
    let g = &scenario.g;
    let rule = scenario.damping_rule;
    let mut damp = |s: &mut RiemannState, _: usize, _: f64, h: f64| {
        apply_velocity_update(s, |i, u| nonlinear_update(u, h * a[i], g, rule))
    };
    let rate = |s: &RiemannState, _: usize, p: f64| {
        Ok(dissipation_with(s, p, &grid, |i, u| a[i] * g.value(u)))
    };
    integrate(scenario, init, &mut damp, &rate, on_step)
}

/// Integrates `z_tt - z_xx + a g(z_t) = 0` up to `t_final`, checking after
/// every step that no `E_p` increases beyond the slack.
pub fn run_simulation(scenario: &Scenario) -> Result<Trajectory> {
    simulate_observed(scenario, &mut |_, _| {})
}

fn run_linear(scenario: &Scenario, init: RiemannState, theta: &ThetaField) -> Result<Trajectory> {
    scenario.validate()?;
    let grid = scenario.grid;
    theta.check_coverage(scenario.n_steps(), &grid)?;
    let a = scenario.a.sample(&grid);
    let rule = scenario.damping_rule;
    let mut buf = vec![0.0; grid.n_nodes()];
    let mut damp = |s: &mut RiemannState, n: usize, frac: f64, h: f64| {
        theta.sample_into(n, frac, &grid, &mut buf)?;
        apply_velocity_update(s, |i, u| Ok(linear_update(u, h * a[i], buf[i], rule)))
    };
    let rate = |s: &RiemannState, n: usize, p: f64| {
        let th = theta.value_at_step(n, 0.0, &grid)?;
        Ok(dissipation_with(s, p, &grid, |i, u| a[i] * th[i] * u))
    };
    integrate(scenario, init, &mut damp, &rate, &mut |_, _| {})
}

/// Integrates the linear problem `y_tt - y_xx + a theta y_t = 0` with the
/// scenario's grid, initial data and splitting; `g` is not used.
pub fn run_auxiliary(scenario: &Scenario, theta: &ThetaField) -> Result<Trajectory> {
    let init = scenario.initial.riemann(&scenario.grid)?;
    run_linear(scenario, init, theta)
}

/// Riemann invariants `(w_x + w_t, w_x - w_t)` of the derivative system at
/// `t = 0`: `w = z1`, `w_t = z0'' - a g(z1)`, with `w_t` set to zero at the
/// walls.
pub fn derivative_initial_state(scenario: &Scenario) -> Result<RiemannState> {
    let grid = scenario.grid;
    let data = scenario.initial.sample(&grid)?;
    let a = scenario.a.sample(&grid);
    let g = &scenario.g;
    let n = grid.n_cells();
    let mut w_t: Vec<f64> = (0..=n)
        .map(|i| data.z0_xx[i] - a[i] * g.value(data.z1[i]))
        .collect();
    w_t[0] = 0.0;
    w_t[n] = 0.0;
    Ok(RiemannState {
        rho: (0..=n).map(|i| data.z1_x[i] + w_t[i]).collect(),
        xi: (0..=n).map(|i| data.z1_x[i] - w_t[i]).collect(),
        t: 0.0,
    })
}

/// Base run together with the system satisfied by `w = z_t`.
#[derive(Debug, Clone)]
pub struct DerivativeRun {
    pub base: Trajectory,
    /// Trajectory of `(w_x + w_t, w_x - w_t)`; its energies are `E_p(w)`.
    pub w: Trajectory,
}

/// Co-integrates the base problem and `w_tt - w_xx + a g'(z_t) w_t = 0` with
/// `w(0) = z1`, `w_t(0) = z0'' - a g(z1)`. The coefficient `g'(z_t)` is taken
/// from the base run at every step and interpolated in time like a recorded
/// theta. The wall values of `w_t(0)` are set to zero.
pub fn run_derivative_system(scenario: &Scenario) -> Result<DerivativeRun> {
    let mut base_scenario = scenario.clone();
    base_scenario.keep_states = true;
    let mut coefficient = Vec::with_capacity(scenario.n_steps() + 1);
    let g = &scenario.g;
    let base = simulate_observed(&base_scenario, &mut |_, s| {
        coefficient.push(
            s.velocity()
                .iter()
                .map(|&u| g.derivative(u))
                .collect::<Vec<_>>(),
        );
    })?;
    let theta = ThetaField::recorded_nonnegative(coefficient)?;

    let init = derivative_initial_state(scenario)?;
    let w = run_linear(scenario, init, &theta)?;
    Ok(DerivativeRun { base, w })
}
