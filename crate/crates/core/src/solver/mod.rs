//! Time integration of the Riemann-invariant system: exact transport at unit
//! CFL (`dt = dx`) composed with an implicit damping substep.

mod run;
mod substep;
mod theta;
mod trajectory;

pub use run::{
    derivative_initial_state, run_auxiliary, run_derivative_system, run_simulation, step,
    DerivativeRun,
};
pub use substep::{damping_substep, damping_substep_with_rule, implicit_root, transport_shift};
pub use theta::ThetaField;
pub use trajectory::Trajectory;

use crate::damping::DampingProfile;
use crate::error::{Result, WaveError};
use crate::grid::Grid;
use crate::nonlinearity::Nonlinearity;
use crate::powers::PExponent;
use crate::profiles::InitialData;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    /// Damping over `dt`, then transport.
    Lie,
    /// Half damping, transport, half damping.
    #[default]
    Strang,
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Splitting::Lie => "lie",
            Splitting::Strang => "strang",
        })
    }
}

impl FromStr for Splitting {
    type Err = WaveError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lie" => Ok(Splitting::Lie),
            "strang" => Ok(Splitting::Strang),
            other => Err(WaveError::Invalid(format!(
                "unknown splitting '{other}', expected lie or strang"
            ))),
        }
    }
}

/// Time discretization of the damping ODE `u' = -a g(u)` over one substep
/// of length `h`, with `c = h a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DampingRule {
    /// `u_new + c g(u_new) = u_old`. First order.
    BackwardEuler,
    /// `m + (c/2) g(m) = u_old`, `u_new = 2m - u_old`. Second order; still
    /// `|u_new| <= |u_old|` for monotone `g`.
    #[default]
    ImplicitMidpoint,
}

impl fmt::Display for DampingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DampingRule::BackwardEuler => "backward_euler",
            DampingRule::ImplicitMidpoint => "implicit_midpoint",
        })
    }
}

impl FromStr for DampingRule {
    type Err = WaveError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "backward_euler" => Ok(DampingRule::BackwardEuler),
            "implicit_midpoint" => Ok(DampingRule::ImplicitMidpoint),
            other => Err(WaveError::Invalid(format!(
                "unknown damping rule '{other}', expected backward_euler or implicit_midpoint"
            ))),
        }
    }
}

/// Monotonicity slack per step, relative to `max(1, E_p(0))`.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub grid: Grid,
    pub t_final: f64,
    pub p_list: Vec<PExponent>,
    pub g: Nonlinearity,
    pub a: DampingProfile,
    pub initial: InitialData,
    pub splitting: Splitting,
    pub damping_rule: DampingRule,
    pub record_every: usize,
    /// Keep the recorded states in the trajectory.
    pub keep_states: bool,
    /// Abort on an increase of any `E_p` beyond [`MONOTONE_SLACK`].
    pub check_monotone: bool,
}

impl Scenario {
    /// Scenario with the default time horizon 20, exponents {1.5, 2, 4},
    /// Strang splitting, recording every step.
    pub fn new(
        name: impl Into<String>,
        grid: Grid,
        g: Nonlinearity,
        a: DampingProfile,
        initial: InitialData,
    ) -> Self {
        Self {
            name: name.into(),
            grid,
            t_final: 20.0,
            p_list: [1.5, 2.0, 4.0]
                .iter()
                .map(|&p| PExponent::new(p).expect("valid default exponent"))
                .collect(),
            g,
            a,
            initial,
            splitting: Splitting::Strang,
            damping_rule: DampingRule::ImplicitMidpoint,
            record_every: 1,
            keep_states: true,
            check_monotone: true,
        }
    }

    pub fn with_t_final(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    pub fn with_p_list(mut self, ps: &[f64]) -> Result<Self> {
        self.p_list = ps
            .iter()
            .map(|&p| PExponent::new(p))
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn with_splitting(mut self, splitting: Splitting) -> Self {
        self.splitting = splitting;
        self
    }

    pub fn with_damping_rule(mut self, rule: DampingRule) -> Self {
        self.damping_rule = rule;
        self
    }

    pub fn with_record_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }

    pub fn with_keep_states(mut self, keep: bool) -> Self {
        self.keep_states = keep;
        self
    }

    pub fn dt(&self) -> f64 {
        self.grid.dx()
    }

    /// Number of unit-CFL steps: `t_final / dt` rounded to the nearest integer.
    pub fn n_steps(&self) -> usize {
        (self.t_final * self.grid.n_cells() as f64).round() as usize
    }

    /// The time actually reached, `n_steps * dt`.
    pub fn t_final_effective(&self) -> f64 {
        self.n_steps() as f64 / self.grid.n_cells() as f64
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.p_list.iter().map(PExponent::p).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(WaveError::Invalid(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if self.n_steps() == 0 {
            return Err(WaveError::Invalid(format!(
                "t_final = {} is shorter than one step",
                self.t_final
            )));
        }
        if self.p_list.is_empty() {
            return Err(WaveError::Invalid("p_list is empty".into()));
        }
        if self.record_every == 0 {
            return Err(WaveError::Invalid("record_every must be >= 1".into()));
        }
        self.a.check_nonnegative()?;
        self.initial.validate(&self.grid)
    }
}
