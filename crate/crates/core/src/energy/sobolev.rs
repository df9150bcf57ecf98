use super::abs_pow;
use crate::error::{Result, WaveError};
use crate::grid::Grid;
use crate::solver::DerivativeRun;
use serde::{Deserialize, Serialize};

/// Slack on the monotonicity of `E_p(w)`.
pub const W_ENERGY_SLACK: f64 = 1e-10;

/// `(int |f|^p + int |f'|^p)^(1/p)`, with `f'` from the grid derivative.
pub fn w1p_norm(f: &[f64], p: f64, grid: &Grid) -> f64 {
    let df = grid.derivative(f);
    grid.trapezoid_by(|i| abs_pow(f[i], p) + abs_pow(df[i], p))
        .powf(1.0 / p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevCheck {
    pub p: f64,
    /// `(p E_p(w)(0))^(1/p)`.
    pub c_p: f64,
    /// Largest `||z_t||_{W^{1,p}}` over the recorded times.
    pub max_w1p: f64,
    /// Largest `E_p(w)(t) - E_p(w)(0)`.
    pub max_w_energy_excess: f64,
    /// Largest `||z_t||_inf - (||z_t||_p + ||z_t'||_p)`.
    pub max_embedding_excess: f64,
    pub satisfied: bool,
}

/// Checks `||z_t(t)||_{W^{1,p}} <= (p E_p(w)(0))^(1/p)`, the monotonicity of
/// `E_p(w)` and the embedding bound `||z_t||_inf <= ||z_t||_p + ||z_t'||_p` at
/// every recorded time.
pub fn sobolev_bound_check(run: &DerivativeRun, p: f64) -> Result<SobolevCheck> {
    let w_energy = run.w.energy_series(p)?;
    let base = &run.base;
    if base.states.len() != base.times.len() {
        return Err(WaveError::Invalid(
            "the base trajectory of a derivative run must keep its states".into(),
        ));
    }
    let grid = &base.grid;
    let e0 = w_energy[0].1;
    let c_p = (p * e0).powf(1.0 / p);
    let mut max_w1p = 0.0f64;
    let mut max_embedding_excess = f64::NEG_INFINITY;
    for state in &base.states {
        let zt = state.velocity();
        let dzt = grid.derivative(&zt);
        let lp = grid.lp_norm(&zt, p);
        let dlp = grid.lp_norm(&dzt, p);
        let w1p = (lp.powf(p) + dlp.powf(p)).powf(1.0 / p);
        max_w1p = max_w1p.max(w1p);
        let sup = zt.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        max_embedding_excess = max_embedding_excess.max(sup - (lp + dlp));
    }
    let max_w_energy_excess = w_energy
        .iter()
        .map(|&(_, e)| e - e0)
        .fold(f64::NEG_INFINITY, f64::max);
    let satisfied = max_w1p <= c_p * (1.0 + 1e-12)
        && max_w_energy_excess <= W_ENERGY_SLACK
        && max_embedding_excess <= 1e-12;
    Ok(SobolevCheck {
        p,
        c_p,
        max_w1p,
        max_w_energy_excess,
        max_embedding_excess,
        satisfied,
    })
}
