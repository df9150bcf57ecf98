use crate::error::{Result, WaveError};
use crate::grid::Grid;
use crate::state::RiemannState;
use serde::{Deserialize, Serialize};

/// Recorded output of a run. Diagnostics are indexed `[p index][record]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: Grid,
    pub dt: f64,
    pub n_steps: usize,
    pub record_every: usize,
    pub p_values: Vec<f64>,
    pub times: Vec<f64>,
    /// Recorded states; empty when the scenario does not keep them.
    pub states: Vec<RiemannState>,
    pub energies: Vec<Vec<f64>>,
    pub dissipation: Vec<Vec<f64>>,
    pub max_zt: Vec<f64>,
    /// `||z_t||_{W^{1,p}}` for the first exponent of `p_values`.
    pub w1p_zt: Vec<f64>,
}

impl Trajectory {
    pub(crate) fn new(grid: Grid, n_steps: usize, record_every: usize, p_values: Vec<f64>) -> Self {
        let np = p_values.len();
        Self {
            grid,
            dt: grid.dx(),
            n_steps,
            record_every,
            p_values,
            times: Vec::new(),
            states: Vec::new(),
            energies: vec![Vec::new(); np],
            dissipation: vec![Vec::new(); np],
            max_zt: Vec::new(),
            w1p_zt: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_final(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn p_index(&self, p: f64) -> Result<usize> {
        self.p_values
            .iter()
            .position(|&q| (q - p).abs() <= 1e-12 * p.abs().max(1.0))
            .ok_or_else(|| {
                WaveError::Invalid(format!(
                    "p = {p} was not recorded (recorded: {:?})",
                    self.p_values
                ))
            })
    }

    pub fn energy_series(&self, p: f64) -> Result<Vec<(f64, f64)>> {
        let k = self.p_index(p)?;
        Ok(self
            .times
            .iter()
            .copied()
            .zip(self.energies[k].iter().copied())
            .collect())
    }

    pub fn dissipation_series(&self, p: f64) -> Result<Vec<(f64, f64)>> {
        let k = self.p_index(p)?;
        Ok(self
            .times
            .iter()
            .copied()
            .zip(self.dissipation[k].iter().copied())
            .collect())
    }

    /// Index of the record at time `t`, if one lies within `dt / 2`.
    pub fn record_index_at(&self, t: f64) -> Option<usize> {
        let k = self.times.partition_point(|&s| s < t - 0.5 * self.dt);
        (k < self.times.len() && (self.times[k] - t).abs() <= 0.5 * self.dt).then_some(k)
    }

    /// Column names: `E_p{p}` for each p, `dEdt_p{p}` for each p, `max_zt`,
    /// `W1p_zt`.
    pub fn diagnostic_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.p_values.iter().map(|p| format!("E_p{p}")).collect();
        names.extend(self.p_values.iter().map(|p| format!("dEdt_p{p}")));
        names.push("max_zt".into());
        names.push("W1p_zt".into());
        names
    }

    /// Diagnostic values at record `k`, in the order of [`Self::diagnostic_names`].
    pub fn diagnostic_row(&self, k: usize) -> Vec<f64> {
        let mut row: Vec<f64> = self.energies.iter().map(|e| e[k]).collect();
        row.extend(self.dissipation.iter().map(|d| d[k]));
        row.push(self.max_zt[k]);
        row.push(self.w1p_zt[k]);
        row
    }

    pub fn state_at(&self, t: f64) -> Option<&RiemannState> {
        let k = self.record_index_at(t)?;
        self.states.get(k)
    }
}
