use crate::error::{Result, WaveError};
use crate::solver::Trajectory;
use serde::{Deserialize, Serialize};

/// Default fit floor relative to `E_p(0)`.
pub const DEFAULT_FLOOR_RELATIVE: f64 = 1e-13;

/// Minimum number of samples a fit window must retain.
pub const MIN_FIT_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_points: usize,
}

/// Least squares of `log E` against `t` over `window`, dropping samples at or
/// below `floor`. `rate` is minus the slope.
pub fn decay_fit(series: &[(f64, f64)], window: (f64, f64), floor: f64) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(WaveError::Window(format!("empty fit window [{lo}, {hi}]")));
    }
    let slack = 1e-9 * hi.abs().max(1.0);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, e)| *t >= lo - slack && *t <= hi + slack && *e > floor)
        .map(|&(t, e)| (t, e.ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(WaveError::Window(format!(
            "fit window [{lo}, {hi}] keeps {} points above floor {floor:e}, need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let ss_res: f64 = pts
        .iter()
        .map(|&(t, y)| {
            let r = y - intercept - slope * t;
            r * r
        })
        .sum();
    let r2 = if syy <= f64::MIN_POSITIVE {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(DecayFit {
        rate: -slope,
        intercept,
        r2,
        n_points: pts.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub p: f64,
    pub series: Vec<(f64, f64)>,
    pub dissipation_series: Vec<(f64, f64)>,
    pub fitted_rate: f64,
    pub fit_r2: f64,
    pub fit_intercept: f64,
    pub fit_window: (f64, f64),
}

impl EnergyReport {
    /// Fits on `window` with floor `floor_relative * E_p(0)`.
    pub fn from_trajectory(
        traj: &Trajectory,
        p: f64,
        window: (f64, f64),
        floor_relative: f64,
    ) -> Result<Self> {
        let series = traj.energy_series(p)?;
        let dissipation_series = traj.dissipation_series(p)?;
        let floor = floor_relative * series[0].1;
        let fit = decay_fit(&series, window, floor)?;
        Ok(Self {
            p,
            series,
            dissipation_series,
            fitted_rate: fit.rate,
            fit_r2: fit.r2,
            fit_intercept: fit.intercept,
            fit_window: window,
        })
    }

    /// Largest increase between consecutive samples (0 for a monotone series).
    pub fn max_increase(&self) -> f64 {
        self.series
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(0.0, f64::max)
    }
}

/// `int_s^t E_p dt / E_p(s)` over the recorded samples.
pub fn observability_ratio(traj: &Trajectory, p: f64, s: f64, t: f64) -> Result<f64> {
    if !(0.0 <= s && s < t) {
        return Err(WaveError::Window(format!(
            "need 0 <= s < t, got [{s}, {t}]"
        )));
    }
    let series = traj.energy_series(p)?;
    let i0 = traj
        .record_index_at(s)
        .ok_or_else(|| WaveError::Window(format!("no record at s = {s}")))?;
    let i1 = traj
        .record_index_at(t)
        .ok_or_else(|| WaveError::Window(format!("no record at t = {t}")))?;
    let e_s = series[i0].1;
    let floor = DEFAULT_FLOOR_RELATIVE * series[0].1;
    if !(e_s > floor) {
        return Err(WaveError::Window(format!(
            "E_p(s) = {e_s:e} at s = {s} is at or below the floor {floor:e}"
        )));
    }
    let integral: f64 = series[i0..=i1]
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    Ok(integral / e_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(rate: f64, noise: impl Fn(usize) -> f64) -> Vec<(f64, f64)> {
        (0..=200)
            .map(|k| {
                let t = k as f64 * 0.1;
                (t, (-rate * t).exp() * noise(k))
            })
            .collect()
    }

    #[test]
    fn exact_exponential() {
        let fit = decay_fit(&synthetic(3.0, |_| 1.0), (0.0, 20.0), 0.0).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-10);
        assert!((fit.r2 - 1.0).abs() < 1e-10);
        assert!(fit.intercept.abs() < 1e-10);
    }

    #[test]
    fn constant_series_has_zero_rate() {
        let fit = decay_fit(&synthetic(0.0, |_| 1.0), (0.0, 20.0), 0.0).unwrap();
        assert_eq!(fit.rate, 0.0);
    }

    #[test]
    fn noisy_planted_rates() {
        use std::f64::consts::PI;
        // bounded quasi-random multiplicative noise of amplitude 1%
        let noise = |k: usize| 1.0 + 0.01 * (k as f64 * 2.399_963).sin();
        for rate in [0.2, 0.5, 1.0, PI] {
            let fit = decay_fit(&synthetic(rate, noise), (0.0, 20.0), 0.0).unwrap();
            assert!(
                (fit.rate - rate).abs() <= 0.02 * rate,
                "{rate}: {}",
                fit.rate
            );
        }
    }

    #[test]
    fn floor_filtering_can_empty_the_window() {
        let s = synthetic(3.0, |_| 1.0);
        assert!(decay_fit(&s, (0.0, 20.0), 1.0).is_err());
        assert!(decay_fit(&s, (5.0, 5.0), 0.0).is_err());
        assert!(decay_fit(&s[..5], (0.0, 20.0), 0.0).is_err());
    }
}
