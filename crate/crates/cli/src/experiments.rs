//! Experiment drivers. Each scenario runs independently and yields an
//! [`Outcome`]: the trajectory for the CSV, a JSON summary and the assertions
//! that decide the exit code.

use crate::config::{ExperimentKind, ExperimentSuite, ScenarioSpec, SuiteOptions};
use crate::error::Result;
use rayon::prelude::*;
use serde::Serialize;
use wavelab_core::energy::{energy_p, observability_ratio, EnergyReport, DEFAULT_FLOOR_RELATIVE};
use wavelab_core::multipliers::{multiplier_terms, Coefficient, MultiplierReport};
use wavelab_core::nonlinearity::nu_bounds;
use wavelab_core::solver::{derivative_initial_state, MONOTONE_SLACK};
use wavelab_core::{
    make_localization, nu_ratio, run_auxiliary, run_simulation, Scenario, ThetaField, Trajectory,
    WaveError,
};

/// Relative slack when comparing realized theta extremes with the sampled
/// sandwich `[nu_1(M), nu_2(M)]`.
pub const THETA_BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub p: f64,
    pub window: (f64, f64),
    pub fitted_rate: Option<f64>,
    pub r2: Option<f64>,
    pub intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservabilitySummary {
    pub p: f64,
    pub s: f64,
    pub t: f64,
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaSummary {
    /// `max |z_t|` over the run.
    pub m: f64,
    /// Extremes of the recorded `nu(z_t)`.
    pub realized: (f64, f64),
    /// `(nu_1(M), nu_2(M))`.
    pub sandwich: (f64, f64),
    /// Max over records and nodes of the invariant differences.
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub degenerate: bool,
    /// `(p, (p E_p(w)(0))^(1/p))`.
    pub c_p: Vec<(f64, f64)>,
    pub fits: Vec<FitSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTrend {
    pub p: f64,
    /// Largest `(r_{k+1} - r_k) / r_k` over increasing amplitude.
    pub max_relative_increase: f64,
    /// `(max - min) / mean` of the rates.
    pub relative_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub kind: ExperimentKind,
    pub g: String,
    pub a: String,
    pub z0: String,
    pub z1: String,
    pub n_cells: usize,
    pub t_final: f64,
    pub p_list: Vec<f64>,
    pub completed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub initial_energy: Vec<(f64, f64)>,
    pub final_energy: Vec<(f64, f64)>,
    pub fits: Vec<FitSummary>,
    pub observability: Vec<ObservabilitySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep_trend: Vec<SweepTrend>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub multipliers: Vec<MultiplierReport>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub trajectory: Option<Trajectory>,
    pub summary: Summary,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }
}

fn new_summary(kind: ExperimentKind, spec: &ScenarioSpec, scenario: &Scenario) -> Summary {
    Summary {
        name: scenario.name.clone(),
        kind,
        g: scenario.g.label().to_string(),
        a: scenario.a.label().to_string(),
        z0: spec.z0.to_string(),
        z1: spec.z1.to_string(),
        n_cells: scenario.grid.n_cells(),
        t_final: scenario.t_final_effective(),
        p_list: scenario.p_values(),
        completed: false,
        error: None,
        initial_energy: Vec::new(),
        final_energy: Vec::new(),
        fits: Vec::new(),
        observability: Vec::new(),
        theta: None,
        sweep: Vec::new(),
        sweep_trend: Vec::new(),
        multipliers: Vec::new(),
        assertions: Vec::new(),
        passed: false,
    }
}

fn finish(mut summary: Summary, trajectory: Option<Trajectory>) -> Outcome {
    summary.passed = summary.assertions.iter().all(|a| a.passed);
    Outcome {
        trajectory,
        summary,
    }
}

fn failed_run(mut summary: Summary, name: &str, err: impl std::fmt::Display) -> Outcome {
    summary.error = Some(err.to_string());
    summary
        .assertions
        .push(Assertion::new(name, false, err.to_string()));
    finish(summary, None)
}

/// Assertion name of a failed solver run: an energy increase caught by the
/// solver is a failed monotonicity assertion.
fn run_error(summary: Summary, err: WaveError) -> Outcome {
    let name = match err {
        WaveError::Monotonicity { .. } => "energy_monotone",
        _ => "run",
    };
    failed_run(summary, name, err)
}

pub fn fit(traj: &Trajectory, p: f64, window: (f64, f64)) -> FitSummary {
    match EnergyReport::from_trajectory(traj, p, window, DEFAULT_FLOOR_RELATIVE) {
        Ok(r) => FitSummary {
            p,
            window,
            fitted_rate: Some(r.fitted_rate),
            r2: Some(r.fit_r2),
            intercept: Some(r.fit_intercept),
            error: None,
        },
        Err(e) => FitSummary {
            p,
            window,
            fitted_rate: None,
            r2: None,
            intercept: None,
            error: Some(e.to_string()),
        },
    }
}

/// Largest step-to-step energy increase beyond the monotonicity slack.
fn monotone_assertion(traj: &Trajectory) -> Assertion {
    let mut worst = (0.0, 0.0, 0.0);
    for (j, e) in traj.energies.iter().enumerate() {
        let slack = MONOTONE_SLACK * e[0].max(1.0);
        for w in e.windows(2) {
            let excess = w[1] - w[0] - slack;
            if excess > worst.0 {
                worst = (excess, traj.p_values[j], w[1] - w[0]);
            }
        }
    }
    if worst.0 > 0.0 {
        Assertion::new(
            "energy_monotone",
            false,
            format!("E_p{} increased by {:e} between records", worst.1, worst.2),
        )
    } else {
        Assertion::new("energy_monotone", true, "no E_p increased beyond the slack")
    }
}

/// Fits, observability ratios and the scenario's own assertions.
fn analyse(summary: &mut Summary, options: &SuiteOptions, spec: &ScenarioSpec, traj: &Trajectory) {
    summary.completed = true;
    let last = traj.len() - 1;
    for (j, &p) in traj.p_values.iter().enumerate() {
        summary.initial_energy.push((p, traj.energies[j][0]));
        summary.final_energy.push((p, traj.energies[j][last]));
    }
    summary.assertions.push(monotone_assertion(traj));
    let window = spec.fit_window();
    summary.fits = traj
        .p_values
        .iter()
        .map(|&p| fit(traj, p, window))
        .collect();
    for &s in &options.observability_starts {
        let t = s + options.observability_length;
        for &p in &traj.p_values {
            let (ratio, error) = match observability_ratio(traj, p, s, t) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            summary.observability.push(ObservabilitySummary {
                p,
                s,
                t,
                ratio,
                error,
            });
        }
    }
    if let Some(expected) = spec.expect_rate {
        let first = &summary.fits[0];
        let a = match first.fitted_rate {
            Some(rate) => {
                let rel = (rate - expected).abs() / expected.abs();
                Assertion::new(
                    "expect_rate",
                    rel <= spec.rate_tolerance,
                    format!(
                        "fitted rate {rate} for p = {} vs expected {expected}: relative error {rel:e}, tolerance {}",
                        first.p, spec.rate_tolerance
                    ),
                )
            }
            None => Assertion::new(
                "expect_rate",
                false,
                format!(
                    "no fit for p = {}: {}",
                    first.p,
                    first.error.as_deref().unwrap_or("")
                ),
            ),
        };
        summary.assertions.push(a);
    }
    if let Some(min_r2) = spec.min_r2 {
        let bad: Vec<String> = summary
            .fits
            .iter()
            .filter(|f| !f.r2.is_some_and(|r2| r2 >= min_r2))
            .map(|f| format!("p = {}: r2 = {:?}", f.p, f.r2))
            .collect();
        summary.assertions.push(Assertion::new(
            "min_r2",
            bad.is_empty(),
            if bad.is_empty() {
                format!("every fit has r2 >= {min_r2}")
            } else {
                bad.join("; ")
            },
        ));
    }
}

pub fn run_simulate(options: &SuiteOptions, spec: &ScenarioSpec, scenario: &Scenario) -> Outcome {
    let mut summary = new_summary(ExperimentKind::Simulate, spec, scenario);
    let traj = match run_simulation(scenario) {
        Ok(t) => t,
        Err(e) => return run_error(summary, e),
    };
    analyse(&mut summary, options, spec, &traj);
    finish(summary, Some(traj))
}

/// Result of comparing a nonlinear run with the linear run driven by the
/// recorded `theta = nu(z_t)`.
#[derive(Debug, Clone)]
pub struct AuxComparison {
    pub base: Trajectory,
    pub aux: Trajectory,
    pub theta: ThetaSummary,
}

/// Runs the nonlinear problem, records `nu(z_t)` at every step and node, and
/// re-runs the auxiliary linear problem with that coefficient.
pub fn aux_equivalence(scenario: &Scenario) -> wavelab_core::Result<AuxComparison> {
    let scenario = scenario.clone().with_record_every(1).with_keep_states(true);
    let base = run_simulation(&scenario)?;
    let g = &scenario.g;
    let values: Vec<Vec<f64>> = base
        .states
        .iter()
        .map(|s| s.velocity().iter().map(|&u| nu_ratio(u, g)).collect())
        .collect();
    let theta = ThetaField::recorded(values)?;
    let aux = run_auxiliary(&scenario, &theta)?;
    let discrepancy = base
        .states
        .iter()
        .zip(&aux.states)
        .map(|(a, b)| a.max_distance(b))
        .fold(0.0, f64::max);
    let m = base.max_zt.iter().copied().fold(0.0, f64::max);
    let summary = ThetaSummary {
        m,
        realized: theta.bounds(),
        sandwich: nu_bounds(g, m),
        discrepancy,
    };
    Ok(AuxComparison {
        base,
        aux,
        theta: summary,
    })
}

pub fn theta_inside_sandwich(t: &ThetaSummary) -> bool {
    let slack = THETA_BOUND_SLACK * t.sandwich.1.abs().max(1.0);
    t.realized.0 >= t.sandwich.0 - slack && t.realized.1 <= t.sandwich.1 + slack
}

pub fn run_aux_equivalence(
    options: &SuiteOptions,
    spec: &ScenarioSpec,
    scenario: &Scenario,
) -> Outcome {
    let mut summary = new_summary(ExperimentKind::AuxEquivalence, spec, scenario);
    let cmp = match aux_equivalence(scenario) {
        Ok(c) => c,
        Err(e) => return run_error(summary, e),
    };
    analyse(&mut summary, options, spec, &cmp.base);
    let t = &cmp.theta;
    summary.assertions.push(Assertion::new(
        "aux_discrepancy",
        t.discrepancy <= options.tolerance,
        format!(
            "max discrepancy {:e}, tolerance {:e}",
            t.discrepancy, options.tolerance
        ),
    ));
    summary.assertions.push(Assertion::new(
        "theta_bounds",
        theta_inside_sandwich(t),
        format!(
            "realized [{}, {}] vs [nu_1(M), nu_2(M)] = [{}, {}] at M = {}",
            t.realized.0, t.realized.1, t.sandwich.0, t.sandwich.1, t.m
        ),
    ));
    summary.theta = Some(cmp.theta);
    finish(summary, Some(cmp.base))
}

/// `(p E_p(w)(0))^(1/p)` for every exponent of the scenario.
pub fn regularity_constants(scenario: &Scenario) -> wavelab_core::Result<Vec<(f64, f64)>> {
    let w0 = derivative_initial_state(scenario)?;
    scenario
        .p_values()
        .into_iter()
        .map(|p| Ok((p, (p * energy_p(&w0, p, &scenario.grid)?).powf(1.0 / p))))
        .collect()
}

/// One sweep point: the scenario with data scaled by `alpha`.
pub fn sweep_point(
    scenario: &Scenario,
    alpha: f64,
    window: (f64, f64),
) -> wavelab_core::Result<(SweepRow, Option<Trajectory>)> {
    let mut scaled = scenario.clone().with_keep_states(false);
    scaled.initial = scenario.initial.scaled(alpha);
    let c_p = regularity_constants(&scaled)?;
    if alpha == 0.0 || c_p.iter().all(|&(_, c)| c == 0.0) && is_zero_data(&scaled)? {
        return Ok((
            SweepRow {
                alpha,
                degenerate: true,
                c_p,
                fits: Vec::new(),
            },
            None,
        ));
    }
    let traj = run_simulation(&scaled)?;
    let fits = traj
        .p_values
        .iter()
        .map(|&p| fit(&traj, p, window))
        .collect();
    Ok((
        SweepRow {
            alpha,
            degenerate: false,
            c_p,
            fits,
        },
        Some(traj),
    ))
}

fn is_zero_data(scenario: &Scenario) -> wavelab_core::Result<bool> {
    let s = scenario.initial.riemann(&scenario.grid)?;
    Ok(s.rho.iter().chain(&s.xi).all(|&v| v == 0.0))
}

pub fn sweep_trend(rows: &[SweepRow], p_values: &[f64]) -> Vec<SweepTrend> {
    p_values
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let mut pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| !r.degenerate)
                .filter_map(|r| {
                    r.fits
                        .get(j)
                        .and_then(|f| f.fitted_rate)
                        .map(|v| (r.alpha, v))
                })
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let rates: Vec<f64> = pts.iter().map(|x| x.1).collect();
            let max_relative_increase = rates
                .windows(2)
                .map(|w| (w[1] - w[0]) / w[0].abs())
                .fold(f64::NEG_INFINITY, f64::max);
            let (lo, hi) = rates
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &r| {
                    (l.min(r), h.max(r))
                });
            let mean = rates.iter().sum::<f64>() / rates.len() as f64;
            SweepTrend {
                p,
                max_relative_increase: if rates.len() < 2 {
                    0.0
                } else {
                    max_relative_increase
                },
                relative_spread: if rates.is_empty() {
                    f64::NAN
                } else {
                    (hi - lo) / mean
                },
            }
        })
        .collect()
}

pub fn run_semi_global_sweep(
    options: &SuiteOptions,
    spec: &ScenarioSpec,
    scenario: &Scenario,
) -> Outcome {
    let mut summary = new_summary(ExperimentKind::SemiGlobalSweep, spec, scenario);
    let window = spec.fit_window();
    let mut base = None;
    for &alpha in &options.alphas {
        match sweep_point(scenario, alpha, window) {
            Ok((row, traj)) => {
                if alpha == 1.0 {
                    base = traj;
                }
                summary.sweep.push(row);
            }
            Err(e) => {
                let name = if matches!(e, WaveError::Monotonicity { .. }) {
                    "energy_monotone"
                } else {
                    "run"
                };
                return failed_run(summary, name, format!("alpha = {alpha}: {e}"));
            }
        }
    }
    let base = match base {
        Some(t) => t,
        None => match run_simulation(&scenario.clone().with_keep_states(false)) {
            Ok(t) => t,
            Err(e) => return run_error(summary, e),
        },
    };
    analyse(&mut summary, options, spec, &base);
    let bad: Vec<String> = summary
        .sweep
        .iter()
        .filter(|r| !r.degenerate)
        .flat_map(|r| {
            r.fits
                .iter()
                .filter(|f| !f.fitted_rate.is_some_and(|v| v.is_finite() && v > 0.0))
                .map(move |f| {
                    format!(
                        "alpha = {}, p = {}: rate {:?} {}",
                        r.alpha,
                        f.p,
                        f.fitted_rate,
                        f.error.as_deref().unwrap_or("")
                    )
                })
        })
        .collect();
    summary.assertions.push(Assertion::new(
        "sweep_rates_positive",
        bad.is_empty(),
        if bad.is_empty() {
            "every non-degenerate rate is finite and positive".to_string()
        } else {
            bad.join("; ")
        },
    ));
    summary.sweep_trend = sweep_trend(&summary.sweep, &scenario.p_values());
    finish(summary, Some(base))
}

pub fn run_multiplier_report(
    suite: &ExperimentSuite,
    spec: &ScenarioSpec,
    scenario: &Scenario,
) -> Outcome {
    let options = &suite.options;
    let mut summary = new_summary(ExperimentKind::MultiplierReport, spec, scenario);
    let scenario = scenario.clone().with_keep_states(true);
    let traj = match run_simulation(&scenario) {
        Ok(t) => t,
        Err(e) => return run_error(summary, e),
    };
    analyse(&mut summary, options, spec, &traj);
    let Some((b, c)) = scenario.a.omega() else {
        return failed_run(summary, "localization", "damping has no active region");
    };
    let triple = match make_localization((b, c), suite.epsilons_for(b), &scenario.grid) {
        Ok(t) => t,
        Err(e) => return failed_run(summary, "localization", e),
    };
    for &p in &traj.p_values {
        for window in suite.windows_for(spec) {
            match multiplier_terms(
                &traj,
                &triple,
                &scenario.a,
                Coefficient::Nu(&scenario.g),
                p,
                window,
            ) {
                Ok(r) => summary.multipliers.push(r),
                Err(e) => {
                    return failed_run(
                        summary,
                        "multiplier_terms",
                        format!("p = {p}, window {window:?}: {e}"),
                    )
                }
            }
        }
    }
    let bad: Vec<String> = summary
        .multipliers
        .iter()
        .filter(|r| {
            let mut ks = vec![r.k_first];
            ks.extend(r.eta_constants.iter().flat_map(|e| [e.k_second, e.k_third]));
            ks.iter().any(|k| !k.is_finite())
        })
        .map(|r| format!("p = {}, window {:?}", r.p, r.window))
        .collect();
    summary.assertions.push(Assertion::new(
        "multiplier_constants_finite",
        bad.is_empty(),
        if bad.is_empty() {
            "every minimal constant is finite".to_string()
        } else {
            format!("non-finite constants at {}", bad.join("; "))
        },
    ));
    finish(summary, Some(traj))
}

/// Runs one scenario of a suite.
pub fn run_one(suite: &ExperimentSuite, spec: &ScenarioSpec, scenario: &Scenario) -> Outcome {
    let options = &suite.options;
    match options.kind {
        ExperimentKind::Simulate | ExperimentKind::Verify => run_simulate(options, spec, scenario),
        ExperimentKind::AuxEquivalence => run_aux_equivalence(options, spec, scenario),
        ExperimentKind::SemiGlobalSweep => run_semi_global_sweep(options, spec, scenario),
        ExperimentKind::MultiplierReport => run_multiplier_report(suite, spec, scenario),
    }
}

/// Runs every scenario on a pool of `jobs` workers (all cores when `None`).
/// Outcomes come back in suite order whatever the execution order.
pub fn run_suite(suite: &ExperimentSuite, jobs: Option<usize>) -> Result<Vec<Outcome>> {
    let scenarios = suite.scenarios()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| crate::error::CliError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        suite
            .scenarios
            .par_iter()
            .zip(scenarios.par_iter())
            .map(|(spec, sc)| run_one(suite, spec, sc))
            .collect()
    }))
}
