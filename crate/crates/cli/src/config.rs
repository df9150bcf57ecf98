//! Suite files: a `[suite]` table and one `[[scenario]]` table per run.
//!
//! ```toml
//! [suite]
//! kind = "simulate"          # simulate | aux_equivalence | semi_global_sweep
//!                            # | multiplier_report | verify
//! output_dir = "wavelab_out"
//! seed = 0
//!
//! [[scenario]]
//! name = "modal"
//! g = "identity"
//! a = "constant(0.5)"
//! z0 = "sine(1)"
//! ```
//!
//! Every key except `g` and `a` has a default; `serialize` writes all keys
//! explicitly and parses back to the same suite.

use crate::error::{CliError, Result};
use crate::profiles::{DampingSpec, NonlinearitySpec, ProfileSpec};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use wavelab_core::localization::default_epsilons;
use wavelab_core::{
    make_localization, DampingRule, Grid, InitialData, PExponent, Scenario, Splitting,
};

pub const DEFAULT_N_CELLS: usize = 256;
pub const DEFAULT_T_FINAL: f64 = 20.0;
pub const DEFAULT_P_LIST: [f64; 3] = [1.5, 2.0, 4.0];
pub const DEFAULT_ALPHAS: [f64; 3] = [1.0, 4.0, 16.0];
pub const DEFAULT_AUX_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_RATE_TOLERANCE: f64 = 0.03;
pub const DEFAULT_OBSERVABILITY_LENGTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    Simulate,
    AuxEquivalence,
    SemiGlobalSweep,
    MultiplierReport,
    Verify,
}

impl ExperimentKind {
    /// Kinds that make a stability statement and therefore need `1 < p`.
    pub fn is_stability(self) -> bool {
        matches!(
            self,
            ExperimentKind::AuxEquivalence
                | ExperimentKind::SemiGlobalSweep
                | ExperimentKind::MultiplierReport
        )
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::AuxEquivalence => "aux_equivalence",
            ExperimentKind::SemiGlobalSweep => "semi_global_sweep",
            ExperimentKind::MultiplierReport => "multiplier_report",
            ExperimentKind::Verify => "verify",
        })
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("wavelab_out")
}

fn default_alphas() -> Vec<f64> {
    DEFAULT_ALPHAS.to_vec()
}

fn default_tolerance() -> f64 {
    DEFAULT_AUX_TOLERANCE
}

fn default_observability_length() -> f64 {
    DEFAULT_OBSERVABILITY_LENGTH
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteOptions {
    #[serde(default)]
    pub kind: ExperimentKind,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Seed for `random(...)` initial data.
    #[serde(default)]
    pub seed: u64,
    /// Abort a run (and fail the suite) when an energy increases.
    #[serde(default = "default_true")]
    pub check_monotone: bool,
    /// Start times `S` of the observability ratios `int_S^{S+L} E / E(S)`.
    #[serde(default)]
    pub observability_starts: Vec<f64>,
    #[serde(default = "default_observability_length")]
    pub observability_length: f64,
    /// Amplitudes of `semi_global_sweep`.
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    /// Bound on the nonlinear-vs-auxiliary discrepancy.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Time windows of `multiplier_report`; default thirds of `t_final`.
    #[serde(default)]
    pub windows: Vec<[f64; 2]>,
    /// `[eps0, eps1, eps2]` of the localization triple; default
    /// `(1 - b) [4, 3, 2] / 8`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<[f64; 3]>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::Simulate,
            output_dir: default_output_dir(),
            seed: 0,
            check_monotone: true,
            observability_starts: Vec::new(),
            observability_length: DEFAULT_OBSERVABILITY_LENGTH,
            alphas: default_alphas(),
            tolerance: DEFAULT_AUX_TOLERANCE,
            windows: Vec::new(),
            epsilons: None,
        }
    }
}

fn default_z0() -> ProfileSpec {
    ProfileSpec::Sine { k: 1, amp: 1.0 }
}

fn default_z1() -> ProfileSpec {
    ProfileSpec::Zero
}

fn default_n_cells() -> usize {
    DEFAULT_N_CELLS
}

fn default_t_final() -> f64 {
    DEFAULT_T_FINAL
}

fn default_p_list() -> Vec<f64> {
    DEFAULT_P_LIST.to_vec()
}

fn default_record_every() -> usize {
    1
}

fn default_rate_tolerance() -> f64 {
    DEFAULT_RATE_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    /// Defaults to `scenario_<index>`.
    #[serde(default)]
    pub name: String,
    pub g: NonlinearitySpec,
    pub a: DampingSpec,
    #[serde(default = "default_z0")]
    pub z0: ProfileSpec,
    #[serde(default = "default_z1")]
    pub z1: ProfileSpec,
    #[serde(default = "default_n_cells")]
    pub n_cells: usize,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_p_list")]
    pub p_list: Vec<f64>,
    #[serde(default)]
    pub splitting: Splitting,
    #[serde(default)]
    pub damping_rule: DampingRule,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Log-linear fit window; default `[0.1, 0.9] t_final`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
    /// Asserted fitted rate of the first exponent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_rate: Option<f64>,
    /// Relative tolerance of `expect_rate`.
    #[serde(default = "default_rate_tolerance")]
    pub rate_tolerance: f64,
    /// Asserted lower bound on every fit's r^2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_r2: Option<f64>,
}

impl ScenarioSpec {
    pub fn new(name: impl Into<String>, g: NonlinearitySpec, a: DampingSpec) -> Self {
        Self {
            name: name.into(),
            g,
            a,
            z0: default_z0(),
            z1: default_z1(),
            n_cells: DEFAULT_N_CELLS,
            t_final: DEFAULT_T_FINAL,
            p_list: default_p_list(),
            splitting: Splitting::default(),
            damping_rule: DampingRule::default(),
            record_every: 1,
            fit_window: None,
            expect_rate: None,
            rate_tolerance: DEFAULT_RATE_TOLERANCE,
            min_r2: None,
        }
    }

    pub fn fit_window(&self) -> (f64, f64) {
        match self.fit_window {
            Some([lo, hi]) => (lo, hi),
            None => (0.1 * self.t_final, 0.9 * self.t_final),
        }
    }

    /// Builds the solver scenario; `index` separates the random streams of
    /// different scenarios.
    pub fn build(&self, seed: u64, index: usize, check_monotone: bool) -> Result<Scenario> {
        let grid = Grid::new(self.n_cells)?;
        let stream = 2 * index as u64;
        let initial =
            InitialData::profiles(self.z0.build(seed, stream), self.z1.build(seed, stream + 1));
        let mut scenario = Scenario::new(&self.name, grid, self.g.build(), self.a.build(), initial)
            .with_t_final(self.t_final)
            .with_p_list(&self.p_list)?
            .with_splitting(self.splitting)
            .with_damping_rule(self.damping_rule)
            .with_record_every(self.record_every);
        scenario.check_monotone = check_monotone;
        Ok(scenario)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    #[serde(default)]
    suite: SuiteOptions,
    #[serde(default)]
    scenario: Vec<ScenarioSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSuite {
    pub options: SuiteOptions,
    pub scenarios: Vec<ScenarioSpec>,
}

impl ExperimentSuite {
    pub fn kind(&self) -> ExperimentKind {
        self.options.kind
    }

    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        self.scenarios
            .iter()
            .enumerate()
            .map(|(i, s)| s.build(self.options.seed, i, self.options.check_monotone))
            .collect()
    }

    /// Windows of `multiplier_report` for a scenario.
    pub fn windows_for(&self, spec: &ScenarioSpec) -> Vec<(f64, f64)> {
        if self.options.windows.is_empty() {
            let t = spec.t_final;
            vec![(0.0, t / 3.0), (t / 3.0, 2.0 * t / 3.0), (2.0 * t / 3.0, t)]
        } else {
            self.options.windows.iter().map(|w| (w[0], w[1])).collect()
        }
    }

    pub fn epsilons_for(&self, b: f64) -> [f64; 3] {
        self.options.epsilons.unwrap_or_else(|| default_epsilons(b))
    }
}

impl FromStr for ExperimentSuite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        parse_suite(s)
    }
}

fn scenario_error(name: &str, key: &str, detail: impl fmt::Display) -> CliError {
    CliError::Config(format!("scenario '{name}': key '{key}': {detail}"))
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn validate_scenario(options: &SuiteOptions, spec: &ScenarioSpec, index: usize) -> Result<()> {
    let name = spec.name.as_str();
    if !valid_name(name) {
        return Err(scenario_error(
            name,
            "name",
            "use letters, digits, '_', '-' or '.'",
        ));
    }
    spec.g
        .build()
        .check_monotone_damping()
        .map_err(|e| scenario_error(name, "g", e))?;
    let a = spec.a.build();
    a.check_nonnegative()
        .map_err(|e| scenario_error(name, "a", e))?;
    let grid = Grid::new(spec.n_cells).map_err(|e| scenario_error(name, "n_cells", e))?;
    if !(spec.t_final > 0.0 && spec.t_final.is_finite()) {
        return Err(scenario_error(
            name,
            "t_final",
            format!("must be positive, got {}", spec.t_final),
        ));
    }
    if spec.record_every == 0 {
        return Err(scenario_error(name, "record_every", "must be >= 1"));
    }
    if spec.p_list.is_empty() {
        return Err(scenario_error(name, "p_list", "is empty"));
    }
    let stability = options.kind.is_stability();
    for &p in &spec.p_list {
        let checked = if stability {
            PExponent::for_stability(p)
        } else {
            PExponent::new(p)
        };
        checked.map_err(|e| {
            let why = if stability {
                format!("{e} (experiment kind '{}')", options.kind)
            } else {
                e.to_string()
            };
            scenario_error(name, "p_list", why)
        })?;
    }
    let stream = 2 * index as u64;
    let initial = InitialData::profiles(
        spec.z0.build(options.seed, stream),
        spec.z1.build(options.seed, stream + 1),
    );
    initial
        .validate(&grid)
        .map_err(|e| scenario_error(name, "z0/z1", e))?;
    if let Some([lo, hi]) = spec.fit_window {
        if !(0.0 <= lo && lo < hi && hi <= spec.t_final) {
            return Err(scenario_error(
                name,
                "fit_window",
                format!(
                    "need 0 <= lo < hi <= t_final = {}, got [{lo}, {hi}]",
                    spec.t_final
                ),
            ));
        }
    }
    if !(spec.rate_tolerance > 0.0) {
        return Err(scenario_error(name, "rate_tolerance", "must be positive"));
    }
    if stability {
        a.check_localized_damping()
            .map_err(|e| scenario_error(name, "a", e))?;
    }
    if options.kind == ExperimentKind::MultiplierReport {
        let (b, c) = a.omega().ok_or_else(|| {
            scenario_error(
                name,
                "a",
                "multiplier_report needs an indicator-type damping",
            )
        })?;
        let eps = options.epsilons.unwrap_or_else(|| default_epsilons(b));
        make_localization((b, c), eps, &grid)
            .map_err(|e| CliError::Config(format!("scenario '{name}': key 'epsilons': {e}")))?;
        let windows = if options.windows.is_empty() {
            vec![[0.0, spec.t_final]]
        } else {
            options.windows.clone()
        };
        for [lo, hi] in windows {
            if !(0.0 <= lo && lo < hi && hi <= spec.t_final) {
                return Err(CliError::Config(format!(
                    "key 'windows': [{lo}, {hi}] must satisfy 0 <= S < T <= t_final = {} of scenario '{name}'",
                    spec.t_final
                )));
            }
        }
    }
    Ok(())
}

fn validate_options(options: &SuiteOptions) -> Result<()> {
    let key = |k: &str, d: String| CliError::Config(format!("key '{k}': {d}"));
    if !(options.observability_length > 0.0) {
        return Err(key("observability_length", "must be positive".into()));
    }
    if options.observability_starts.iter().any(|s| !(*s >= 0.0)) {
        return Err(key(
            "observability_starts",
            "start times must be >= 0".into(),
        ));
    }
    if options.alphas.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
        return Err(key(
            "alphas",
            format!(
                "amplitudes must be finite and >= 0, got {:?}",
                options.alphas
            ),
        ));
    }
    if !(options.tolerance > 0.0) {
        return Err(key("tolerance", "must be positive".into()));
    }
    Ok(())
}

/// Parses and validates a suite. Every damping nonlinearity is checked on the
/// monotonicity lattice and every damping profile for sign here, so a suite
/// that parses only fails at run time through its assertions.
pub fn parse_suite(text: &str) -> Result<ExperimentSuite> {
    let file: SuiteFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let options = file.suite;
    validate_options(&options)?;
    let mut scenarios = file.scenario;
    if scenarios.is_empty() && options.kind != ExperimentKind::Verify {
        return Err(CliError::Config(format!(
            "key 'scenario': experiment kind '{}' needs at least one [[scenario]]",
            options.kind
        )));
    }
    let mut seen = HashSet::new();
    for (i, spec) in scenarios.iter_mut().enumerate() {
        if spec.name.is_empty() {
            spec.name = format!("scenario_{i}");
        }
        if !seen.insert(spec.name.clone()) {
            return Err(CliError::Config(format!(
                "key 'name': duplicate scenario name '{}'",
                spec.name
            )));
        }
        validate_scenario(&options, spec, i)?;
    }
    Ok(ExperimentSuite { options, scenarios })
}

/// Writes a suite with every key explicit.
pub fn serialize(suite: &ExperimentSuite) -> Result<String> {
    let file = SuiteFile {
        suite: suite.options.clone(),
        scenario: suite.scenarios.clone(),
    };
    toml::to_string(&file).map_err(|e| CliError::Config(e.to_string()))
}
