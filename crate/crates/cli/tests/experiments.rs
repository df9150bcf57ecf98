use std::fs;
use wavelab_cli::config::{parse_suite, ScenarioSpec, SuiteOptions};
use wavelab_cli::experiments::{run_simulate, run_suite};
use wavelab_cli::profiles::{DampingSpec, NonlinearitySpec};
use wavelab_cli::reports::{emit_reports, exit_code, summary_json};
use wavelab_core::Nonlinearity;

const MIXED: &str = r#"
[suite]
observability_starts = [0.0, 1.0]
observability_length = 2.0

[[scenario]]
name = "undamped"
g = "identity"
a = "zero"
z0 = "bump(0.5,0.3)"
n_cells = 64
t_final = 4

[[scenario]]
name = "arctan"
g = "arctan"
a = "smooth_indicator(0.7,1,2)"
z0 = "random(5,0.5)"
z1 = "sine(2,0.2)"
n_cells = 64
t_final = 5

[[scenario]]
name = "cubic"
g = "cubic"
a = "indicator(0.5,1,1)"
n_cells = 32
t_final = 3
p_list = [1, 3]
"#;

fn reversed(text: &str) -> String {
    let (head, rest) = text.split_once("[[scenario]]").unwrap();
    let mut blocks: Vec<&str> = rest.split("[[scenario]]").collect();
    blocks.reverse();
    let mut out = head.to_string();
    for b in blocks {
        out.push_str("[[scenario]]");
        out.push_str(b);
        if !b.ends_with('\n') {
            out.push('\n');
        }
    }
    out
}

#[test]
fn reports_do_not_depend_on_execution_order() {
    let forward = parse_suite(MIXED).unwrap();
    let backward = parse_suite(&reversed(MIXED)).unwrap();
    assert_eq!(backward.scenarios[0].name, "cubic");
    let dir_f = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    emit_reports(&run_suite(&forward, Some(1)).unwrap(), dir_f.path()).unwrap();
    emit_reports(&run_suite(&backward, Some(3)).unwrap(), dir_b.path()).unwrap();
    let mut names: Vec<_> = fs::read_dir(dir_f.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for name in names {
        let a = fs::read(dir_f.path().join(&name)).unwrap();
        let b = fs::read(dir_b.path().join(&name)).unwrap();
        // random(...) data follows the scenario's position, which differs here
        if name.to_string_lossy().contains("arctan") {
            continue;
        }
        assert_eq!(a, b, "{name:?}");
    }
}

#[test]
fn undamped_csv_has_constant_energy() {
    let suite = parse_suite(MIXED).unwrap();
    let outcomes = run_suite(&suite, None).unwrap();
    assert_eq!(exit_code(&outcomes), 0);
    let dir = tempfile::tempdir().unwrap();
    emit_reports(&outcomes, dir.path()).unwrap();
    let mut reader = csv::Reader::from_path(dir.path().join("energies_undamped.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "t",
            "E_p1.5",
            "E_p2",
            "E_p4",
            "dEdt_p1.5",
            "dEdt_p2",
            "dEdt_p4",
            "max_zt",
            "W1p_zt"
        ]
    );
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4 * 64 + 1);
    for col in 1..=3 {
        let e0 = rows[0][col];
        for r in &rows {
            assert!((r[col] - e0).abs() <= 1e-12 * e0);
        }
    }
    let cubic = fs::read_to_string(dir.path().join("energies_cubic.csv")).unwrap();
    assert!(cubic.starts_with("t,E_p1,E_p3,dEdt_p1,dEdt_p3,max_zt,W1p_zt\n"));
}

#[test]
fn modal_summary_reports_the_oracle_rate() {
    let text = r#"
        [[scenario]]
        name = "modal"
        g = "identity"
        a = "constant(0.5)"
        n_cells = 512
        t_final = 18
        p_list = [2]
        fit_window = [2, 18]
        expect_rate = 0.5
    "#;
    let suite = parse_suite(text).unwrap();
    let outcomes = run_suite(&suite, None).unwrap();
    assert_eq!(exit_code(&outcomes), 0);
    let json: serde_json::Value =
        serde_json::from_str(&summary_json(&outcomes[0].summary).unwrap()).unwrap();
    let rate = json["fits"][0]["fitted_rate"].as_f64().unwrap();
    assert!((rate - 0.5).abs() <= 0.03 * 0.5, "{rate}");
    assert_eq!(json["passed"], true);
}

#[test]
fn wrong_expected_rate_fails_the_suite() {
    let text = r#"
        [[scenario]]
        g = "identity"
        a = "constant(0.5)"
        n_cells = 64
        t_final = 10
        expect_rate = 2.0
    "#;
    let outcomes = run_suite(&parse_suite(text).unwrap(), None).unwrap();
    assert_eq!(exit_code(&outcomes), 1);
    let failed: Vec<_> = outcomes[0]
        .summary
        .assertions
        .iter()
        .filter(|a| !a.passed)
        .collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].name, "expect_rate");
}

#[test]
fn injected_anti_dissipative_g_fails_monotonicity() {
    let spec = ScenarioSpec::new(
        "anti",
        NonlinearitySpec::Identity,
        DampingSpec::Constant(1.0),
    );
    let mut scenario = spec.build(0, 0, true).unwrap().with_t_final(1.0);
    scenario.g = Nonlinearity::custom("anti", |s| -s, |_| -1.0);
    let outcome = run_simulate(&SuiteOptions::default(), &spec, &scenario);
    assert_eq!(exit_code(std::slice::from_ref(&outcome)), 1);
    assert!(outcome.trajectory.is_none());
    let a = &outcome.summary.assertions[0];
    assert_eq!(a.name, "energy_monotone");
    assert!(!a.passed);

    // with the solver check off the increase is caught from the records
    scenario.check_monotone = false;
    let outcome = run_simulate(&SuiteOptions::default(), &spec, &scenario);
    assert!(!outcome.passed());
    assert_eq!(outcome.summary.assertions[0].name, "energy_monotone");
}

#[test]
fn aux_equivalence_suite_reports_theta() {
    let text = r#"
        [suite]
        kind = "aux_equivalence"

        [[scenario]]
        name = "aux"
        g = "arctan"
        a = "smooth_indicator(0.7,1,2)"
        z0 = "sine(1,0.2)"
        t_final = 4
        p_list = [2]
    "#;
    let outcomes = run_suite(&parse_suite(text).unwrap(), None).unwrap();
    let s = &outcomes[0].summary;
    assert!(s.passed, "{:?}", s.assertions);
    let theta = s.theta.as_ref().unwrap();
    assert!(theta.discrepancy <= 1e-6);
    assert!(
        theta.realized.0 >= theta.sandwich.0 - 1e-12
            && theta.realized.1 <= theta.sandwich.1 + 1e-12
    );
    assert!(theta.realized.1 <= 1.0 && theta.realized.0 > 0.9);

    let identity = text.replace("\"arctan\"", "\"identity\"");
    let outcomes = run_suite(&parse_suite(&identity).unwrap(), None).unwrap();
    let theta = outcomes[0].summary.theta.as_ref().unwrap();
    assert!(theta.discrepancy <= 1e-14);
    assert_eq!(theta.realized, (1.0, 1.0));
}

#[test]
fn semi_global_sweep_handles_zero_amplitude() {
    let text = r#"
        [suite]
        kind = "semi_global_sweep"
        alphas = [0, 1, 4]

        [[scenario]]
        name = "sweep"
        g = "identity"
        a = "smooth_indicator(0.7,1,2)"
        n_cells = 64
        t_final = 10
        fit_window = [0, 10]
    "#;
    let outcomes = run_suite(&parse_suite(text).unwrap(), None).unwrap();
    let s = &outcomes[0].summary;
    assert!(s.passed, "{:?}", s.assertions);
    assert_eq!(s.sweep.len(), 3);
    assert!(s.sweep[0].degenerate && s.sweep[0].fits.is_empty());
    assert!(s.sweep[0].c_p.iter().all(|&(_, c)| c == 0.0));
    let r1 = s.sweep[1].fits[1].fitted_rate.unwrap();
    let r4 = s.sweep[2].fits[1].fitted_rate.unwrap();
    assert!((r1 - r4).abs() <= 1e-9 * r1);
    assert!((s.sweep[2].c_p[1].1 / s.sweep[1].c_p[1].1 - 4.0).abs() < 1e-12);
    assert!(s.sweep_trend.iter().all(|t| t.relative_spread < 0.01));
}

#[test]
fn multiplier_report_constants_are_finite() {
    let text = r#"
        [suite]
        kind = "multiplier_report"
        windows = [[0, 6], [3, 9]]

        [[scenario]]
        name = "mult"
        g = "identity"
        a = "indicator(0.7,1,1)"
        z0 = "sine(1,0.5)"
        n_cells = 64
        t_final = 9
        p_list = [1.5, 2, 4]
    "#;
    let outcomes = run_suite(&parse_suite(text).unwrap(), None).unwrap();
    let s = &outcomes[0].summary;
    assert!(s.passed, "{:?}", s.assertions);
    assert_eq!(s.multipliers.len(), 6);
    for r in &s.multipliers {
        assert!(r.k_first.is_finite() && r.k_first > 0.0);
        assert_eq!(r.eta_constants.len(), 4);
    }
}
