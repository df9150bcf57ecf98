use proptest::prelude::*;
use wavelab_core::energy::{
    observability_ratio, phi_functional, sobolev_bound_check, ConvexFunctional, EnergyReport,
};
use wavelab_core::localization::default_epsilons;
use wavelab_core::multipliers::{multiplier_terms, Coefficient};
use wavelab_core::{
    make_localization, run_derivative_system, run_simulation, DampingProfile, Grid, InitialData,
    Nonlinearity, Profile, Scenario,
};

fn bump(amp: f64) -> InitialData {
    InitialData::profiles(
        Profile::Bump {
            center: 0.45,
            width: 0.35,
            amp,
        },
        Profile::Sine {
            k: 1,
            amp: 0.5 * amp,
        },
    )
}

fn sine(amp: f64) -> InitialData {
    InitialData::profiles(Profile::Sine { k: 1, amp }, Profile::Zero)
}

fn localized() -> DampingProfile {
    DampingProfile::smooth_indicator(0.7, 1.0, 2.0, 0.1)
}

fn scenario(n: usize, g: Nonlinearity, data: InitialData, t: f64) -> Scenario {
    Scenario::new("energy", Grid::new(n).unwrap(), g, localized(), data).with_t_final(t)
}

/// Largest `|dE/dt - average of the endpoint dissipation rates|` over the run.
fn identity_defect(n: usize, p: f64) -> f64 {
    let sc = scenario(n, Nonlinearity::arctan(), sine(1.0), 2.0)
        .with_p_list(&[p])
        .unwrap()
        .with_keep_states(false);
    let traj = run_simulation(&sc).unwrap();
    let (e, d) = (&traj.energies[0], &traj.dissipation[0]);
    (0..traj.len() - 1)
        .map(|k| {
            let de = (e[k + 1] - e[k]) / traj.dt;
            (de - 0.5 * (d[k] + d[k + 1])).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn dissipation_identity_converges() {
    for p in [1.5, 2.0, 4.0] {
        let e: Vec<f64> = [128, 256, 512]
            .iter()
            .map(|&n| identity_defect(n, p))
            .collect();
        for w in e.windows(2) {
            assert!((w[0] / w[1]).log2() >= 1.0, "p = {p}: {e:?}");
        }
    }
}

#[test]
fn modified_energy_is_non_increasing() {
    let sc = scenario(256, Nonlinearity::arctan(), bump(0.3), 10.0)
        .with_p_list(&[1.5])
        .unwrap();
    let traj = run_simulation(&sc).unwrap();
    assert!(traj.energies[0][0] <= 1.0);
    let f = ConvexFunctional::modified(1.5).unwrap();
    let phi: Vec<f64> = traj
        .states
        .iter()
        .map(|s| phi_functional(s, &f, &sc.grid))
        .collect();
    for w in phi.windows(2) {
        assert!(w[1] <= w[0] + 1e-10);
    }
    assert!(phi.last().unwrap() < &(0.5 * phi[0]));
}

#[test]
fn observability_ratio_properties() {
    let undamped = Scenario::new(
        "undamped",
        Grid::new(64).unwrap(),
        Nonlinearity::identity(),
        DampingProfile::zero(),
        bump(1.0),
    )
    .with_t_final(2.0);
    let traj = run_simulation(&undamped).unwrap();
    let r = observability_ratio(&traj, 2.0, 0.0, 1.0).unwrap();
    assert!((r - 1.0).abs() < 1e-12);

    let sc = scenario(128, Nonlinearity::arctan(), sine(0.2), 25.0).with_keep_states(false);
    let traj = run_simulation(&sc).unwrap();
    let ratios: Vec<f64> = [0.0, 5.0, 10.0, 15.0]
        .iter()
        .map(|&s| observability_ratio(&traj, 2.0, s, s + 10.0).unwrap())
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(hi <= 10.0 && (hi - lo) / hi < 0.2, "{ratios:?}");
    assert!(observability_ratio(&traj, 2.0, 5.0, 99.0).is_err());
    assert!(observability_ratio(&traj, 3.0, 0.0, 1.0).is_err());
}

#[test]
fn sobolev_bound_holds() {
    for g in [
        Nonlinearity::identity(),
        Nonlinearity::arctan(),
        Nonlinearity::saturating(),
    ] {
        let sc = scenario(
            128,
            g,
            InitialData::profiles(Profile::Sine { k: 1, amp: 0.5 }, Profile::Zero),
            5.0,
        );
        let run = run_derivative_system(&sc).unwrap();
        for p in [1.5, 2.0, 4.0] {
            let check = sobolev_bound_check(&run, p).unwrap();
            assert!(check.satisfied, "{check:?}");
            assert!(check.max_w1p < check.c_p);
        }
    }
    let zero = scenario(
        32,
        Nonlinearity::identity(),
        InitialData::profiles(Profile::Zero, Profile::Zero),
        1.0,
    );
    let check = sobolev_bound_check(&run_derivative_system(&zero).unwrap(), 2.0).unwrap();
    assert_eq!(check.c_p, 0.0);
    assert!(check.satisfied);
}

#[test]
fn energy_report_fits_the_envelope() {
    let sc = scenario(128, Nonlinearity::arctan(), bump(0.5), 20.0).with_keep_states(false);
    let traj = run_simulation(&sc).unwrap();
    let report = EnergyReport::from_trajectory(&traj, 2.0, (5.0, 20.0), 1e-13).unwrap();
    assert!(report.fitted_rate > 0.0 && report.fit_r2 > 0.9);
    assert!(report.max_increase() <= 0.0);
    assert!(report.dissipation_series.iter().all(|&(_, d)| d <= 0.0));
}

#[test]
fn multiplier_terms_on_runs() {
    let grid = Grid::new(128).unwrap();
    let triple = make_localization((0.7, 1.0), default_epsilons(0.7), &grid).unwrap();
    let zero = scenario(
        128,
        Nonlinearity::identity(),
        InitialData::profiles(Profile::Zero, Profile::Zero),
        2.0,
    );
    let traj = run_simulation(&zero).unwrap();
    for p in [1.5, 2.0, 3.0] {
        let r = multiplier_terms(
            &traj,
            &triple,
            &localized(),
            Coefficient::One,
            p,
            (0.0, 2.0),
        )
        .unwrap();
        for v in [
            r.lhs, r.s1, r.s2, r.s3, r.s4, r.t1, r.t2, r.t3, r.t4, r.t5, r.v1, r.v2, r.v3,
        ] {
            assert_eq!(v, 0.0);
        }
    }

    let sc = scenario(128, Nonlinearity::identity(), bump(1.0), 12.0);
    let traj = run_simulation(&sc).unwrap();
    for p in [1.5, 2.0, 4.0] {
        let mut firsts = Vec::new();
        for s in [0.0, 4.0] {
            let r = multiplier_terms(
                &traj,
                &triple,
                &localized(),
                Coefficient::One,
                p,
                (s, s + 8.0),
            )
            .unwrap();
            assert!(r.s4 > 0.0 && r.t5 > 0.0);
            assert!(r.k_first.is_finite() && r.k_first > 0.0);
            for c in &r.eta_constants {
                assert!(c.k_second.is_finite() && c.k_third.is_finite());
            }
            firsts.push(r.k_first);
        }
        assert!(
            firsts[1] / firsts[0] < 3.0 && firsts[0] / firsts[1] < 3.0,
            "{firsts:?}"
        );
    }
    assert!(multiplier_terms(
        &traj,
        &triple,
        &localized(),
        Coefficient::One,
        2.0,
        (4.0, 40.0)
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energies_never_increase(
        c in proptest::collection::vec(-2.0f64..2.0, 1..6),
        v in proptest::collection::vec(-2.0f64..2.0, 1..6),
        gi in 0usize..4,
        b in 0.0f64..0.8,
    ) {
        let g = Nonlinearity::library().swap_remove(gi);
        let data = InitialData::profiles(Profile::Series(c), Profile::Series(v));
        let sc = Scenario::new(
            "prop",
            Grid::new(64).unwrap(),
            g,
            DampingProfile::indicator(b, 1.0, 3.0),
            data,
        )
        .with_t_final(2.0)
        .with_p_list(&[1.0, 1.5, 2.0, 3.0, 4.0])
        .unwrap()
        .with_keep_states(false);
        // the run itself aborts on any step that raises an energy
        let traj = run_simulation(&sc).unwrap();
        for d in traj.dissipation.iter().flatten() {
            prop_assert!(*d <= 0.0);
        }
    }
}
