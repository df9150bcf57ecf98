//! Multiplier diagnostics for the auxiliary linear problem: the elliptic
//! solve `v_xx = beta f(y)` and the integral terms of the three multiplier
//! estimates, with the smallest constants that make each estimate hold on
//! the data of a run.

use crate::damping::DampingProfile;
use crate::energy::abs_pow;
use crate::error::{Result, WaveError};
use crate::grid::Grid;
use crate::localization::LocalizationTriple;
use crate::nonlinearity::{nu_ratio, Nonlinearity};
use crate::powers::{modified_big_g, modified_g, modified_g_prime, signed_power_unchecked};
use crate::solver::{ThetaField, Trajectory};
use crate::state::{physical_from_riemann, RiemannState};
use serde::{Deserialize, Serialize};

/// Values of `eta` at which the eta-dependent constants are reported.
pub const ETAS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `f = sgn-power(., p-1)`, `F = |.|^p / p`.
    PGeq2,
    /// The modified pair `(g, G)` and the energy `int G(rho) + G(xi)`.
    PIn12,
}

impl Regime {
    pub fn for_p(p: f64) -> Result<Self> {
        if p >= 2.0 && p.is_finite() {
            Ok(Regime::PGeq2)
        } else if p > 1.0 && p < 2.0 {
            Ok(Regime::PIn12)
        } else {
            Err(WaveError::Domain(format!(
                "multiplier terms need 1 < p < inf, got {p}"
            )))
        }
    }

    #[inline]
    fn f(self, s: f64, p: f64) -> f64 {
        match self {
            Regime::PGeq2 => signed_power_unchecked(s, p - 1.0),
            Regime::PIn12 => modified_g(s, p),
        }
    }

    #[inline]
    fn big_f(self, s: f64, p: f64) -> f64 {
        match self {
            Regime::PGeq2 => abs_pow(s, p) / p,
            Regime::PIn12 => modified_big_g(s, p),
        }
    }

    #[inline]
    fn f_prime(self, s: f64, p: f64) -> f64 {
        match self {
            Regime::PGeq2 if p == 2.0 => 1.0,
            Regime::PGeq2 => (p - 1.0) * abs_pow(s, p - 2.0),
            Regime::PIn12 => modified_g_prime(s, p),
        }
    }
}

/// Solution of `v_xx = h`, `v(0) = v(1) = 0` through the Green's
/// representation `v(x) = int_0^x (x - s) h(s) ds - x int_0^1 (1 - s) h(s) ds`,
/// with trapezoid quadrature.
pub fn elliptic_solve(h: &[f64], grid: &Grid) -> Vec<f64> {
    let xs = grid.nodes();
    let sh: Vec<f64> = xs.iter().zip(h).map(|(x, v)| x * v).collect();
    let h0 = grid.cumulative_trapezoid(h);
    let h1 = grid.cumulative_trapezoid(&sh);
    let n = grid.n_cells();
    let tail = h0[n] - h1[n];
    let mut v: Vec<f64> = (0..=n)
        .map(|i| xs[i] * h0[i] - h1[i] - xs[i] * tail)
        .collect();
    v[0] = 0.0;
    v[n] = 0.0;
    v
}

/// `v` with `v_xx = beta f(y)`, where `f` is the signed power `p - 1` for
/// p >= 2 and the modified `g` for 1 < p < 2.
pub fn elliptic_multiplier(y: &[f64], beta: &[f64], p: f64, grid: &Grid) -> Result<Vec<f64>> {
    grid.check_len(y)?;
    grid.check_len(beta)?;
    let regime = Regime::for_p(p)?;
    let h: Vec<f64> = y
        .iter()
        .zip(beta)
        .map(|(&y, &b)| b * regime.f(y, p))
        .collect();
    Ok(elliptic_solve(&h, grid))
}

/// The coefficient multiplying `a(x)` in the damping term.
#[derive(Debug, Clone, Copy)]
pub enum Coefficient<'a> {
    /// Linear damping, `theta = 1`.
    One,
    /// `theta = nu(z_t)` evaluated on each state.
    Nu(&'a Nonlinearity),
    /// An explicit field, sampled at record times.
    Field(&'a ThetaField),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaConstants {
    pub eta: f64,
    /// `S4 / (T5 / eta^p + eta^q int E + E(S))`.
    pub k_second: f64,
    /// `T5 / (eta int E + E(S) / eta^q)`.
    pub k_third: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub p: f64,
    pub regime: Regime,
    pub window: (f64, f64),
    /// `int_S^T E dt`, with `E = E_p` (p >= 2) or `int G(rho) + G(xi)` (p < 2).
    pub lhs: f64,
    pub energy_at_s: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    /// `lhs / (E(S) + S4)`.
    pub k_first: f64,
    pub eta_constants: Vec<EtaConstants>,
    /// `lhs / (S1 + S2 + S3)`.
    pub first_set_ratio: f64,
    /// `S4 / (T1 + T2 + T3 + T4)`.
    pub second_set_ratio: f64,
    /// `2 T5 / (V1 + V2 + V3)`.
    pub third_ratio: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Per-record spatial integrals (time integrands) and bracket ingredients.
struct Slice {
    energy: f64,
    s1: f64,
    s3: f64,
    s4: f64,
    t1: f64,
    t3: f64,
    t4: f64,
    t5: f64,
    v3: f64,
    t2_inner: f64,
    v1_inner: f64,
    f_diff: Vec<f64>,
    v: Vec<f64>,
    slope: Vec<f64>,
}

/// Evaluates every multiplier term over `window` by space-time trapezoid
/// quadrature on the recorded states. `v_t` is the centred difference of the
/// elliptic solves at neighbouring records.
pub fn multiplier_terms(
    traj: &Trajectory,
    triple: &LocalizationTriple,
    a: &DampingProfile,
    theta: Coefficient<'_>,
    p: f64,
    window: (f64, f64),
) -> Result<MultiplierReport> {
    let regime = Regime::for_p(p)?;
    let q = p / (p - 1.0);
    if traj.states.len() != traj.times.len() {
        return Err(WaveError::Window(
            "multiplier terms need a trajectory that keeps its states".into(),
        ));
    }
    let (s, t) = window;
    if !(s < t) {
        return Err(WaveError::Window(format!("empty window [{s}, {t}]")));
    }
    let i0 = traj
        .record_index_at(s)
        .ok_or_else(|| WaveError::Window(format!("window start {s} outside the trajectory")))?;
    let i1 = traj
        .record_index_at(t)
        .ok_or_else(|| WaveError::Window(format!("window end {t} outside the trajectory")))?;
    let grid = traj.grid;
    grid.check_len(&triple.psi)?;
    let n = grid.n_nodes();
    let xs = grid.nodes();
    let a_s = a.sample(&grid);
    let in_q1: Vec<f64> = xs
        .iter()
        .map(|&x| f64::from(u8::from(triple.q1.contains(x))))
        .collect();
    let in_q2: Vec<f64> = xs
        .iter()
        .map(|&x| f64::from(u8::from(triple.q2.contains(x))))
        .collect();
    let xpsi: Vec<f64> = xs.iter().zip(&triple.psi).map(|(x, s)| x * s).collect();

    let theta_at = |k: usize, state: &RiemannState| -> Result<Vec<f64>> {
        Ok(match theta {
            Coefficient::One => vec![1.0; n],
            Coefficient::Nu(g) => state.velocity().iter().map(|&u| nu_ratio(u, g)).collect(),
            Coefficient::Field(f) => {
                let step = k * traj.record_every;
                f.value_at_step(step, 0.0, &grid)?
            }
        })
    };

    // slice for a record; v_t is filled in afterwards
    let slice = |k: usize| -> Result<Slice> {
        let st = &traj.states[k];
        let th = theta_at(k, st)?;
        let y = physical_from_riemann(st, &grid).z;
        let h: Vec<f64> = (0..n).map(|i| triple.beta[i] * regime.f(y[i], p)).collect();
        let v = elliptic_solve(&h, &grid);
        let (r, x) = (&st.rho, &st.xi);
        let fr: Vec<f64> = r.iter().map(|&s| regime.f(s, p)).collect();
        let fx: Vec<f64> = x.iter().map(|&s| regime.f(s, p)).collect();
        let big: Vec<f64> = (0..n)
            .map(|i| regime.big_f(r[i], p) + regime.big_f(x[i], p))
            .collect();
        let diff: Vec<f64> = (0..n).map(|i| r[i] - x[i]).collect();
        let at = |i: usize| a_s[i] * th[i];
        Ok(Slice {
            energy: grid.trapezoid(&big),
            s1: grid.trapezoid_by(|i| in_q1[i] * (1.0 - triple.xpsi_x[i]).abs() * big[i]),
            s3: 0.5
                * grid.trapezoid_by(|i| {
                    (at(i) * xpsi[i]).abs() * (fr[i] + fx[i]).abs() * diff[i].abs()
                }),
            s4: grid.trapezoid_by(|i| in_q1[i] * big[i]),
            t1: grid.trapezoid_by(|i| in_q2[i] * y[i].abs() * (fr[i].abs() + fx[i].abs())),
            t3: grid.trapezoid_by(|i| {
                in_q2[i]
                    * ((regime.f_prime(r[i], p) + regime.f_prime(x[i], p)) * y[i] * at(i) * diff[i])
                        .abs()
            }),
            t4: grid.trapezoid_by(|i| (triple.phi[i] * diff[i] * (fr[i] - fx[i])).abs()),
            t5: grid.trapezoid_by(|i| in_q2[i] * abs_pow(y[i], p)),
            v3: grid.trapezoid_by(|i| (v[i] * at(i) * diff[i]).abs()),
            t2_inner: grid.trapezoid_by(|i| (fr[i] - fx[i]) * y[i]),
            v1_inner: grid.trapezoid_by(|i| v[i] * diff[i]),
            f_diff: (0..n)
                .map(|i| regime.big_f(r[i], p) - regime.big_f(x[i], p))
                .collect(),
            v,
            slope: diff,
        })
    };

    let lo = i0.saturating_sub(1);
    let hi = (i1 + 1).min(traj.len() - 1);
    let slices: Vec<Slice> = (lo..=hi).map(slice).collect::<Result<_>>()?;
    let at = |k: usize| &slices[k - lo];

    let mut acc = [0.0f64; 10];
    let v2_at = |k: usize| -> f64 {
        let (kp, km) = ((k + 1).min(hi), k.saturating_sub(1).max(lo));
        let dt = traj.times[kp] - traj.times[km];
        let (vp, vm) = (&at(kp).v, &at(km).v);
        let sl = &at(k).slope;
        grid.trapezoid_by(|i| ((vp[i] - vm[i]) / dt).abs() * sl[i].abs())
    };
    for k in i0..i1 {
        let w = 0.5 * (traj.times[k + 1] - traj.times[k]);
        for kk in [k, k + 1] {
            let sl = at(kk);
            let vals = [
                sl.energy,
                sl.s1,
                sl.s3,
                sl.s4,
                sl.t1,
                sl.t3,
                sl.t4,
                sl.t5,
                sl.v3,
                v2_at(kk),
            ];
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += w * v;
            }
        }
    }
    let [lhs, s1, s3, s4, t1, t3, t4, t5, v3, v2] = acc;
    let (first, last) = (at(i0), at(i1));
    let s2 = grid.trapezoid_by(|i| xpsi[i].abs() * (last.f_diff[i] - first.f_diff[i]).abs());
    let t2 = (last.t2_inner - first.t2_inner).abs();
    let v1 = (last.v1_inner - first.v1_inner).abs();
    let e_s = first.energy;

    let eta_constants = ETAS
        .iter()
        .map(|&eta| EtaConstants {
            eta,
            k_second: ratio(s4, t5 / eta.powf(p) + eta.powf(q) * lhs + e_s),
            k_third: ratio(t5, eta * lhs + e_s / eta.powf(q)),
        })
        .collect();

    Ok(MultiplierReport {
        p,
        regime,
        window,
        lhs,
        energy_at_s: e_s,
        s1,
        s2,
        s3,
        s4,
        t1,
        t2,
        t3,
        t4,
        t5,
        v1,
        v2,
        v3,
        k_first: ratio(lhs, e_s + s4),
        eta_constants,
        first_set_ratio: ratio(lhs, s1 + s2 + s3),
        second_set_ratio: ratio(s4, t1 + t2 + t3 + t4),
        third_ratio: ratio(2.0 * t5, v1 + v2 + v3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_forcing_gives_parabola() {
        for n in [16, 64, 256] {
            let grid = Grid::new(n).unwrap();
            let v = elliptic_solve(&vec![1.0; n + 1], &grid);
            for (i, vi) in v.iter().enumerate() {
                let x = grid.x(i);
                assert!((vi - x * (x - 1.0) / 2.0).abs() < 1e-14);
            }
            assert!((v[n / 2] + 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let grid = Grid::new(32).unwrap();
        let v = elliptic_multiplier(&[0.0; 33], &[1.0; 33], 2.5, &grid).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
        assert!(elliptic_multiplier(&[0.0; 33], &[1.0; 33], 1.0, &grid).is_err());
    }

    #[test]
    fn converges_at_second_order() {
        // v'' = sin(3 pi x): v = -sin(3 pi x) / (3 pi)^2
        let err = |n: usize| {
            let grid = Grid::new(n).unwrap();
            let h = grid.sample(|x| (3.0 * PI * x).sin());
            let v = elliptic_solve(&h, &grid);
            (0..=n)
                .map(|i| (v[i] + (3.0 * PI * grid.x(i)).sin() / (9.0 * PI * PI)).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(64), err(128), err(256));
        assert!((e1 / e2).log2() > 1.9 && (e2 / e3).log2() > 1.9);
    }

    #[test]
    fn linear_and_odd() {
        let grid = Grid::new(50).unwrap();
        let h1 = grid.sample(|x| x.exp());
        let h2 = grid.sample(|x| (9.0 * x).cos());
        let sum: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| a + b).collect();
        let (v1, v2, v) = (
            elliptic_solve(&h1, &grid),
            elliptic_solve(&h2, &grid),
            elliptic_solve(&sum, &grid),
        );
        for i in 0..=50 {
            assert!((v[i] - v1[i] - v2[i]).abs() < 1e-12);
        }
        let y = grid.sample(|x| (PI * x).sin() * 2.0);
        let ny: Vec<f64> = y.iter().map(|v| -v).collect();
        let beta = vec![1.0; 51];
        for p in [1.5, 3.0] {
            let a = elliptic_multiplier(&y, &beta, p, &grid).unwrap();
            let b = elliptic_multiplier(&ny, &beta, p, &grid).unwrap();
            assert!(a.iter().zip(&b).all(|(u, w)| u == &-w));
        }
    }
}
