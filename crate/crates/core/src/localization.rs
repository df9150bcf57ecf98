//! Localization triple `(psi, phi, beta)` with nested intervals
//! `Q0 ⊂ Q1 ⊂ Q2 ⊂ omega = (b, 1)`.
//!
//! `Q_i = (b + eps_i, 1]` with `0 < eps_2 < eps_1 < eps_0 < 1 - b`, so `Q0`
//! is the innermost interval next to x = 1. All three functions are
//! piecewise linear:
//!
//! ```text
//! psi  = 1 on x <= b+eps1, ramps to 0 at b+eps0      (psi = 0 on Q0)
//! phi  = 0 on x <= b+eps2, ramps to 1 at b+eps1      (phi = 1 on Q1)
//! beta = 0 on x <= b,      ramps to 1 at b+eps2      (beta = 1 on Q2)
//! ```

use crate::error::{Result, WaveError};
use crate::grid::Grid;
use serde::{Deserialize, Serialize};

/// Half-open interval `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationTriple {
    pub omega: (f64, f64),
    pub epsilons: [f64; 3],
    pub q0: Interval,
    pub q1: Interval,
    pub q2: Interval,
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    pub beta: Vec<f64>,
    /// `(x psi)_x` at the nodes, from the ramp description.
    pub xpsi_x: Vec<f64>,
}

/// Linear ramp from 0 at `lo` to 1 at `hi`.
fn ramp(x: f64, lo: f64, hi: f64) -> f64 {
    ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
}

impl LocalizationTriple {
    fn b(&self) -> f64 {
        self.omega.0
    }

    pub fn psi_at(&self, x: f64) -> f64 {
        let b = self.b();
        1.0 - ramp(x, b + self.epsilons[1], b + self.epsilons[0])
    }

    pub fn phi_at(&self, x: f64) -> f64 {
        let b = self.b();
        ramp(x, b + self.epsilons[2], b + self.epsilons[1])
    }

    pub fn beta_at(&self, x: f64) -> f64 {
        let b = self.b();
        ramp(x, b, b + self.epsilons[2])
    }

    /// `(psi, phi, beta)` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        (self.psi_at(x), self.phi_at(x), self.beta_at(x))
    }

    /// `(x psi)_x = psi + x psi'`; on the ramp `psi' = -1 / (eps0 - eps1)`.
    pub fn xpsi_x_at(&self, x: f64) -> f64 {
        let b = self.b();
        let (lo, hi) = (b + self.epsilons[1], b + self.epsilons[0]);
        let slope = if x > lo && x < hi {
            -1.0 / (hi - lo)
        } else {
            0.0
        };
        self.psi_at(x) + x * slope
    }
}

/// Default epsilons `eps_i = (1 - b)(4 - i) / 8`.
pub fn default_epsilons(b: f64) -> [f64; 3] {
    let w = 1.0 - b;
    [w * 4.0 / 8.0, w * 3.0 / 8.0, w * 2.0 / 8.0]
}

pub fn make_localization(
    omega: (f64, f64),
    epsilons: [f64; 3],
    grid: &Grid,
) -> Result<LocalizationTriple> {
    let (b, c) = omega;
    if c != 1.0 || !(0.0..1.0).contains(&b) {
        return Err(WaveError::Invalid(format!(
            "localization needs omega = (b, 1) with 0 <= b < 1, got ({b}, {c})"
        )));
    }
    let [e0, e1, e2] = epsilons;
    if !(0.0 < e2 && e2 < e1 && e1 < e0 && e0 < 1.0 - b) {
        return Err(WaveError::Invalid(format!(
            "epsilons must satisfy 0 < eps2 < eps1 < eps0 < 1 - b = {}, got [{e0}, {e1}, {e2}]",
            1.0 - b
        )));
    }
    let interval = |e: f64| Interval { lo: b + e, hi: 1.0 };
    let mut triple = LocalizationTriple {
        omega,
        epsilons,
        q0: interval(e0),
        q1: interval(e1),
        q2: interval(e2),
        psi: Vec::new(),
        phi: Vec::new(),
        beta: Vec::new(),
        xpsi_x: Vec::new(),
    };
    triple.psi = grid.sample(|x| triple.psi_at(x));
    triple.phi = grid.sample(|x| triple.phi_at(x));
    triple.beta = grid.sample(|x| triple.beta_at(x));
    triple.xpsi_x = grid.sample(|x| triple.xpsi_x_at(x));
    Ok(triple)
}
