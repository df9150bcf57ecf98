//! Reference solutions: d'Alembert's formula for the undamped problem and the
//! modal roots of constant linear damping.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Maps `y` into `[0, 1]` through the odd 2-periodic reflection; returns the
/// sign picked up by an odd extension.
fn fold(y: f64) -> (f64, f64) {
    let r = y - 2.0 * ((y + 1.0) / 2.0).floor();
    if r < 0.0 {
        (-1.0, -r)
    } else {
        (1.0, r.min(1.0))
    }
}

fn odd_extension(f: &dyn Fn(f64) -> f64, y: f64) -> f64 {
    let (s, r) = fold(y);
    s * f(r)
}

fn even_extension(f: &dyn Fn(f64) -> f64, y: f64) -> f64 {
    f(fold(y).1)
}

/// Romberg integration (trapezoid with Richardson extrapolation) on
/// `[0, b]` until successive diagonal entries agree to `tol`.
fn romberg(f: &dyn Fn(f64) -> f64, b: f64, tol: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    const LEVELS: usize = 24;
    let mut prev = vec![0.5 * b * (f(0.0) + f(b))];
    for level in 1..LEVELS {
        let n = 1usize << level;
        let h = b / n as f64;
        let mid: f64 = (0..n / 2).map(|j| f((2 * j + 1) as f64 * h)).sum();
        let mut row = vec![0.5 * prev[0] + h * mid];
        for m in 1..=level {
            let c = 4f64.powi(m as i32);
            let v = (c * row[m - 1] - prev[m - 1]) / (c - 1.0);
            row.push(v);
        }
        let done = (row[level] - prev[level - 1]).abs() <= tol * row[level].abs().max(1.0);
        if done && level >= 4 {
            return row[level];
        }
        prev = row;
    }
    prev[LEVELS - 1]
}

/// `z(t, x)` for the undamped problem with Dirichlet walls:
/// `[z0~(x+t) + z0~(x-t)]/2 + (1/2) int_{x-t}^{x+t} z1~`, with `~` the odd
/// 2-periodic extension.
pub fn dalembert(z0: &dyn Fn(f64) -> f64, z1: &dyn Fn(f64) -> f64, t: f64, x: f64) -> f64 {
    let wave = 0.5 * (odd_extension(z0, x + t) + odd_extension(z0, x - t));
    // The primitive of an odd 2-periodic function with zero mean is even and
    // 2-periodic, so only the folded distances matter.
    let primitive = |y: f64| romberg(z1, fold(y).1, 1e-13);
    wave + 0.5 * (primitive(x + t) - primitive(x - t))
}

/// Riemann invariants of the d'Alembert solution given `z0'` and `z1`:
/// `rho = z0'~(x+t) + z1~(x+t)`, `xi = z0'~(x-t) - z1~(x-t)`, where `z0'` is
/// extended evenly and `z1` oddly.
pub fn dalembert_riemann(
    z0_prime: &dyn Fn(f64) -> f64,
    z1: &dyn Fn(f64) -> f64,
    t: f64,
    x: f64,
) -> (f64, f64) {
    let rho = even_extension(z0_prime, x + t) + odd_extension(z1, x + t);
    let xi = even_extension(z0_prime, x - t) - odd_extension(z1, x - t);
    (rho, xi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRoot {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalRate {
    pub lambda_plus: ComplexRoot,
    pub lambda_minus: ComplexRoot,
    /// `-2 max Re(lambda)`: decay rate of the mode's energy.
    pub energy_rate: f64,
}

/// Roots of `lambda^2 + a0 lambda + k^2 pi^2 = 0`.
pub fn modal_rate(a0: f64, k: u32) -> ModalRate {
    let w2 = (k as f64 * PI).powi(2);
    let disc = a0 * a0 - 4.0 * w2;
    let (plus, minus) = if disc < 0.0 {
        let im = 0.5 * (-disc).sqrt();
        (
            ComplexRoot { re: -0.5 * a0, im },
            ComplexRoot {
                re: -0.5 * a0,
                im: -im,
            },
        )
    } else {
        // the larger root from the product of roots avoids cancellation
        let minus = -0.5 * (a0 + disc.sqrt());
        (
            ComplexRoot {
                re: w2 / minus,
                im: 0.0,
            },
            ComplexRoot { re: minus, im: 0.0 },
        )
    };
    ModalRate {
        lambda_plus: plus,
        lambda_minus: minus,
        energy_rate: -2.0 * plus.re.max(minus.re),
    }
}
