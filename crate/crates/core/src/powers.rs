//! Signed powers and the modified convex pair used for exponents in (1, 2).

use crate::error::{Result, WaveError};
use serde::{Deserialize, Serialize};

/// `sgn(s) |s|^r`, with the selection `sgn(0) = 0`.
pub fn signed_power(s: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(WaveError::Domain(format!(
            "signed power exponent must be >= 0, got {r}"
        )));
    }
    Ok(signed_power_unchecked(s, r))
}

#[inline]
pub(crate) fn signed_power_unchecked(s: f64, r: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else if r == 1.0 {
        s
    } else {
        s.signum() * s.abs().powf(r)
    }
}

/// Modified nonlinearity and its primitive for 1 < p < 2:
/// `g(y) = sgn(y)[(|y|+1)^(p-1) - 1]`, `G(y) = [(|y|+1)^p - 1]/p - |y|`.
pub fn modified_fg(y: f64, p: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p < 2.0) {
        return Err(WaveError::Domain(format!(
            "modified pair requires 1 < p < 2, got {p}"
        )));
    }
    Ok((modified_g(y, p), modified_big_g(y, p)))
}

#[inline]
pub(crate) fn modified_g(y: f64, p: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    // (1+|y|)^(p-1) - 1 without cancellation for small |y|
    y.signum() * ((p - 1.0) * y.abs().ln_1p()).exp_m1()
}

#[inline]
pub(crate) fn modified_big_g(y: f64, p: f64) -> f64 {
    let a = y.abs();
    if a < 1e-4 {
        // Taylor series: (p-1)/2 a^2 + (p-1)(p-2)/6 a^3 + (p-1)(p-2)(p-3)/24 a^4
        let c2 = (p - 1.0) / 2.0;
        let c3 = c2 * (p - 2.0) / 3.0;
        let c4 = c3 * (p - 3.0) / 4.0;
        return a * a * (c2 + a * (c3 + a * c4));
    }
    (p * a.ln_1p()).exp_m1() / p - a
}

/// Derivative of [`modified_g`]: `(p-1)(|y|+1)^(p-2)`.
#[inline]
pub(crate) fn modified_g_prime(y: f64, p: f64) -> f64 {
    (p - 1.0) * (1.0 + y.abs()).powf(p - 2.0)
}

/// An energy exponent with its conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PExponent {
    p: f64,
}

impl PExponent {
    /// Exponents admissible for simulation and energy evaluation: p >= 1.
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(WaveError::Domain(format!("p must be in [1, inf), got {p}")));
        }
        Ok(Self { p })
    }

    /// Exponents admissible for stability statements: 1 < p < inf.
    pub fn for_stability(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(WaveError::Domain(format!(
                "stability requires 1 < p < inf, got {p}"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `p / (p - 1)`; infinite for p = 1.
    pub fn q(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn signed_power_examples() {
        assert_eq!(signed_power(2.0, 3.0).unwrap(), 8.0);
        assert_eq!(signed_power(-2.0, 3.0).unwrap(), -8.0);
        assert_eq!(signed_power(0.0, 0.5).unwrap(), 0.0);
        assert!(signed_power(1.0, -0.5).is_err());
    }

    #[test]
    fn signed_power_derivative() {
        let h = 1e-6;
        for r in [1.0, 1.5, 2.0, 3.5] {
            for s in [-2.0, -0.5, 0.5, 2.0_f64] {
                let fd =
                    (signed_power(s + h, r).unwrap() - signed_power(s - h, r).unwrap()) / (2.0 * h);
                let exact = r * s.abs().powf(r - 1.0);
                assert!((fd - exact).abs() < 1e-6, "r={r} s={s}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn modified_pair_examples() {
        assert_eq!(modified_fg(0.0, 1.5).unwrap(), (0.0, 0.0));
        let (g, big_g) = modified_fg(1.0, 1.5).unwrap();
        assert!((g - 0.414_213_562_373_095).abs() < 1e-12);
        assert!((big_g - 0.218_951_416_497_460).abs() < 1e-12);
        let (gm, big_gm) = modified_fg(-1.0, 1.5).unwrap();
        assert_eq!(gm, -g);
        assert_eq!(big_gm, big_g);
        assert!(modified_fg(1.0, 2.0).is_err());
        assert!(modified_fg(1.0, 1.0).is_err());
    }

    #[test]
    fn modified_big_g_derivative_matches_g() {
        let h = 1e-6;
        for p in [1.1, 1.5, 1.9] {
            for y in [-3.0, -1.0, -0.2, 0.3, 1.0, 4.0] {
                let fd = (modified_big_g(y + h, p) - modified_big_g(y - h, p)) / (2.0 * h);
                assert!((fd - modified_g(y, p)).abs() < 1e-8, "p={p} y={y}");
            }
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        // near the switch the closed form is still accurate to ~1e-11 relative
        for p in [1.2, 1.5, 1.8] {
            for y in [0.9e-4, 0.999_999e-4] {
                let closed = (p * f64::ln_1p(y)).exp_m1() / p - y;
                let series = modified_big_g(y, p);
                assert!(((series - closed) / closed).abs() < 1e-8, "p={p} y={y}");
            }
        }
    }

    #[test]
    fn conjugate_exponent() {
        let e = PExponent::new(3.0).unwrap();
        assert!((1.0 / e.p() + 1.0 / e.q() - 1.0).abs() < 1e-15);
        assert!(PExponent::new(1.0).is_ok());
        assert!(PExponent::for_stability(1.0).is_err());
        assert!(PExponent::new(0.5).is_err());
    }

    proptest! {
        #[test]
        fn signed_power_is_odd(s in -50.0f64..50.0, r in 0.01f64..5.0) {
            let a = signed_power(s, r).unwrap();
            let b = signed_power(-s, r).unwrap();
            prop_assert_eq!(a, -b);
        }

        #[test]
        fn modified_big_g_is_convex_and_nonnegative(y in -20.0f64..20.0, p in 1.01f64..1.99) {
            let h = 1e-3;
            let second = modified_big_g(y + h, p) - 2.0 * modified_big_g(y, p) + modified_big_g(y - h, p);
            prop_assert!(second >= -1e-12);
            prop_assert!(modified_big_g(y, p) >= 0.0);
            prop_assert!(modified_g(y, p) * y >= 0.0);
        }
    }
}
