//! Damping nonlinearities `g` and the ratio `nu(x) = g(x) / x`.

use crate::error::{Result, WaveError};
use std::fmt;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Below this magnitude `nu` is evaluated as the midpoint slope `g'(x/2)`,
/// which is second-order accurate and avoids dividing two tiny numbers.
pub const NU_SMALL_ARGUMENT: f64 = 1e-8;

#[derive(Clone)]
enum Kind {
    Linear(f64),
    Arctan,
    Cubic,
    Saturating,
    Polynomial {
        c1: f64,
        c3: f64,
    },
    Custom {
        value: ScalarFn,
        derivative: ScalarFn,
    },
}

/// A damping function together with its derivative.
#[derive(Clone)]
pub struct Nonlinearity {
    kind: Kind,
    label: String,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("label", &self.label)
            .finish()
    }
}

impl Nonlinearity {
    /// `g(s) = s`.
    pub fn identity() -> Self {
        Self {
            kind: Kind::Linear(1.0),
            label: "identity".into(),
        }
    }

    /// `g(s) = k s`.
    pub fn linear(k: f64) -> Self {
        Self {
            kind: Kind::Linear(k),
            label: format!("linear({k})"),
        }
    }

    /// `g(s) = arctan(s)`.
    pub fn arctan() -> Self {
        Self {
            kind: Kind::Arctan,
            label: "arctan".into(),
        }
    }

    /// `g(s) = s + s^3`.
    pub fn cubic() -> Self {
        Self {
            kind: Kind::Cubic,
            label: "cubic".into(),
        }
    }

    /// `g(s) = s / (1 + |s|)`.
    pub fn saturating() -> Self {
        Self {
            kind: Kind::Saturating,
            label: "saturating".into(),
        }
    }

    /// `g(s) = c1 s + c3 s^3`. Not monotone when `c3 < 0`.
    pub fn polynomial(c1: f64, c3: f64) -> Self {
        Self {
            kind: Kind::Polynomial { c1, c3 },
            label: format!("poly({c1},{c3})"),
        }
    }

    /// User-supplied `g` and `g'`. No hypothesis checks are run here; call
    /// [`Nonlinearity::check_monotone_damping`] before trusting it.
    pub fn custom(
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: Kind::Custom {
                value: Arc::new(value),
                derivative: Arc::new(derivative),
            },
            label: label.into(),
        }
    }

    /// The four nonlinearities shipped with the library.
    pub fn library() -> Vec<Self> {
        vec![
            Self::identity(),
            Self::arctan(),
            Self::cubic(),
            Self::saturating(),
        ]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Slope `k` when `g(s) = k s`; lets linear damping use the closed-form
    /// implicit update.
    pub fn linear_slope(&self) -> Option<f64> {
        match self.kind {
            Kind::Linear(k) => Some(k),
            _ => None,
        }
    }

    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        match &self.kind {
            Kind::Linear(k) => k * s,
            Kind::Arctan => s.atan(),
            Kind::Cubic => s + s * s * s,
            Kind::Saturating => s / (1.0 + s.abs()),
            Kind::Polynomial { c1, c3 } => c1 * s + c3 * s * s * s,
            Kind::Custom { value, .. } => value(s),
        }
    }

    #[inline]
    pub fn derivative(&self, s: f64) -> f64 {
        match &self.kind {
            Kind::Linear(k) => *k,
            Kind::Arctan => 1.0 / (1.0 + s * s),
            Kind::Cubic => 1.0 + 3.0 * s * s,
            Kind::Saturating => {
                let d = 1.0 + s.abs();
                1.0 / (d * d)
            }
            Kind::Polynomial { c1, c3 } => c1 + 3.0 * c3 * s * s,
            Kind::Custom { derivative, .. } => derivative(s),
        }
    }

    /// Sampled check of the monotone damping hypothesis: `g(0) = 0`,
    /// `g'(0) > 0`, and on the test lattice `g' >= 0`, `g` non-decreasing and
    /// `g(x) x >= 0`. The error names the first failing lattice point.
    pub fn check_monotone_damping(&self) -> Result<()> {
        let fail = |detail: String| {
            Err(WaveError::Hypothesis {
                hypothesis: "monotone damping",
                detail: format!("g = {}: {detail}", self.label),
            })
        };
        let g0 = self.value(0.0);
        if g0 != 0.0 {
            return fail(format!("g(0) = {g0} != 0"));
        }
        let d0 = self.derivative(0.0);
        if !(d0 > 0.0) {
            return fail(format!("g'(0) = {d0} is not positive"));
        }
        let lattice = test_lattice();
        let mut prev: Option<(f64, f64)> = None;
        for &x in &lattice {
            let gx = self.value(x);
            let dx = self.derivative(x);
            if !gx.is_finite() || !dx.is_finite() {
                return fail(format!("at lattice point x = {x}: non-finite value"));
            }
            if dx < 0.0 {
                return fail(format!("at lattice point x = {x}: g'(x) = {dx} < 0"));
            }
            if gx * x < 0.0 {
                return fail(format!("at lattice point x = {x}: g(x) x = {} < 0", gx * x));
            }
            if let Some((xp, gp)) = prev {
                if gx < gp {
                    return fail(format!(
                        "at lattice point x = {x}: g decreases from {gp} at {xp} to {gx}"
                    ));
                }
            }
            prev = Some((x, gx));
        }
        Ok(())
    }
}

/// Sorted lattice on [-100, 100]: uniform spacing 0.01 on [-10, 10] plus a
/// coarser tail and a geometric cluster around zero.
pub fn test_lattice() -> Vec<f64> {
    let mut pts: Vec<f64> = (-1000..=1000).map(|k| k as f64 * 0.01).collect();
    pts.extend((11..=100).flat_map(|k| [k as f64, -(k as f64)]));
    pts.extend((1..=12).flat_map(|k| {
        let v = 10f64.powi(-k);
        [v, -v]
    }));
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// `nu(x) = g(x) / x`, extended by `nu(0) = g'(0)`.
pub fn nu_ratio(x: f64, g: &Nonlinearity) -> f64 {
    if x == 0.0 {
        g.derivative(0.0)
    } else if x.abs() < NU_SMALL_ARGUMENT {
        g.derivative(0.5 * x)
    } else {
        g.value(x) / x
    }
}

/// Sampled `(min, max)` of `nu` over `[-m, m]` (the constants
/// `nu_1(M)`, `nu_2(M)`); the lattice includes both endpoints.
pub fn nu_bounds(g: &Nonlinearity, m: f64) -> (f64, f64) {
    let m = m.abs();
    let samples = 4000;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..=samples {
        let x = -m + 2.0 * m * k as f64 / samples as f64;
        let v = nu_ratio(x, g);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let v0 = nu_ratio(0.0, g);
    (lo.min(v0), hi.max(v0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn shipped_library_satisfies_monotone_damping() {
        for g in Nonlinearity::library() {
            g.check_monotone_damping()
                .unwrap_or_else(|e| panic!("{}: {e}", g.label()));
        }
    }

    #[test]
    fn softening_cubic_is_rejected_with_lattice_point() {
        let err = Nonlinearity::polynomial(1.0, -1.0)
            .check_monotone_damping()
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("monotone damping"), "{msg}");
        assert!(msg.contains("x = -"), "{msg}");
    }

    #[test]
    fn rejects_bad_origin() {
        let shifted = Nonlinearity::custom("shifted", |s| s + 0.1, |_| 1.0);
        assert!(shifted.check_monotone_damping().is_err());
        let flat = Nonlinearity::custom("flat", |s: f64| s.powi(3), |s| 3.0 * s * s);
        assert!(flat.check_monotone_damping().is_err());
    }

    #[test]
    fn nu_examples() {
        let id = Nonlinearity::identity();
        for x in [-3.0, -1e-9, 0.0, 1e-12, 2.5] {
            assert_eq!(nu_ratio(x, &id), 1.0);
        }
        let at = Nonlinearity::arctan();
        assert!((nu_ratio(1.0, &at) - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(nu_ratio(0.0, &at), 1.0);
    }

    #[test]
    fn nu_is_continuous_at_zero() {
        for g in Nonlinearity::library() {
            let d0 = g.derivative(0.0);
            let mut prev = f64::INFINITY;
            for k in 4..=8 {
                let x = 10f64.powi(-k);
                let gap = (nu_ratio(x, &g) - d0)
                    .abs()
                    .max((nu_ratio(-x, &g) - d0).abs());
                assert!(gap <= prev + 1e-15, "{}: gap grew at 1e-{k}", g.label());
                assert!(gap <= 2.0 * x, "{}: gap {gap} at 1e-{k}", g.label());
                prev = gap;
            }
            assert!(nu_ratio(1e-8, &g) > 0.0);
        }
    }

    #[test]
    fn nu_bounds_for_arctan() {
        let (lo, hi) = nu_bounds(&Nonlinearity::arctan(), 1.0);
        assert!((lo - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(hi, 1.0);
    }
}
