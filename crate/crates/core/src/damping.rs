//! Damping coefficient profiles `a(x)`.

use crate::error::{Result, WaveError};
use crate::grid::Grid;
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
enum Kind {
    Zero,
    Constant(f64),
    Indicator {
        b: f64,
        c: f64,
        a0: f64,
    },
    SmoothIndicator {
        b: f64,
        c: f64,
        a0: f64,
        ramp: f64,
    },
    Custom {
        value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        omega: (f64, f64),
        a0: f64,
    },
}

/// Non-negative damping coefficient with its active interval `omega = (b, c)`
/// and lower bound `a0` on it.
#[derive(Clone)]
pub struct DampingProfile {
    kind: Kind,
    label: String,
}

impl fmt::Debug for DampingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DampingProfile")
            .field("label", &self.label)
            .finish()
    }
}

/// C^2 step from 0 to 1 on [0, 1].
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

impl DampingProfile {
    /// `a = 0`: the undamped problem. Does not satisfy the localized damping
    /// hypothesis and is only meant for conservation checks.
    pub fn zero() -> Self {
        Self {
            kind: Kind::Zero,
            label: "zero".into(),
        }
    }

    /// `a = a0` on the whole interval.
    pub fn constant(a0: f64) -> Self {
        Self {
            kind: Kind::Constant(a0),
            label: format!("constant({a0})"),
        }
    }

    /// `a = a0` on `[b, c]`, zero elsewhere.
    pub fn indicator(b: f64, c: f64, a0: f64) -> Self {
        Self {
            kind: Kind::Indicator { b, c, a0 },
            label: format!("indicator({b},{c},{a0})"),
        }
    }

    /// `a = a0` on `[b, c]`, rising from zero over `[b - ramp, b]` with a C^2
    /// quintic step.
    pub fn smooth_indicator(b: f64, c: f64, a0: f64, ramp: f64) -> Self {
        Self {
            kind: Kind::SmoothIndicator { b, c, a0, ramp },
            label: format!("smooth_indicator({b},{c},{a0},{ramp})"),
        }
    }

    pub fn custom(
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        omega: (f64, f64),
        a0: f64,
    ) -> Self {
        Self {
            kind: Kind::Custom {
                value: Arc::new(value),
                omega,
                a0,
            },
            label: label.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero)
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Constant(a0) => *a0,
            Kind::Indicator { b, c, a0 } => {
                if x >= *b && x <= *c {
                    *a0
                } else {
                    0.0
                }
            }
            Kind::SmoothIndicator { b, c, a0, ramp } => {
                if x > *c {
                    0.0
                } else if x >= *b {
                    *a0
                } else if *ramp > 0.0 {
                    a0 * smoothstep((x - (b - ramp)) / ramp)
                } else {
                    0.0
                }
            }
            Kind::Custom { value, .. } => value(x),
        }
    }

    /// Active interval `(b, c)`; `None` for the zero profile.
    pub fn omega(&self) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::Zero => None,
            Kind::Constant(_) => Some((0.0, 1.0)),
            Kind::Indicator { b, c, .. } | Kind::SmoothIndicator { b, c, .. } => Some((*b, *c)),
            Kind::Custom { omega, .. } => Some(*omega),
        }
    }

    pub fn a0(&self) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Constant(a0) => *a0,
            Kind::Indicator { a0, .. }
            | Kind::SmoothIndicator { a0, .. }
            | Kind::Custom { a0, .. } => *a0,
        }
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.sample(|x| self.value(x))
    }

    /// Non-negativity of `a` on [0, 1]. Holds for every profile including
    /// the zero profile.
    pub fn check_nonnegative(&self) -> Result<()> {
        for k in 0..=2000 {
            let x = k as f64 / 2000.0;
            let v = self.value(x);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(WaveError::Hypothesis {
                    hypothesis: "non-negative damping",
                    detail: format!("a({x}) = {v} is not a non-negative number"),
                });
            }
        }
        Ok(())
    }

    /// Sampled localized damping hypothesis: `a >= 0` on [0, 1],
    /// `a >= a0 > 0` on `omega = (b, c)` with `c = 1`.
    pub fn check_localized_damping(&self) -> Result<()> {
        let fail = |detail: String| {
            Err(WaveError::Hypothesis {
                hypothesis: "localized damping",
                detail: format!("a = {}: {detail}", self.label),
            })
        };
        self.check_nonnegative()?;
        let Some((b, c)) = self.omega() else {
            return fail("no damping region".into());
        };
        let a0 = self.a0();
        if !(a0 > 0.0) {
            return fail(format!("lower bound a0 = {a0} must be positive"));
        }
        if c != 1.0 {
            return fail(format!("damping region must touch x = 1, got c = {c}"));
        }
        if !(b >= 0.0 && b < c) {
            return fail(format!("empty or invalid damping region ({b}, {c})"));
        }
        for k in 1..2000 {
            let x = b + (c - b) * k as f64 / 2000.0;
            let v = self.value(x);
            if v < a0 {
                return fail(format!("a({x}) = {v} < a0 = {a0} inside omega"));
            }
        }
        Ok(())
    }
}
