use crate::error::{Result, WaveError};
use crate::grid::Grid;
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
enum Source {
    Constant(f64),
    Function(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
    /// Nodal values at every step time `k dt`, linearly interpolated in time.
    Recorded(Arc<Vec<Vec<f64>>>),
}

/// Coefficient `theta(t, x)` of the auxiliary linear problem with its bounds
/// `0 < theta_1 <= theta_2`, enforced at every query.
#[derive(Clone)]
pub struct ThetaField {
    source: Source,
    bounds: (f64, f64),
}

impl fmt::Debug for ThetaField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.source {
            Source::Constant(v) => format!("constant({v})"),
            Source::Function(_) => "function".into(),
            Source::Recorded(v) => format!("recorded({} steps)", v.len()),
        };
        f.debug_struct("ThetaField")
            .field("source", &kind)
            .field("bounds", &self.bounds)
            .finish()
    }
}

fn check_bounds(lower: f64, upper: f64) -> Result<()> {
    if !(lower > 0.0 && lower <= upper && upper.is_finite()) {
        return Err(WaveError::Hypothesis {
            hypothesis: "theta bounds",
            detail: format!(
                "theta bounds must satisfy 0 < theta_1 <= theta_2, got ({lower}, {upper})"
            ),
        });
    }
    Ok(())
}

fn extremes(values: &[Vec<f64>]) -> (f64, f64) {
    values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

impl ThetaField {
    pub fn constant(theta: f64) -> Result<Self> {
        check_bounds(theta, theta)?;
        Ok(Self {
            source: Source::Constant(theta),
            bounds: (theta, theta),
        })
    }

    pub fn function(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        bounds: (f64, f64),
    ) -> Result<Self> {
        check_bounds(bounds.0, bounds.1)?;
        Ok(Self {
            source: Source::Function(Arc::new(f)),
            bounds,
        })
    }

    /// `values[k][i]` is theta at time `k dt` and node `i`; the bounds are the
    /// realized extremes.
    pub fn recorded(values: Vec<Vec<f64>>) -> Result<Self> {
        let (lo, hi) = extremes(&values);
        check_bounds(lo, hi)?;
        Ok(Self {
            source: Source::Recorded(Arc::new(values)),
            bounds: (lo, hi),
        })
    }

    /// Recorded coefficient that may touch zero (the derivative system uses
    /// `g'(z_t)`, which is only non-negative).
    pub(crate) fn recorded_nonnegative(values: Vec<Vec<f64>>) -> Result<Self> {
        let (lo, hi) = extremes(&values);
        if !(lo >= 0.0 && hi.is_finite()) {
            return Err(WaveError::Invalid(format!(
                "recorded coefficient must be finite and non-negative, range [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            source: Source::Recorded(Arc::new(values)),
            bounds: (lo, hi),
        })
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    /// Checks that a recorded field covers `n_steps` steps on `grid`.
    pub(crate) fn check_coverage(&self, n_steps: usize, grid: &Grid) -> Result<()> {
        if let Source::Recorded(values) = &self.source {
            if values.len() < n_steps + 1 {
                return Err(WaveError::Invalid(format!(
                    "recorded theta has {} time levels, run needs {}",
                    values.len(),
                    n_steps + 1
                )));
            }
            for v in values.iter() {
                grid.check_len(v)?;
            }
        }
        Ok(())
    }

    /// Fills `out` with theta at time `(step + frac) dt` on every node.
    pub(crate) fn sample_into(
        &self,
        step: usize,
        frac: f64,
        grid: &Grid,
        out: &mut [f64],
    ) -> Result<()> {
        let t = (step as f64 + frac) * grid.dx();
        match &self.source {
            Source::Constant(v) => out.fill(*v),
            Source::Function(f) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = f(t, grid.x(i));
                }
            }
            Source::Recorded(values) => {
                let (k, w) = if frac == 0.0 || step + 1 >= values.len() {
                    (step.min(values.len() - 1), 0.0)
                } else {
                    (step, frac)
                };
                if w == 0.0 {
                    out.copy_from_slice(&values[k]);
                } else {
                    let (v0, v1) = (&values[k], &values[k + 1]);
                    for (i, o) in out.iter_mut().enumerate() {
                        *o = (1.0 - w) * v0[i] + w * v1[i];
                    }
                }
                // interpolation stays within the recorded extremes
                return Ok(());
            }
        }
        let (lo, hi) = self.bounds;
        let slack = 1e-12 * hi.max(1.0);
        for (i, &v) in out.iter().enumerate() {
            if !(v >= lo - slack && v <= hi + slack) {
                return Err(WaveError::ThetaBounds {
                    t,
                    x: grid.x(i),
                    value: v,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(())
    }

    /// Theta on every node at time `(step + frac) dt`.
    pub fn value_at_step(&self, step: usize, frac: f64, grid: &Grid) -> Result<Vec<f64>> {
        let mut out = vec![0.0; grid.n_nodes()];
        self.sample_into(step, frac, grid, &mut out)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_enforced() {
        let grid = Grid::new(8).unwrap();
        assert!(ThetaField::constant(0.0).is_err());
        assert!(ThetaField::function(|_, _| 1.0, (2.0, 1.0)).is_err());
        let f = ThetaField::function(|t, _| 1.0 + t, (1.0, 1.5)).unwrap();
        assert!(f.value_at_step(0, 0.5, &grid).is_ok());
        let err = f.value_at_step(8, 0.0, &grid).unwrap_err();
        assert!(matches!(err, WaveError::ThetaBounds { .. }));
    }

    #[test]
    fn recorded_interpolates_linearly() {
        let grid = Grid::new(4).unwrap();
        let f = ThetaField::recorded(vec![vec![1.0; 5], vec![2.0; 5]]).unwrap();
        assert_eq!(f.bounds(), (1.0, 2.0));
        assert_eq!(f.value_at_step(0, 0.25, &grid).unwrap(), vec![1.25; 5]);
        assert_eq!(f.value_at_step(1, 0.0, &grid).unwrap(), vec![2.0; 5]);
        assert!(f.check_coverage(2, &grid).is_err());
        assert!(f.check_coverage(1, &grid).is_ok());
    }
}
