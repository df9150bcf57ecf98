//! Analytic and nodal initial data.

use crate::error::{Result, WaveError};
use crate::grid::Grid;
use crate::state::{riemann_from_physical, riemann_from_slope, RiemannState, BOUNDARY_TOL};
use std::f64::consts::PI;

/// Analytic profile on [0, 1] vanishing at both walls, with its first two
/// derivatives in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Zero,
    /// `amp * sin(k pi x)`.
    Sine {
        k: u32,
        amp: f64,
    },
    /// `amp * (1 - r^2)^4` for `r = (x - center) / width`, `|r| < 1`.
    Bump {
        center: f64,
        width: f64,
        amp: f64,
    },
    /// `sum_k coeffs[k-1] * sin(k pi x)`.
    Series(Vec<f64>),
}

impl Profile {
    pub fn sine(k: u32) -> Self {
        Profile::Sine { k, amp: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Sine { k, amp } if *k == 0 || !amp.is_finite() => Err(WaveError::Invalid(
                format!("sine profile needs k >= 1 and finite amplitude, got k = {k}, amp = {amp}"),
            )),
            Profile::Bump { center, width, amp } => {
                if !(*width > 0.0 && center - width >= 0.0 && center + width <= 1.0)
                    || !amp.is_finite()
                {
                    Err(WaveError::Invalid(format!(
                        "bump support [{}, {}] must lie inside [0, 1]",
                        center - width,
                        center + width
                    )))
                } else {
                    Ok(())
                }
            }
            Profile::Series(c) if c.iter().any(|v| !v.is_finite()) => Err(WaveError::Invalid(
                "series coefficients must be finite".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Derivative of order `order` (0, 1 or 2) at `x`.
    pub fn eval(&self, x: f64, order: u8) -> f64 {
        let sine = |k: f64, amp: f64| {
            let w = k * PI;
            match order {
                0 => amp * (w * x).sin(),
                1 => amp * w * (w * x).cos(),
                _ => -amp * w * w * (w * x).sin(),
            }
        };
        match self {
            Profile::Zero => 0.0,
            Profile::Sine { k, amp } => sine(*k as f64, *amp),
            Profile::Series(c) => c
                .iter()
                .enumerate()
                .map(|(j, &a)| sine((j + 1) as f64, a))
                .sum(),
            Profile::Bump { center, width, amp } => {
                let r = (x - center) / width;
                if r.abs() >= 1.0 {
                    return 0.0;
                }
                let s = 1.0 - r * r;
                match order {
                    0 => amp * s.powi(4),
                    1 => amp * -8.0 * r * s.powi(3) / width,
                    _ => amp * (48.0 * r * r * s * s - 8.0 * s.powi(3)) / (width * width),
                }
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x, 0)
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.eval(x, 1)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.eval(x, 2)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        match self {
            Profile::Zero => Profile::Zero,
            Profile::Sine { k, amp } => Profile::Sine {
                k: *k,
                amp: amp * alpha,
            },
            Profile::Bump { center, width, amp } => Profile::Bump {
                center: *center,
                width: *width,
                amp: amp * alpha,
            },
            Profile::Series(c) => Profile::Series(c.iter().map(|v| v * alpha).collect()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Sine { amp, .. } | Profile::Bump { amp, .. } => *amp == 0.0,
            Profile::Series(c) => c.iter().all(|&v| v == 0.0),
        }
    }
}

/// Initial displacement `z0` and velocity `z1`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Profiles { z0: Profile, z1: Profile },
    Nodal { z0: Vec<f64>, z1: Vec<f64> },
}

/// Nodal samples of the initial data and the derivatives the solvers need.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledData {
    pub z0: Vec<f64>,
    pub z0_x: Vec<f64>,
    pub z0_xx: Vec<f64>,
    pub z1: Vec<f64>,
    pub z1_x: Vec<f64>,
}

impl InitialData {
    pub fn profiles(z0: Profile, z1: Profile) -> Self {
        InitialData::Profiles { z0, z1 }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        match self {
            InitialData::Profiles { z0, z1 } => InitialData::Profiles {
                z0: z0.scaled(alpha),
                z1: z1.scaled(alpha),
            },
            InitialData::Nodal { z0, z1 } => InitialData::Nodal {
                z0: z0.iter().map(|v| v * alpha).collect(),
                z1: z1.iter().map(|v| v * alpha).collect(),
            },
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            InitialData::Profiles { z0, z1 } => {
                z0.validate()?;
                z1.validate()
            }
            InitialData::Nodal { z0, z1 } => {
                grid.check_len(z0)?;
                grid.check_len(z1)
            }
        }
    }

    /// Profiles are differentiated analytically; nodal data with the grid
    /// derivative operator.
    pub fn sample(&self, grid: &Grid) -> Result<SampledData> {
        self.validate(grid)?;
        Ok(match self {
            InitialData::Profiles { z0, z1 } => SampledData {
                z0: grid.sample(|x| z0.value(x)),
                z0_x: grid.sample(|x| z0.d1(x)),
                z0_xx: grid.sample(|x| z0.d2(x)),
                z1: grid.sample(|x| z1.value(x)),
                z1_x: grid.sample(|x| z1.d1(x)),
            },
            InitialData::Nodal { z0, z1 } => {
                let z0_x = grid.derivative(z0);
                SampledData {
                    z0: z0.clone(),
                    z0_xx: grid.derivative(&z0_x),
                    z0_x,
                    z1: z1.clone(),
                    z1_x: grid.derivative(z1),
                }
            }
        })
    }

    pub fn riemann(&self, grid: &Grid) -> Result<RiemannState> {
        match self {
            InitialData::Nodal { z0, z1 } => riemann_from_physical(z0, z1, grid),
            InitialData::Profiles { .. } => {
                let d = self.sample(grid)?;
                let n = grid.n_cells();
                for (what, v) in [("z0", &d.z0), ("z1", &d.z1)] {
                    for (x, value) in [(0.0, v[0]), (1.0, v[n])] {
                        if value.abs() > BOUNDARY_TOL {
                            return Err(WaveError::BoundaryViolation { what, x, value });
                        }
                    }
                }
                Ok(riemann_from_slope(&d.z0_x, &d.z1))
            }
        }
    }
}
