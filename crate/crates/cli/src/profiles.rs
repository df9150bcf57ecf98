//! Named analytic profiles written as `name(arg, ..., key=value)`.
//!
//! ```text
//! g:      identity | linear(k) | arctan | cubic | saturating | poly(c1,c3)
//! a:      zero | constant(a0) | indicator(b,c,a0) | smooth_indicator(b,c,a0[,ramp=0.1])
//! z0, z1: zero | sine(k[,amp=1]) | bump(center,width[,amp=1]) | random(modes[,amp=1])
//! ```
//!
//! Arguments bind by position or by name; `Display` writes the canonical form
//! with every argument, which parses back to the same value.

use crate::error::{CliError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use wavelab_core::{DampingProfile, Nonlinearity, Profile};

struct Call {
    name: String,
    positional: Vec<f64>,
    named: Vec<(String, f64)>,
}

fn parse_number(text: &str, whole: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("bad number '{}' in '{whole}'", text.trim())))
}

fn parse_call(text: &str) -> Result<Call> {
    let text = text.trim();
    let (name, args) = match text.find('(') {
        None => (text, ""),
        Some(open) => {
            let inner = text[open + 1..].strip_suffix(')').ok_or_else(|| {
                CliError::Config(format!("missing closing parenthesis in '{text}'"))
            })?;
            (&text[..open], inner)
        }
    };
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(CliError::Config(format!("bad profile name in '{text}'")));
    }
    let mut call = Call {
        name: name.to_string(),
        positional: Vec::new(),
        named: Vec::new(),
    };
    if args.trim().is_empty() {
        return Ok(call);
    }
    for arg in args.split(',') {
        match arg.split_once('=') {
            Some((key, value)) => call
                .named
                .push((key.trim().to_string(), parse_number(value, text)?)),
            None => {
                if !call.named.is_empty() {
                    return Err(CliError::Config(format!(
                        "positional argument after a named one in '{text}'"
                    )));
                }
                call.positional.push(parse_number(arg, text)?);
            }
        }
    }
    Ok(call)
}

impl Call {
    /// Binds arguments to `params`; `None` marks a required parameter.
    fn bind(&self, params: &[(&str, Option<f64>)], whole: &str) -> Result<Vec<f64>> {
        if self.positional.len() > params.len() {
            return Err(CliError::Config(format!(
                "'{}' takes at most {} arguments, got {} in '{whole}'",
                self.name,
                params.len(),
                self.positional.len()
            )));
        }
        let mut values: Vec<Option<f64>> = vec![None; params.len()];
        for (slot, v) in values.iter_mut().zip(&self.positional) {
            *slot = Some(*v);
        }
        for (key, v) in &self.named {
            let k = params.iter().position(|(p, _)| p == key).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown argument '{key}' for '{}' in '{whole}'",
                    self.name
                ))
            })?;
            if values[k].replace(*v).is_some() {
                return Err(CliError::Config(format!(
                    "argument '{key}' given twice in '{whole}'"
                )));
            }
        }
        values
            .iter()
            .zip(params)
            .map(|(v, (p, default))| {
                v.or(*default).ok_or_else(|| {
                    CliError::Config(format!(
                        "missing argument '{p}' for '{}' in '{whole}'",
                        self.name
                    ))
                })
            })
            .collect()
    }
}

fn unknown(kind: &str, name: &str, known: &str) -> CliError {
    CliError::Config(format!("unknown {kind} '{name}', expected one of: {known}"))
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonlinearitySpec {
    Identity,
    Linear(f64),
    Arctan,
    Cubic,
    Saturating,
    Poly(f64, f64),
}

impl NonlinearitySpec {
    pub fn build(&self) -> Nonlinearity {
        match *self {
            NonlinearitySpec::Identity => Nonlinearity::identity(),
            NonlinearitySpec::Linear(k) => Nonlinearity::linear(k),
            NonlinearitySpec::Arctan => Nonlinearity::arctan(),
            NonlinearitySpec::Cubic => Nonlinearity::cubic(),
            NonlinearitySpec::Saturating => Nonlinearity::saturating(),
            NonlinearitySpec::Poly(c1, c3) => Nonlinearity::polynomial(c1, c3),
        }
    }
}

impl fmt::Display for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearitySpec::Identity => write!(f, "identity"),
            NonlinearitySpec::Linear(k) => write!(f, "linear({k:?})"),
            NonlinearitySpec::Arctan => write!(f, "arctan"),
            NonlinearitySpec::Cubic => write!(f, "cubic"),
            NonlinearitySpec::Saturating => write!(f, "saturating"),
            NonlinearitySpec::Poly(c1, c3) => write!(f, "poly({c1:?},{c3:?})"),
        }
    }
}

impl FromStr for NonlinearitySpec {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        let call = parse_call(s)?;
        Ok(match call.name.as_str() {
            "identity" => {
                call.bind(&[], s)?;
                NonlinearitySpec::Identity
            }
            "linear" => NonlinearitySpec::Linear(call.bind(&[("k", None)], s)?[0]),
            "arctan" => {
                call.bind(&[], s)?;
                NonlinearitySpec::Arctan
            }
            "cubic" => {
                call.bind(&[], s)?;
                NonlinearitySpec::Cubic
            }
            "saturating" => {
                call.bind(&[], s)?;
                NonlinearitySpec::Saturating
            }
            "poly" => {
                let v = call.bind(&[("c1", None), ("c3", None)], s)?;
                NonlinearitySpec::Poly(v[0], v[1])
            }
            other => {
                return Err(unknown(
                    "nonlinearity",
                    other,
                    "identity, linear, arctan, cubic, saturating, poly",
                ))
            }
        })
    }
}

string_serde!(NonlinearitySpec);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DampingSpec {
    Zero,
    Constant(f64),
    Indicator { b: f64, c: f64, a0: f64 },
    SmoothIndicator { b: f64, c: f64, a0: f64, ramp: f64 },
}

/// Default ramp width of `smooth_indicator`.
pub const DEFAULT_RAMP: f64 = 0.1;

impl DampingSpec {
    pub fn build(&self) -> DampingProfile {
        match *self {
            DampingSpec::Zero => DampingProfile::zero(),
            DampingSpec::Constant(a0) => DampingProfile::constant(a0),
            DampingSpec::Indicator { b, c, a0 } => DampingProfile::indicator(b, c, a0),
            DampingSpec::SmoothIndicator { b, c, a0, ramp } => {
                DampingProfile::smooth_indicator(b, c, a0, ramp)
            }
        }
    }
}

impl fmt::Display for DampingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DampingSpec::Zero => write!(f, "zero"),
            DampingSpec::Constant(a0) => write!(f, "constant({a0:?})"),
            DampingSpec::Indicator { b, c, a0 } => write!(f, "indicator({b:?},{c:?},{a0:?})"),
            DampingSpec::SmoothIndicator { b, c, a0, ramp } => {
                write!(f, "smooth_indicator({b:?},{c:?},{a0:?},{ramp:?})")
            }
        }
    }
}

impl FromStr for DampingSpec {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        let call = parse_call(s)?;
        let interval = [("b", None), ("c", None), ("a0", None)];
        Ok(match call.name.as_str() {
            "zero" => {
                call.bind(&[], s)?;
                DampingSpec::Zero
            }
            "constant" => DampingSpec::Constant(call.bind(&[("a0", None)], s)?[0]),
            "indicator" => {
                let v = call.bind(&interval, s)?;
                DampingSpec::Indicator {
                    b: v[0],
                    c: v[1],
                    a0: v[2],
                }
            }
            "smooth_indicator" => {
                let v = call.bind(
                    &[
                        ("b", None),
                        ("c", None),
                        ("a0", None),
                        ("ramp", Some(DEFAULT_RAMP)),
                    ],
                    s,
                )?;
                DampingSpec::SmoothIndicator {
                    b: v[0],
                    c: v[1],
                    a0: v[2],
                    ramp: v[3],
                }
            }
            other => {
                return Err(unknown(
                    "damping profile",
                    other,
                    "zero, constant, indicator, smooth_indicator",
                ))
            }
        })
    }
}

string_serde!(DampingSpec);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileSpec {
    Zero,
    Sine {
        k: u32,
        amp: f64,
    },
    Bump {
        center: f64,
        width: f64,
        amp: f64,
    },
    /// Sine series with `modes` terms, coefficient `k` drawn uniformly from
    /// `amp [-1, 1] / k^2` with the suite seed.
    Random {
        modes: u32,
        amp: f64,
    },
}

fn positive_integer(v: f64, what: &str, whole: &str) -> Result<u32> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as u32)
    } else {
        Err(CliError::Config(format!(
            "'{what}' must be a positive integer, got {v} in '{whole}'"
        )))
    }
}

impl ProfileSpec {
    /// `stream` separates the random draws of different fields.
    pub fn build(&self, seed: u64, stream: u64) -> Profile {
        match *self {
            ProfileSpec::Zero => Profile::Zero,
            ProfileSpec::Sine { k, amp } => Profile::Sine { k, amp },
            ProfileSpec::Bump { center, width, amp } => Profile::Bump { center, width, amp },
            ProfileSpec::Random { modes, amp } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream);
                Profile::Series(
                    (1..=modes)
                        .map(|k| amp * rng.gen_range(-1.0..=1.0) / (k as f64 * k as f64))
                        .collect(),
                )
            }
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Zero => write!(f, "zero"),
            ProfileSpec::Sine { k, amp } => write!(f, "sine({k},{amp:?})"),
            ProfileSpec::Bump { center, width, amp } => {
                write!(f, "bump({center:?},{width:?},{amp:?})")
            }
            ProfileSpec::Random { modes, amp } => write!(f, "random({modes},{amp:?})"),
        }
    }
}

impl FromStr for ProfileSpec {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        let call = parse_call(s)?;
        Ok(match call.name.as_str() {
            "zero" => {
                call.bind(&[], s)?;
                ProfileSpec::Zero
            }
            "sine" => {
                let v = call.bind(&[("k", None), ("amp", Some(1.0))], s)?;
                ProfileSpec::Sine {
                    k: positive_integer(v[0], "k", s)?,
                    amp: v[1],
                }
            }
            "bump" => {
                let v = call.bind(&[("center", None), ("width", None), ("amp", Some(1.0))], s)?;
                ProfileSpec::Bump {
                    center: v[0],
                    width: v[1],
                    amp: v[2],
                }
            }
            "random" => {
                let v = call.bind(&[("modes", None), ("amp", Some(1.0))], s)?;
                ProfileSpec::Random {
                    modes: positive_integer(v[0], "modes", s)?,
                    amp: v[1],
                }
            }
            other => return Err(unknown("profile", other, "zero, sine, bump, random")),
        })
    }
}

string_serde!(ProfileSpec);
