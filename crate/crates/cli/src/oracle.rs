//! Reference values printed by `wavelab oracle <case>`.

use crate::error::{CliError, Result};
use std::f64::consts::PI;
use std::fmt::Write;
use wavelab_core::multipliers::elliptic_solve;
use wavelab_core::oracle::{dalembert, modal_rate};
use wavelab_core::Grid;

pub const CASES: [&str; 4] = ["modal", "overdamped", "dalembert", "elliptic"];

fn modal(a0: f64) -> String {
    let m = modal_rate(a0, 1);
    format!(
        "lambda^2 + {a0} lambda + pi^2 = 0\nlambda_+ = {:?} + {:?}i\nlambda_- = {:?} + {:?}i\nenergy_rate = {:?}\n",
        m.lambda_plus.re, m.lambda_plus.im, m.lambda_minus.re, m.lambda_minus.im, m.energy_rate
    )
}

pub fn report(case: &str) -> Result<String> {
    let mut out = String::new();
    match case {
        "modal" => out = modal(0.5),
        "overdamped" => out = modal(10.0),
        "dalembert" => {
            let z0 = |x: f64| (PI * x).sin();
            let z1 = |x: f64| 0.5 * (2.0 * PI * x).sin();
            writeln!(out, "z0 = sin(pi x), z1 = 0.5 sin(2 pi x), no damping").unwrap();
            writeln!(out, "t,x,z").unwrap();
            for t in [0.0, 0.25, 0.5, 1.0, 2.0] {
                for k in 0..=8 {
                    let x = k as f64 / 8.0;
                    writeln!(out, "{t:?},{x:?},{:?}", dalembert(&z0, &z1, t, x)).unwrap();
                }
            }
        }
        "elliptic" => {
            let grid = Grid::new(16)?;
            let v = elliptic_solve(&vec![1.0; grid.n_nodes()], &grid);
            writeln!(out, "v'' = 1, v(0) = v(1) = 0, exact x(x-1)/2").unwrap();
            writeln!(out, "x,v,exact").unwrap();
            for (i, vi) in v.iter().enumerate() {
                let x = grid.x(i);
                writeln!(out, "{x:?},{vi:?},{:?}", 0.5 * x * (x - 1.0)).unwrap();
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown oracle case '{other}', expected one of: {}",
                CASES.join(", ")
            )))
        }
    }
    Ok(out)
}
