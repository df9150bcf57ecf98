//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use wavelab_cli::verify::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for c in &CRITERIA {
        let label = format!("criterion_{:02}", c.id);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = std::time::Instant::now();
        let r = run_criterion(c.id).expect("listed criterion");
        println!("{r} ({:.1} s)", start.elapsed().as_secs_f64());
        ran += 1;
        if !r.passed {
            failed += 1;
        }
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
