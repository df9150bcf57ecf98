use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wavelab_cli::experiments::run_suite;
use wavelab_cli::reports::{emit_reports, exit_code};
use wavelab_cli::{oracle, parse_suite, verify, ExperimentKind};

#[derive(Parser)]
#[command(name = "wavelab", version, about = "Damped wave equation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite file and write energies_<name>.csv / summary_<name>.json.
    Run {
        suite: PathBuf,
        /// Output directory; WAVELAB_OUT takes precedence.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the built-in acceptance suite.
    Verify {
        /// Only these criteria (1-13).
        #[arg(long = "only", value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Print a reference solution.
    Oracle {
        #[arg(value_parser = oracle::CASES)]
        case: String,
    },
}

fn run(suite_path: PathBuf, out: Option<PathBuf>, jobs: Option<usize>) -> Result<u8, String> {
    let text = std::fs::read_to_string(&suite_path)
        .map_err(|e| format!("cannot read {}: {e}", suite_path.display()))?;
    let suite = parse_suite(&text).map_err(|e| format!("{}: {e}", suite_path.display()))?;
    let dir = std::env::var_os("WAVELAB_OUT")
        .map(PathBuf::from)
        .or(out)
        .unwrap_or_else(|| suite.options.output_dir.clone());
    if suite.kind() == ExperimentKind::Verify {
        return Ok(verify_all(&[]));
    }
    let outcomes = run_suite(&suite, jobs).map_err(|e| e.to_string())?;
    emit_reports(&outcomes, &dir).map_err(|e| e.to_string())?;
    for o in &outcomes {
        let s = &o.summary;
        let failed: Vec<&str> = s
            .assertions
            .iter()
            .filter(|a| !a.passed)
            .map(|a| a.name.as_str())
            .collect();
        if failed.is_empty() {
            println!("[PASS] {}", s.name);
        } else {
            println!("[FAIL] {}: {}", s.name, failed.join(", "));
            for a in s.assertions.iter().filter(|a| !a.passed) {
                println!("       {}: {}", a.name, a.detail);
            }
        }
    }
    println!("reports written to {}", dir.display());
    Ok(exit_code(&outcomes) as u8)
}

fn verify_all(only: &[u8]) -> u8 {
    let results = if only.is_empty() {
        verify::run_all()
    } else {
        only.iter()
            .filter_map(|&id| verify::run_criterion(id))
            .collect()
    };
    for r in &results {
        println!("{r}");
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", results.len());
    u8::from(passed != results.len() || results.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { suite, out, jobs } => match run(suite, out, jobs) {
            Ok(code) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Verify { only } => ExitCode::from(verify_all(&only)),
        Command::Oracle { case } => match oracle::report(&case) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
