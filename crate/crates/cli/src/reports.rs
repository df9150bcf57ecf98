//! `energies_<name>.csv` and `summary_<name>.json` writers.

use crate::error::{CliError, Result};
use crate::experiments::{Outcome, Summary};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use wavelab_core::Trajectory;

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

pub fn csv_header(traj: &Trajectory) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    header.extend(traj.diagnostic_names());
    header
}

pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(traj))?;
    for (k, &t) in traj.times.iter().enumerate() {
        let mut row = vec![format_number(t)];
        row.extend(traj.diagnostic_row(k).into_iter().map(format_number));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

pub fn csv_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("energies_{name}.csv"))
}

pub fn summary_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("summary_{name}.json"))
}

pub fn summary_json(summary: &Summary) -> Result<String> {
    Ok(serde_json::to_string_pretty(summary)? + "\n")
}

/// Writes the CSV (when the run produced a trajectory) and the summary of
/// every outcome into `dir`; returns the paths written.
pub fn emit_reports(outcomes: &[Outcome], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for o in outcomes {
        let name = &o.summary.name;
        if let Some(traj) = &o.trajectory {
            let path = csv_path(dir, name);
            let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
            write_csv(traj, std::io::BufWriter::new(file))?;
            written.push(path);
        }
        let path = summary_path(dir, name);
        fs::write(&path, summary_json(&o.summary)?).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// 0 iff every enabled assertion of every outcome passed.
pub fn exit_code(outcomes: &[Outcome]) -> i32 {
    if outcomes.iter().all(Outcome::passed) {
        0
    } else {
        1
    }
}
