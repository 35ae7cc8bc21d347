//! Experiment driver for the `helmloc` command-line tool: config parsing,
//! dispatch, and deterministic report files.

pub mod config;
pub mod run;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub use config::{parse_config, Command, ConfigError, ExperimentConfig};
pub use run::{run_experiment, Outcome};

/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
}

/// Pretty JSON with a trailing newline. Keys are sorted, so equal reports
/// serialize to equal bytes.
pub fn report_json(outcome: &Outcome) -> String {
    let mut s = serde_json::to_string_pretty(&outcome.report).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Paths of the JSON and CSV outputs for a config named `stem`.
pub fn output_paths(cfg: &ExperimentConfig, out_dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    let json = cfg.output.json.clone().unwrap_or_else(|| format!("{stem}.json"));
    let csv = cfg.output.csv.clone().unwrap_or_else(|| format!("{stem}.csv"));
    (out_dir.join(json), out_dir.join(csv))
}

/// Writes the report (and CSV table, if any); returns the JSON path.
pub fn write_outputs(cfg: &ExperimentConfig, outcome: &Outcome, out_dir: &Path, stem: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let (json_path, csv_path) = output_paths(cfg, out_dir, stem);
    fs::write(&json_path, report_json(outcome))?;
    if let Some(csv) = &outcome.csv {
        fs::write(&csv_path, csv)?;
    }
    Ok(json_path)
}
