use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use helmloc_cli::{load_config, run_experiment, write_outputs, ExperimentConfig, EXIT_CONFIG};
use rayon::prelude::*;

/// Numerical checks for generalized Helmholtz equations Φ(−Δ)u = Φ(1)u.
#[derive(Parser, Debug)]
#[command(name = "helmloc", version)]
struct Args {
    /// Experiment config (TOML), or a directory of configs for batch mode.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for JSON reports and CSV tables.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for batch mode.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Overrides the config pass threshold.
    #[arg(long)]
    threshold: Option<f64>,
}

struct RunResult {
    stem: String,
    command: String,
    status: i32,
    message: String,
}

fn stem_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into())
}

fn apply_overrides(mut cfg: ExperimentConfig, args: &Args) -> ExperimentConfig {
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.threshold {
        cfg.threshold = Some(t);
    }
    cfg
}

fn run_one(path: &Path, args: &Args) -> RunResult {
    let stem = stem_of(path);
    let cfg = match load_config(path) {
        Ok(c) => apply_overrides(c, args),
        Err(e) => {
            return RunResult { stem, command: "-".into(), status: EXIT_CONFIG, message: format!("config error: {e}") }
        }
    };
    let outcome = run_experiment(&cfg, path.parent());
    let command = cfg.command.as_str().to_string();
    match write_outputs(&cfg, &outcome, &args.out, &stem) {
        Ok(p) => RunResult {
            stem,
            command,
            status: outcome.exit_code(),
            message: format!("{} ({})", if outcome.pass { "pass" } else { "FAIL" }, p.display()),
        },
        Err(e) => RunResult { stem, command, status: EXIT_CONFIG, message: format!("writing outputs: {e}") },
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(t) = args.threshold {
        if !(t.is_finite() && t >= 0.0) {
            eprintln!("error: --threshold must be finite and ≥ 0");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    if !args.config.is_dir() {
        let r = run_one(&args.config, &args);
        if r.status == EXIT_CONFIG {
            eprintln!("error: {}", r.message);
        } else {
            println!("{} {}: {}", r.stem, r.command, r.message);
        }
        return ExitCode::from(r.status as u8);
    }

    let mut paths: Vec<PathBuf> = match std::fs::read_dir(&args.config) {
        Ok(rd) => {
            rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "toml")).collect()
        }
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    paths.sort();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let results: Vec<RunResult> = pool.install(|| paths.par_iter().map(|p| run_one(p, &args)).collect());

    let mut summary = String::from("config,command,status,message\n");
    for r in &results {
        println!("{:<32} {:<18} {} {}", r.stem, r.command, r.status, r.message);
        summary.push_str(&format!("{},{},{},\"{}\"\n", r.stem, r.command, r.status, r.message.replace('"', "'")));
    }
    if let Err(e) =
        std::fs::create_dir_all(&args.out).and_then(|_| std::fs::write(args.out.join("summary.csv"), summary))
    {
        eprintln!("error: writing summary: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let status = if results.iter().any(|r| r.status == EXIT_CONFIG) {
        EXIT_CONFIG
    } else {
        results.iter().map(|r| r.status).max().unwrap_or(0)
    };
    ExitCode::from(status as u8)
}
