//! `steinhaus` — batch experiment runner.
//!
//! Exit codes: 0 = all verdicts as expected, 1 = verification failure,
//! 2 = configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use steinhaus::experiments::{run, run_batch, verify_report, write_output, BatchConfig, ExperimentConfig, RunReport};

#[derive(Parser)]
#[command(name = "steinhaus", version, about = "Sumset interior certificates for convex-body boundary patches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write its report bundle.
    Run {
        /// Experiment configuration (JSON).
        config: PathBuf,
        /// Output directory (default: `<config stem>-out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify every certificate embedded in a report.
    Verify {
        /// A report.json produced by `run` or `sweep`.
        report: PathBuf,
    },
    /// Run a batch of experiments, one subdirectory per entry.
    Sweep {
        /// Batch description (JSON with a `runs` array).
        batch: PathBuf,
        /// Output directory (default: `<batch stem>-out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_VERIFY_FAILURE: u8 = 1;
const EXIT_CONFIG_ERROR: u8 = 2;

fn default_out(input: &Path) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "steinhaus".into());
    input.with_file_name(format!("{stem}-out"))
}

fn base_dir(input: &Path) -> PathBuf {
    input
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn cmd_run(config_path: &Path, out: Option<PathBuf>) -> Result<bool> {
    let text = std::fs::read_to_string(config_path)
        .with_context(|| format!("reading {}", config_path.display()))?;
    let config = ExperimentConfig::from_json(&text)?;
    let output = run(&config, &base_dir(config_path))?;
    let dir = out.unwrap_or_else(|| default_out(config_path));
    write_output(&output, &dir)?;
    eprintln!(
        "wrote {} ({} verdicts, {} certificates, ok = {})",
        dir.join("report.json").display(),
        output.report.verdicts.len(),
        output.report.certificates.len(),
        output.report.ok
    );
    Ok(output.report.ok)
}

fn cmd_verify(report_path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(report_path)
        .with_context(|| format!("reading {}", report_path.display()))?;
    let report: RunReport = serde_json::from_str(&text)?;
    let ok = verify_report(&report)?;
    eprintln!(
        "{}: {} certificates, verification {}",
        report_path.display(),
        report.certificates.len(),
        if ok { "passed" } else { "FAILED" }
    );
    Ok(ok)
}

fn cmd_sweep(batch_path: &Path, out: Option<PathBuf>) -> Result<bool> {
    let text = std::fs::read_to_string(batch_path)
        .with_context(|| format!("reading {}", batch_path.display()))?;
    let batch: BatchConfig = serde_json::from_str(&text)?;
    for entry in &batch.runs {
        entry.config.validate()?;
    }
    let outputs = run_batch(&batch, &base_dir(batch_path))?;
    let dir = out.unwrap_or_else(|| default_out(batch_path));
    let mut all_ok = true;
    for (name, output) in &outputs {
        write_output(output, &dir.join(name))?;
        eprintln!("{name}: ok = {}", output.report.ok);
        all_ok &= output.report.ok;
    }
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, out } => cmd_run(config, out.clone()),
        Command::Verify { report } => cmd_verify(report),
        Command::Sweep { batch, out } => cmd_sweep(batch, out.clone()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILURE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG_ERROR)
        }
    }
}
