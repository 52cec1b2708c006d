use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use elastica::harness::{self, summary_line};
use elastica::{Mode, RunConfig};

/// Universal eigenvalue inequalities for the Lamé system and spherical caps.
///
/// Exit status: 0 when every record passes or is skipped, 2 when some record
/// is marginal, 1 on any failure or error. `ELASTICA_THREADS` caps the
/// number of worker threads (0 or unset: one per core).
#[derive(Parser)]
#[command(name = "elastica", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides one key, e.g. `--set domain.alpha=0.5`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble and solve the box problem; write spectrum files.
    Solve,
    /// Evaluate every bound on a spectrum file (`input.spectrum`).
    Bounds,
    /// Solve (or load) spectra and verify every bound.
    Verify,
    /// First eigenvalues on spherical caps and the inequalities between them.
    Cap,
    /// Merge saved JSON reports into CSV, text and SVG.
    Report {
        /// Report files, in addition to `report.inputs`.
        inputs: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let (mode, extra) = match cli.command {
        Command::Solve => (Mode::Solve, Vec::new()),
        Command::Bounds => (Mode::Bounds, Vec::new()),
        Command::Verify => (Mode::Verify, Vec::new()),
        Command::Cap => (Mode::Cap, Vec::new()),
        Command::Report { inputs } => (Mode::Report, inputs),
    };
    let mut overrides = cli.overrides;
    if !extra.is_empty() {
        let list: Vec<String> = extra.iter().map(|p| format!("{:?}", p.display().to_string())).collect();
        overrides.push(format!("report.inputs=[{}]", list.join(", ")));
    }
    match execute(mode, cli.config, &overrides) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let threads = match std::env::var("ELASTICA_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("ELASTICA_THREADS must be a non-negative integer, got `{v}`"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn execute(mode: Mode, config: Option<PathBuf>, overrides: &[String]) -> Result<i32, elastica::HarnessError> {
    let config = RunConfig::load(mode, config.as_deref(), overrides)?;
    if mode == Mode::Solve {
        for (case, spectrum) in harness::run_solve(&config)? {
            emit(&format!("{} = {}: {} eigenvalues\n", case.parameter, case.value, spectrum.len()));
            if config.output.is_none() {
                emit(&elastica::spectrum_io::render(&spectrum));
            }
        }
        return Ok(0);
    }
    let rendered = harness::run(&config)?;
    if config.output.is_none() {
        emit(&rendered.table);
    }
    for r in &rendered.reports {
        emit(&format!("{}\n", summary_line(r)));
    }
    Ok(rendered.exit_code())
}

/// Writes to stdout, ignoring a closed pipe (e.g. `elastica report | head`).
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}
