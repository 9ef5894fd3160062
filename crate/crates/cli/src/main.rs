use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use pbrcheck::appendix::{DEFAULT_DET_FLOOR, DEFAULT_RESTARTS};
use pbrcheck::report::{self, parse_coefficients, DEFAULT_RUNS, DEFAULT_SEED};
use pbrcheck::{Command, OnticModel, RunOptions};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Runs the verification suites and reports pass/fail per check.
#[derive(Debug, Parser)]
#[command(name = "pbrcheck", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Also write the structured (JSON) report to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Restarts for the local detector search.
    #[arg(long, global = true, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,

    /// Minimum |det| of each normalized map in the local detector search.
    #[arg(long = "det-floor", global = true, default_value_t = DEFAULT_DET_FLOOR)]
    det_floor: f64,

    /// Four comma-separated xi coefficients, each `re`, `imi` or `re+imi`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<String>,

    /// Ontic model file: `N=<int>` then the |0> and |+> weight lines.
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Monte Carlo runs for the ontic model checks.
    #[arg(long, global = true, default_value_t = DEFAULT_RUNS)]
    runs: u64,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Single-qubit states, the xi-basis and the forbidden-outcome table.
    VerifyStates,
    /// Simple, identity-product and joint detectors on the xi-basis.
    SimulateDetector,
    /// Exact impossibility of a local product xi detector.
    CertifyAppendix,
    /// Restart search for a near-deterministic local product detector.
    SearchLocal,
    /// Feasibility of ontological models with overlapping supports.
    OnticFeasibility,
    /// Every suite.
    All,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::VerifyStates => Command::VerifyStates,
            Cmd::SimulateDetector => Command::SimulateDetector,
            Cmd::CertifyAppendix => Command::CertifyAppendix,
            Cmd::SearchLocal => Command::SearchLocal,
            Cmd::OnticFeasibility => Command::OnticFeasibility,
            Cmd::All => Command::All,
        }
    }
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}\n");
    eprintln!("{}", Cli::command().render_usage());
    ExitCode::from(EXIT_USAGE)
}

fn options(cli: &Cli) -> Result<RunOptions, String> {
    let a = cli.a.as_deref().map(parse_coefficients).transpose().map_err(|e| format!("--a: {e}"))?;
    let model = cli.model.as_ref().map(OnticModel::load).transpose().map_err(|e| format!("--model: {e}"))?;
    if !(cli.det_floor > 0.0) {
        return Err(format!("--det-floor must be positive, got {}", cli.det_floor));
    }
    Ok(RunOptions { seed: cli.seed, restarts: cli.restarts, det_floor: cli.det_floor, a, model, runs: cli.runs })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = match options(&cli) {
        Ok(o) => o,
        Err(e) => return usage_error(e),
    };
    let report = match report::run(cli.command.into(), &opts) {
        Ok(r) => r,
        Err(pbrcheck::Error::InvalidArgument(msg)) => return usage_error(msg),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    print!("{}", report.to_human());
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, report.to_structured()) {
            return usage_error(format!("cannot write {}: {e}", path.display()));
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
