use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use f13_cli::error::{read, write};
use f13_cli::{run_residual, run_solve, run_spinor, run_verify, CliError, Mode, Outcome, RawConfig, ScenarioConfig, System};

#[derive(Parser)]
#[command(name = "f13", version, about = "Conformally flat elastic spacetimes in the 1+3 frame formalism")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate or evaluate a case and write its trajectory.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check a closed-form family against every residual system.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the NP curvature components of a state file.
    Spinor {
        #[arg(long)]
        state: PathBuf,
    },
    /// Residuals of a gridded state table with finite-difference derivatives.
    Residual {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "general")]
        system: System,
        /// Frame direction along which the table coordinate runs.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(0..=3))]
        direction: u8,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn scenario(path: &Path, mode: Mode) -> Result<ScenarioConfig, CliError> {
    let raw = RawConfig::parse(&read(path)?)?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(ScenarioConfig::from_raw(&raw, mode, base)?)
}

/// CSV goes to `output` when given, with the report on stdout; otherwise the
/// CSV takes stdout and the report moves to stderr.
fn emit(outcome: &Outcome, output: Option<&Path>) -> Result<(), CliError> {
    match (&outcome.csv, output) {
        (Some(csv), Some(path)) => {
            write(path, &csv.render())?;
            print!("{}", outcome.report);
        }
        (Some(csv), None) => {
            print!("{}", csv.render());
            eprint!("{}", outcome.report);
        }
        (None, _) => print!("{}", outcome.report),
    }
    Ok(())
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("F13_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Input(format!("F13_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    threads()?;
    let (outcome, output) = match cli.command {
        Command::Solve { config } => {
            let cfg = scenario(&config, Mode::Solve)?;
            (run_solve(&cfg)?, cfg.output)
        }
        Command::Verify { config } => {
            let cfg = scenario(&config, Mode::Verify)?;
            (run_verify(&cfg)?, cfg.output)
        }
        Command::Spinor { state } => (run_spinor(&read(&state)?)?, None),
        Command::Residual { table, system, direction, tol, output } => {
            (run_residual(&read(&table)?, system, direction as usize, tol)?, output)
        }
    };
    emit(&outcome, output.as_deref())?;
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
