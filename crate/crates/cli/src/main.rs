use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alignment_cli::commands::{self, CliError, Output, SweepParam, EXIT_INVALID};
use alignment_cli::document::{parse_game_spec, parse_solution};
use clap::{Parser, Subcommand};

/// Solve, verify, simulate and sweep alignment games.
///
/// Exit codes: 0 success, 1 invalid input, 2 no closed form,
/// 3 resource limit, 4 verification failed.
#[derive(Debug, Parser)]
#[command(name = "alignment", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the closed-form solution of a game.
    Solve {
        /// Game document, or `-` for stdin.
        spec: PathBuf,
    },
    /// Check a solution against the oracle; exit 0 iff it passes.
    Verify {
        spec: PathBuf,
        /// Solution document to check instead of the closed form.
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Largest accepted gap (default 0 for finite games, 1e-6 otherwise).
        #[arg(long)]
        tolerance: Option<String>,
        /// Grid step for continuous games, e.g. `1/1000`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Estimate the payoff of the solved strategies by simulation.
    Simulate {
        spec: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Required when the CI environment variable is set.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve a template game over a range of one parameter; prints CSV.
    Sweep {
        template: PathBuf,
        /// `alpha`, `beta`, `k` or `cost:J`.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        steps: usize,
    },
    /// Solve a game as an explicit matrix game with the exact LP.
    Oracle {
        spec: PathBuf,
        /// Grid step for continuous games with fixed lengths.
        #[arg(long)]
        grid: Option<String>,
        /// Also write the payoff matrix as CSV to this file.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
}

fn read_input(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let read = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    read.map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    Ok(text)
}

fn number(text: Option<&String>, name: &str) -> Result<Option<alignment_core::Rational>, CliError> {
    text.map(|t| commands::parse_number(t, name)).transpose()
}

fn run(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Solve { spec } => commands::solve(&parse_game_spec(&read_input(&spec)?)?),
        Command::Verify {
            spec,
            solution,
            tolerance,
            grid,
        } => {
            let game = parse_game_spec(&read_input(&spec)?)?;
            let solution = match solution {
                Some(path) => Some(parse_solution(&read_input(&path)?, &game)?),
                None => None,
            };
            let tolerance = number(tolerance.as_ref(), "--tolerance")?;
            let grid = number(grid.as_ref(), "--grid")?;
            commands::verify(&game, solution, tolerance, grid, commands::limits_from_env()?)
        }
        Command::Simulate { spec, trials, seed } => {
            commands::simulate(&parse_game_spec(&read_input(&spec)?)?, trials, seed)
        }
        Command::Sweep {
            template,
            param,
            from,
            to,
            steps,
        } => {
            let game = parse_game_spec(&read_input(&template)?)?;
            let param = SweepParam::parse(&param)?;
            let from = commands::parse_number(&from, "--from")?;
            let to = commands::parse_number(&to, "--to")?;
            let points = commands::sweep_points(&from, &to, steps)?;
            commands::sweep(&game, &param, &points)
        }
        Command::Oracle { spec, grid, matrix } => {
            let game = parse_game_spec(&read_input(&spec)?)?;
            let grid = number(grid.as_ref(), "--grid")?;
            let (output, payoffs) = commands::oracle(&game, grid, commands::limits_from_env()?)?;
            if let Some(path) = matrix {
                std::fs::write(&path, commands::matrix_csv(&payoffs)?)
                    .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors are invalid input, not clap's default code 2.
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(output) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(output.stdout.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(output.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
