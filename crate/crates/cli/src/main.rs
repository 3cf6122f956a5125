use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracflow_cli::{acceptance, caputo, init_threads, run_command, CliError, EXIT_CONFIG, EXIT_OK};

/// Fractional Ricci flow on nonholonomic grid charts.
#[derive(Parser)]
#[command(name = "fracflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write one record per step.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `[output] path`; stdout when neither is given.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a Caputo derivative table on [0, 1] with its closed form.
    Caputo {
        /// constant, power(beta) or sin
        #[arg(long)]
        preset: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1024)]
        count: usize,
    },
    /// Run the acceptance suite on one thread.
    Selftest,
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config, out } => {
            init_threads()?;
            run_command(&config, out.as_deref())
        }
        Command::Caputo { preset, alpha, count } => {
            init_threads()?;
            let rows = caputo::table(preset.parse()?, alpha, count)?;
            caputo::write_table(&mut std::io::stdout().lock(), &rows).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(EXIT_OK)
        }
        Command::Selftest => {
            let report = acceptance::run(&acceptance::Options::default(), |line| println!("{line}"));
            let verdict = if report.passed() { "all criteria pass" } else { "some criteria FAIL" };
            println!("{verdict} in {:.1} s", report.seconds);
            Ok(if report.passed() { EXIT_OK } else { EXIT_CONFIG })
        }
    }
}

fn main() -> ExitCode {
    // clap would exit with 2, which is reserved for flow singularities
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { EXIT_OK as u8 });
        }
    };
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fracflow: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
