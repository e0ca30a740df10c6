use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use adelic_cli::{run, CliError, Command, ProblemFile};
use clap::Parser;

/// Exact invariants of adelic divisors on the Berkovich projective line.
#[derive(Debug, Parser)]
#[command(name = "adelic", version)]
struct Cli {
    /// Worker threads for n-sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,

    /// Problem file.
    #[arg(global = true)]
    file: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let path = cli
        .file
        .as_ref()
        .ok_or_else(|| CliError::Input("missing problem file".into()))?;
    let src = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let problem = ProblemFile::parse(&src).map_err(|e| match e {
        CliError::Syntax { .. } => CliError::Input(format!("{}:{e}", path.display())),
        other => other,
    })?;
    run(&cli.command, &problem, cli.jobs)
}
