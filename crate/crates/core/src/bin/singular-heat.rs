use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use singular_heat::cli::{self, Command, ExperimentConfig, InitialDataKind, EXIT_ERROR};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliCommand {
    Solve,
    Sweep,
    Uniqueness,
    Consistency,
    Duhamel,
    Diagnose,
}

impl From<CliCommand> for Command {
    fn from(c: CliCommand) -> Self {
        match c {
            CliCommand::Solve => Command::Solve,
            CliCommand::Sweep => Command::Sweep,
            CliCommand::Uniqueness => Command::Uniqueness,
            CliCommand::Consistency => Command::Consistency,
            CliCommand::Duhamel => Command::Duhamel,
            CliCommand::Diagnose => Command::Diagnose,
        }
    }
}

/// Heat equation with singular conductivity: regularized solves and
/// epsilon-sweep diagnostics.
///
/// Exit status: 0 when every check passes, 1 on a usage, configuration or
/// runtime error, 2 when a check fails.
#[derive(Debug, Parser)]
#[command(name = "singular-heat", version)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    command: CliCommand,
    /// TOML configuration file (optional for diagnose).
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory, overriding [output] dir.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Worker threads for epsilon sweeps; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Print the summary to stdout.
    #[arg(short, long)]
    verbose: bool,
}

fn load_config(args: &Args) -> Result<ExperimentConfig, String> {
    let command = Command::from(args.command);
    let mut config = match &args.config {
        None if command == Command::Diagnose => ExperimentConfig::diagnose_default(),
        None => return Err(format!("{command} requires --config")),
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut config =
                cli::parse_config_for(&text, Some(command)).map_err(|e| e.to_string())?;
            let base = path.parent().unwrap_or(Path::new("."));
            if let InitialDataKind::File { path: data } = &mut config.initial_data.kind {
                if data.is_relative() {
                    *data = base.join(&*data);
                }
            }
            config
        }
    };
    if let Some(dir) = &args.output {
        config.output_dir = dir.clone();
    }
    Ok(config)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => {
                    let mut cmd = <Args as clap::CommandFactory>::command();
                    eprintln!("\n{}", cmd.render_usage());
                    ExitCode::from(EXIT_ERROR as u8)
                }
            };
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build_global()
    {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    let config = match load_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let outcome = match cli::run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    if let Err(e) = outcome.write_to(&config.output_dir) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    if args.verbose {
        print!("{}", outcome.summary());
    } else {
        for c in outcome.checks.iter().filter(|c| !c.passed) {
            println!("FAIL {}: {}", c.name, c.detail);
        }
    }
    println!(
        "{}: {} ({} checks, outputs in {})",
        config.command,
        if outcome.passed() { "PASS" } else { "FAIL" },
        outcome.checks.len(),
        config.output_dir.display()
    );
    ExitCode::from(outcome.exit_code() as u8)
}
