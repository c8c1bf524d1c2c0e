use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fastosc::scenario::{emit, run_with_threads, ScenarioConfig, ScenarioKind};
use fastosc::Error;

#[derive(Parser)]
#[command(
    name = "fastosc",
    version,
    about = "Run effective-Hamiltonian experiments from TOML configs"
)]
struct Cli {
    /// Scenario config (alternative to the positional argument)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir` in the config
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 = one per core
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Only print errors
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write summary.json plus CSV tables
    Run {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// List the available scenario names
    ListScenarios,
    /// Parse and validate a config without running it
    Validate {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
}

fn config_path(positional: Option<PathBuf>, flag: Option<PathBuf>) -> Result<PathBuf, Error> {
    positional
        .or(flag)
        .ok_or_else(|| Error::Config("no config given (pass a path or --config)".into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('"', "'");
            eprintln!("error: kind={} message=\"{message}\"", e.kind());
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidParameter { .. } | Error::InvalidGrid(_) => 2,
                _ => 1,
            })
        }
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::ListScenarios => {
            for kind in ScenarioKind::ALL {
                println!("{:<20} {}", kind.name(), kind.description());
            }
        }
        Command::Validate { path } => {
            let path = config_path(path, cli.config)?;
            ScenarioConfig::load(&path)?.validate()?;
            if !cli.quiet {
                println!("ok: {}", path.display());
            }
        }
        Command::Run { path } => {
            let path = config_path(path, cli.config)?;
            let cfg = ScenarioConfig::load(&path)?;
            let out = cli
                .out
                .or_else(|| cfg.output.dir.clone())
                .unwrap_or_else(|| PathBuf::from("results").join(cfg.scenario.name()));
            let bundle = run_with_threads(&cfg, cli.threads)?;
            let files = emit(&bundle, &out)?;
            if !cli.quiet {
                println!("{} → {} ({} files)", cfg.scenario, out.display(), files.len());
                for (name, value) in &bundle.metrics {
                    println!("  {name} = {value}");
                }
            }
        }
    }
    Ok(())
}
