use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plectic::scenarios::SCENARIOS;
use plectic_cli::config::ScenarioConfig;
use plectic_cli::report::REPORT_SCHEMA;
use plectic_cli::{exit_code, run, RunOptions};

#[derive(Parser)]
#[command(name = "plectic", version, about = "Run multisymplectic verification scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a scenario config.
    Run {
        config: PathBuf,
        /// Where to write the JSON report. Defaults to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiplies every tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Run checks on separate threads. Report order is unchanged.
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Print the JSON schema of run reports.
    Schema,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListScenarios => {
            for (name, params, about) in SCENARIOS {
                let params = if params.is_empty() { "-".to_string() } else { format!("[{params}]") };
                println!("{name:<22} {params:<22} {about}");
            }
            ExitCode::SUCCESS
        }
        Command::Schema => {
            print!("{REPORT_SCHEMA}");
            ExitCode::SUCCESS
        }
        Command::Run { config, out, tol_scale, parallel, seed } => {
            let report = ScenarioConfig::load(&config)
                .and_then(|cfg| Ok((run(&cfg, RunOptions { seed, tol_scale, parallel })?, cfg)));
            let (report, cfg) = match report {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let text = report.to_json();
            match out.or(cfg.output.map(PathBuf::from)) {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            for c in &report.checks {
                eprintln!("{:<26} {:?}{}", c.name, c.status, c.reason.as_deref().map(|r| format!("  ({r})")).unwrap_or_default());
            }
            ExitCode::from(exit_code(&report) as u8)
        }
    }
}
