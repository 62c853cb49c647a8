//! Batch runner: execute a scenario of geometry tasks from a JSON config
//! and write a canonical report.
//!
//! Exit codes: 0 all tasks passed, 1 some task failed or errored,
//! 2 configuration problem.

mod config;
mod plots;
mod run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "acgeom", version, about = "almost complex geometry batch runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every task of a scenario and write <name>-report.json.
    Run {
        config: PathBuf,
        /// output directory for the report (default: alongside the config)
        #[arg(long)]
        out: Option<PathBuf>,
        /// reserved worker count; tasks currently execute sequentially so
        /// that reports stay canonical
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long, default_value = "info")]
        log_level: String,
    },
    /// Check a scenario file without running anything.
    Validate { config: PathBuf },
    /// Extract a CSV data section from a report.
    #[command(name = "emit-plots")]
    EmitPlots {
        report: PathBuf,
        #[arg(long)]
        section: String,
        /// task name when several tasks share the section's kind
        #[arg(long)]
        task: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            parallel,
            log_level,
        } => {
            env_logger::Builder::new()
                .parse_filters(&log_level)
                .init();
            if parallel > 1 {
                log::warn!("--parallel {parallel}: tasks run sequentially; the flag is reserved");
            }
            let scenario = match config::load_scenario(&config) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let report = match run::run_scenario(&scenario) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let dir = out
                .or_else(|| config.parent().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            if let Err(e) = std::fs::create_dir_all(&dir) {
                eprintln!("error: cannot create {}: {e}", dir.display());
                return ExitCode::from(2);
            }
            let path = dir.join(format!("{}-report.json", report.scenario));
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Err(e) = std::fs::write(&path, text + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            for t in &report.tasks {
                println!("{}: {} ({})", t.name, t.status, t.kind);
            }
            println!("report: {}", path.display());
            if report.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Validate { config } => match config::load_scenario(&config) {
            Ok(s) => {
                println!("{}: ok ({} tasks)", s.name, s.tasks.len());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::EmitPlots {
            report,
            section,
            task,
        } => {
            let text = match std::fs::read_to_string(&report) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", report.display());
                    return ExitCode::from(2);
                }
            };
            let value: serde_json::Value = match serde_json::from_str(&text) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: report parse error: {e}");
                    return ExitCode::from(2);
                }
            };
            match plots::emit(&value, &section, task.as_deref()) {
                Ok(csv) => {
                    // tolerate a closed pipe (e.g. `| head`)
                    use std::io::Write;
                    let _ = std::io::stdout().write_all(csv.as_bytes());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
