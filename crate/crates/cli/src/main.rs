//! `tteig`: runs eigensolver experiments described by JSON files.

mod config;
mod failure;
mod run;
mod trace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ExperimentConfig, FORMAT_VERSION};
use failure::Failure;

#[derive(Parser)]
#[command(name = "tteig", version, about = "Rank-truncated tensor-train eigensolver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment; writes a trace and a summary.
    Run {
        config: PathBuf,
        /// Output directory (overrides TTEIG_OUT and the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Iteration limit (Krylov steps for lanczos).
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Align traces of the same problem by iteration.
    Compare {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Write comparison.csv into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense reference eigenvalues for a configured problem.
    Oracle {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Run { config, out, seed, max_iters } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.solver.seed = s;
            }
            if let Some(n) = max_iters {
                cfg.solver.max_iterations = n;
                cfg.lanczos_steps = n;
                cfg.validate()?;
            }
            let written = run::run(&cfg, &cfg.output(out.as_deref()))?;
            println!(
                "{}",
                serde_json::json!({
                    "status": written.status,
                    "trace": written.trace,
                    "summary": written.summary,
                })
            );
            Ok(written.status.code())
        }
        Command::Compare { traces, out } => {
            let table = trace::compare(&traces)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
                    let path = dir.join("comparison.csv");
                    std::fs::write(&path, table).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
                }
                None => print!("{table}"),
            }
            Ok(0)
        }
        Command::Oracle { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let a = cfg.problem.build()?;
            let values = run::oracle_values(&cfg, &a, cfg.solver.m)?;
            let doc = serde_json::json!({
                "format_version": FORMAT_VERSION,
                "run_id": cfg.run_id,
                "problem": cfg.problem,
                "target": cfg.solver.target,
                "eigenvalues": values,
            });
            let text = serde_json::to_string_pretty(&doc).expect("oracle serializes");
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
                let path = dir.join(format!("{}.oracle.json", cfg.run_id));
                std::fs::write(&path, format!("{text}\n")).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            }
            println!("{text}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            Failure::config(e.to_string().trim_end().to_string()).report();
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            f.report();
            ExitCode::from(f.code as u8)
        }
    }
}
