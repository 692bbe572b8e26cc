//! `dbcalc`: script-driven checker for the brackets of graded differential
//! geometry. Scripts declare a context (polynomial chart, Lie algebra, or
//! Lie algebroid) and structures over it, then run bracket computations and
//! exact check suites. Reports are line-delimited `kind|name|status|payload`
//! records; the exit status is 0 iff every check passed and no statement
//! errored.

mod exec;
mod script;

use clap::{Parser, Subcommand};
use exec::{run_script, Options, ReportLine};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dbcalc")]
#[command(about = "Exact checker for derived brackets, Cartan calculus, and Courant structures")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single script
    Run {
        /// Path to the script file
        script: PathBuf,
        /// Seed for the sampling-based check suites
        #[arg(long, default_value_t = 0xD1CE)]
        seed: u64,
        /// Cap on the total polynomial degree of computed elements
        #[arg(long, default_value_t = 12)]
        degree_cap: u32,
        /// Number of parallel workers for check suites
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the structured report to this file
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run every `.dbx` script in a directory (sorted by name)
    CheckAll {
        dir: PathBuf,
        #[arg(long, default_value_t = 0xD1CE)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        degree_cap: u32,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            script,
            seed,
            degree_cap,
            jobs,
            report,
        } => {
            let opts = Options {
                seed,
                degree_cap,
                jobs,
            };
            match run_one(&script, &opts, report.as_deref()) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::FAILURE,
                Err(e) => {
                    eprintln!("{}: {e}", script.display());
                    ExitCode::FAILURE
                }
            }
        }
        Command::CheckAll {
            dir,
            seed,
            degree_cap,
            jobs,
        } => {
            let opts = Options {
                seed,
                degree_cap,
                jobs,
            };
            let mut scripts: Vec<PathBuf> = match std::fs::read_dir(&dir) {
                Ok(entries) => entries
                    .filter_map(|e| e.ok())
                    .map(|e| e.path())
                    .filter(|p| p.extension().is_some_and(|x| x == "dbx"))
                    .collect(),
                Err(e) => {
                    eprintln!("{}: {e}", dir.display());
                    return ExitCode::FAILURE;
                }
            };
            scripts.sort();
            if scripts.is_empty() {
                eprintln!("no .dbx scripts in {}", dir.display());
                return ExitCode::FAILURE;
            }
            let mut all_ok = true;
            for path in &scripts {
                println!("== {}", path.display());
                match run_one(path, &opts, None) {
                    Ok(ok) => all_ok &= ok,
                    Err(e) => {
                        eprintln!("{}: {e}", path.display());
                        all_ok = false;
                    }
                }
            }
            if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run_one(
    path: &Path,
    opts: &Options,
    report_path: Option<&Path>,
) -> Result<bool, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(path)?;
    let stmts = script::parse_script(&text)?;
    let (lines, ok) = run_script(&stmts, opts);
    for line in &lines {
        println!("{line}");
    }
    println!("result: {}", if ok { "ok" } else { "FAILED" });
    if let Some(p) = report_path {
        std::fs::write(p, render_report(&lines))?;
    }
    Ok(ok)
}

fn render_report(lines: &[ReportLine]) -> String {
    let mut out = String::new();
    for line in lines {
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}
