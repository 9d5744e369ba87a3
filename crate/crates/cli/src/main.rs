mod config;
mod output;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::config::Task;
use crate::tasks::TaskError;

/// Exact duality checks, samplers and oracles for composed-subordinator partitions.
#[derive(Debug, Parser)]
#[command(name = "phibp", version)]
struct Cli {
    #[arg(value_enum)]
    task: Task,
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Single seed; overrides `seeds`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; overrides `jobs`. Results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Record wall-clock time in the report (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut cfg = match config::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(s) = cli.seed {
        cfg.seeds = vec![s];
    }
    let jobs = cli.jobs.or(cfg.jobs).unwrap_or(1);
    if jobs == 0 {
        eprintln!("config error: flag `--jobs`: must be at least 1");
        return ExitCode::from(2);
    }
    let mut report = match tasks::run(cli.task, &cfg, jobs) {
        Ok(r) => r,
        Err(TaskError::Config(e)) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
        Err(TaskError::Run(e)) => {
            eprintln!("{} failed: {e}", cli.task.name());
            return ExitCode::from(1);
        }
    };
    if cli.timing {
        report.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
    }
    let dir = cli.out.or(cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = output::emit(&report, &dir, &cfg.output.prefix, cli.task.name()) {
        eprintln!("writing reports to {}: {e}", dir.display());
        return ExitCode::from(1);
    }
    for c in &report.criteria {
        if !c.passed {
            eprintln!("criterion failed: {} = {:e} (tolerance {:e})", c.name, c.value, c.tolerance);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
