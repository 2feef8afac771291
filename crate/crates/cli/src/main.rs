//! `mishchenko`: runs one verification task from a JSON config and writes
//! `summary.json` plus CSV dumps to the output directory.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on a
//! configuration or I/O error.

mod config;
mod report;
mod selftest;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{ExperimentConfig, Task};
use report::{ErrorReport, Summary};
use tasks::{Context, TaskError};

#[derive(Debug, Parser)]
#[command(name = "mishchenko", version, about = "Flat-bundle and Mishchenko-module verification pipelines")]
struct Args {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the task named in the config.
    #[arg(long, value_enum)]
    task: Option<Task>,
    /// Overrides `budgets.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "mishchenko-out")]
    out: PathBuf,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if !(args.tol_scale > 0.0) {
        eprintln!("--tol-scale must be positive");
        return ExitCode::from(2);
    }
    let cfg = match &args.config {
        Some(path) => match config::load(path) {
            Ok(c) => c,
            Err(e) => return config_failure(&args, args.task.map_or("unknown", Task::name), &e),
        },
        None => ExperimentConfig::default(),
    };
    let Some(task) = args.task.or(cfg.task) else {
        let e = config::ConfigError::at("/task", "no task in the config and no --task given");
        return config_failure(&args, "unknown", &e);
    };
    if let Err(e) = config::validate_budgets(&cfg.budgets) {
        return config_failure(&args, task.name(), &e);
    }
    let ctx = Context { seed: args.seed.unwrap_or(cfg.budgets.seed), tol: cfg.tolerances.scaled(args.tol_scale) };
    let result = match task {
        Task::Selftest => Ok(selftest::run(args.tol_scale)),
        Task::Chern => tasks::chern(&cfg, &ctx),
        Task::Flatness => tasks::flatness(&cfg, &ctx),
        Task::MishchenkoVerify => tasks::mishchenko_verify(&cfg, &ctx),
        Task::Index => tasks::index(&cfg, &ctx),
        Task::CoverLemma => tasks::cover_lemma(&cfg, &ctx),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(TaskError::Config(e)) => return config_failure(&args, task.name(), &e),
        Err(TaskError::Numerical(e)) => {
            let mut o = report::Outcome::default();
            o.check(report::Check::failed(tasks::invariant(&e), e.to_string()));
            o
        }
    };
    let passed = outcome.passed();
    let summary = Summary {
        task: task.name().into(),
        seed: ctx.seed,
        tol_scale: args.tol_scale,
        passed,
        checks: outcome.checks,
        details: outcome.details,
        artifacts: outcome.tables.iter().map(|t| t.name.clone()).collect(),
        error: None,
    };
    for c in &summary.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let value = c.value.map_or(String::new(), |v| format!(" {v:.3e}"));
        let tol = c.tolerance.map_or(String::new(), |t| format!(" (tol {t:.1e})"));
        let detail = c.detail.as_ref().map_or(String::new(), |d| format!(" {d}"));
        println!("{status} {}{value}{tol}{detail}", c.name);
    }
    if let Err(e) = report::write(&args.out, &summary, &outcome.tables) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    println!("{} {}: {}", task.name(), if passed { "passed" } else { "failed" }, args.out.join("summary.json").display());
    if passed { ExitCode::SUCCESS } else { ExitCode::from(1) }
}

fn config_failure(args: &Args, task: &str, e: &config::ConfigError) -> ExitCode {
    eprintln!("{e}");
    let summary = Summary {
        task: task.into(),
        seed: args.seed.unwrap_or(0),
        tol_scale: args.tol_scale,
        passed: false,
        checks: Vec::new(),
        details: Default::default(),
        artifacts: Vec::new(),
        error: Some(ErrorReport { kind: "config", pointer: Some(e.pointer.clone()), message: e.message.clone() }),
    };
    if let Err(w) = report::write(&args.out, &summary, &[]) {
        eprintln!("error: {w:#}");
    }
    ExitCode::from(2)
}
