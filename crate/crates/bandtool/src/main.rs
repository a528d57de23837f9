//! `bandtool <task> --config <file>`: band structures, HFH tensors, Dirac
//! tuning, quasi-static homogenisation and decay rates.

mod config;
mod output;
mod tasks;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use config::{RunConfig, Task};
use tasks::TaskError;

#[derive(Parser, Debug)]
#[command(name = "bandtool", version, about = "Photonic band structures and high-frequency homogenisation")]
struct Cli {
    #[arg(value_enum)]
    task: Task,
    /// TOML run configuration (JSON when the extension is .json).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Plane-wave cutoff per axis.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Seed of the decoupling combination.
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve(cli: &Cli) -> Result<RunConfig, TaskError> {
    let mut cfg = RunConfig::load(&cli.config).map_err(|e| TaskError::new("InvalidConfig", e.0, "config"))?;
    if let Some(t) = cfg.task {
        if t != cli.task {
            return Err(TaskError::new(
                "InvalidConfig",
                format!("config is for task `{}` but `{}` was requested", t.name(), cli.task.name()),
                "config",
            ));
        }
    }
    cfg.task = Some(cli.task);
    if let Some(c) = cli.cutoff {
        cfg.problem.cutoff = Some(c);
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    cfg.out.get_or_insert_with(|| PathBuf::from("out"));
    cfg.problem = cfg.problem.resolved();
    cfg.problem.lattice.validate().map_err(|e| TaskError::new("InvalidConfig", e.to_string(), "problem.lattice"))?;
    cfg.problem
        .medium
        .validate(&cfg.problem.lattice)
        .map_err(|e| TaskError::new("InvalidConfig", e.to_string(), "problem.medium"))?;
    cfg.problem
        .mode
        .validate(&cfg.problem.lattice)
        .map_err(|e| TaskError::new("InvalidConfig", e.to_string(), "problem.mode"))?;
    Ok(cfg)
}

fn write_error(dir: &Path, task: Task, err: &TaskError) {
    #[derive(serde::Serialize)]
    struct Record<'a> {
        task: &'a str,
        error: &'a TaskError,
    }
    let _ = std::fs::create_dir_all(dir);
    let _ = output::write_json(&dir.join("error.json"), &Record { task: task.name(), error: err });
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fallback = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bandtool: {}: {}", e.context, e.message);
            write_error(&fallback, cli.task, &e);
            return ExitCode::from(2);
        }
    };
    let out = cfg.out.clone().unwrap_or(fallback);
    if let Some(n) = cfg.workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = std::fs::create_dir_all(&out)
        .map_err(|e| TaskError::new("Io", e.to_string(), out.display().to_string()))
        .and_then(|_| {
            output::write_config(&out.join("resolved_config.json"), &cfg)
                .map_err(|e| TaskError::new("Io", e.to_string(), "resolved_config.json"))
        })
        .and_then(|_| tasks::run(cli.task, &cfg, &out));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bandtool {}: {} ({})", cli.task.name(), e.message, e.context);
            write_error(&out, cli.task, &e);
            ExitCode::from(1)
        }
    }
}
