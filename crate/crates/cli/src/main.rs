use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use npwave::config::{RunConfig, Task, Validated};
use npwave::run::{exit_code, run};
use npwave::{Error, Result};

/// Ground states and compactness/control diagnostics for nonlinear
/// wave-type equations on space-time cylinders.
#[derive(Parser)]
#[command(name = "npwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task named in the configuration file.
    Run(Common),
    /// Compute a ground state by saddle-point reduction.
    Solve(Common),
    /// Kernel Gram matrix of the weight and its control constant.
    Gram(Common),
    /// Split 1+1 kernel elements into travelling profiles.
    Dalembert(Common),
    /// Embedding series with a convergence verdict.
    Series(Common),
    /// List resonant modes showing the embedding fails.
    Witness(Common),
    /// Validate a configuration and print the resolved form.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the configuration.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Random seed; overrides `seed` from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for multi-start solves.
    #[arg(long)]
    threads: Option<usize>,
}

fn load(args: &Common, task: Option<Task>) -> Result<Validated> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(dir) = args.config.parent() {
        cfg.resolve_paths(dir);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate(task)
}

fn execute(cli: Cli) -> Result<i32> {
    let (args, task, dry) = match &cli.command {
        Command::Run(a) => (a, None, false),
        Command::Solve(a) => (a, Some(Task::Solve), false),
        Command::Gram(a) => (a, Some(Task::Gram), false),
        Command::Dalembert(a) => (a, Some(Task::Dalembert), false),
        Command::Series(a) => (a, Some(Task::Series), false),
        Command::Witness(a) => (a, Some(Task::Witness), false),
        Command::Validate(a) => (a, None, true),
    };
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let v = load(args, task)?;
    for w in &v.warnings {
        eprintln!("warning: {w}");
    }
    if dry {
        println!("{}", serde_json::to_string_pretty(&v.config)?);
        if let Some(r) = &v.refusal {
            eprintln!("note: solve would be refused: {r}");
        }
        return Ok(0);
    }
    let out = args
        .out
        .clone()
        .or_else(|| v.config.output_dir.clone())
        .unwrap_or_else(|| Path::new("out").to_path_buf());
    let outcome = run(&v, &out)?;
    println!(
        "{}: {} -> {}",
        v.task.name(),
        outcome.result["status"].as_str().unwrap_or("?"),
        out.display()
    );
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
