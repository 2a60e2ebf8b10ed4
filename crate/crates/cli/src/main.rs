//! `vacmirror` command-line front end.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::Failure;

#[derive(Parser)]
#[command(name = "vacmirror", version, about = "Vacuum-induced motion of a partially transmitting mirror")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.directory`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the library's parallel loops.
    #[arg(long)]
    threads: Option<usize>,
    /// Recorded in the metadata; no computation is stochastic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add a wall-clock timestamp to `meta.json`.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Susceptibility, cutoff and impedance on the frequency grid.
    Analyze(Common),
    /// Right-half-plane zeros, roots and passivity of the impedance.
    Stability(Common),
    /// Time-domain run with its energy ledger.
    Simulate(Common),
    /// Independent-path defects of the dispersion relations.
    Crosscheck(Common),
}

fn run(name: &str, args: &Common, f: fn(&config::Loaded, &std::path::Path, u64) -> Result<(), Failure>) -> Result<(), Failure> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("--threads: {e}")))?;
    }
    let loaded = config::load(&args.config).map_err(|e| Failure::Config(e.to_string()))?;
    let out = args.out.clone().unwrap_or_else(|| {
        let d = &loaded.config.output.directory;
        if d.is_absolute() {
            d.clone()
        } else {
            args.config.parent().unwrap_or(std::path::Path::new(".")).join(d)
        }
    });
    std::fs::create_dir_all(&out).map_err(|e| Failure::Config(format!("cannot create {}: {e}", out.display())))?;
    f(&loaded, &out, args.seed)?;
    let mut meta = json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": args.config.display().to_string(),
        "seed": args.seed,
    });
    if args.timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        meta["timestamp"] = json!(secs);
    }
    let body = serde_json::to_string_pretty(&meta).unwrap() + "\n";
    std::fs::write(out.join("meta.json"), body).map_err(|e| Failure::Config(format!("cannot write meta.json: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => run("analyze", a, commands::analyze),
        Command::Stability(a) => run("stability", a, commands::stability),
        Command::Simulate(a) => run("simulate", a, commands::simulate),
        Command::Crosscheck(a) => run("crosscheck", a, commands::crosscheck),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vacmirror: {e}");
            ExitCode::from(e.code())
        }
    }
}
