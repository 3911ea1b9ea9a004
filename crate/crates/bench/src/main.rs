use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};

use socnav_bench::config::BenchConfig;
use socnav_bench::export::{export, read_jsonl, write_jsonl, ExportFormat};
use socnav_bench::metrics::{run_episode, run_trials};
use socnav_bench::server::{serve_stdio, serve_tcp};
use socnav_bench::PolicyKind;

#[derive(Parser)]
#[command(name = "socnav", version, about = "Crowd navigation benchmark for a LIP walker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials and print a metrics report as JSON.
    Bench {
        #[arg(long, value_enum, default_value = "dwa")]
        policy: PolicyKind,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one episode and write its trace as JSONL.
    Episode {
        #[arg(long, value_enum, default_value = "dwa")]
        policy: PolicyKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the environment protocol on a TCP address or on stdio.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Convert a JSONL trace to CSV or canonical JSONL.
    Export {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Bench {
            policy,
            trials,
            seed,
            config,
            out,
        } => {
            anyhow::ensure!(trials >= 1, "need at least one trial");
            let cfg = BenchConfig::load_or_default(config.as_deref())?;
            let policy = policy.build(cfg.dwa);
            let report = run_trials(policy.as_ref(), &cfg.env, trials, seed);
            let mut w = output(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Episode {
            policy,
            seed,
            config,
            out,
        } => {
            let cfg = BenchConfig::load_or_default(config.as_deref())?;
            let policy = policy.build(cfg.dwa);
            let (outcome, trace) = run_episode(policy.as_ref(), &cfg.env, seed);
            let trace = trace.with_context(|| outcome.failure.clone().unwrap_or_default())?;
            write_jsonl(&trace, output(out.as_deref())?)?;
            log::info!("seed {seed}: {:?} after {} steps", outcome.status, outcome.steps);
        }
        Command::Serve { listen, config } => {
            let cfg = BenchConfig::load_or_default(config.as_deref())?;
            if listen == "stdio" {
                serve_stdio(cfg.env)?;
            } else {
                serve_tcp(listen.as_str(), cfg.env)?;
            }
        }
        Command::Export { trace, format, out } => {
            let file = File::open(&trace).with_context(|| format!("opening {}", trace.display()))?;
            let parsed = read_jsonl(BufReader::new(file))?;
            export(&parsed, format, output(out.as_deref())?)?;
        }
    }
    Ok(())
}
