use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use cckp::chance::{verify_bounds, write_bound_checks};
use cckp::harness::{run_experiment, write_stats_report, CellStatus, ExperimentConfig};
use cckp::instances::{generate, load_instance, save_instance, Family, GeneratorConfig};
use cckp::operators::KSigma;

#[derive(Parser)]
#[command(
    name = "cckp",
    version,
    about = "Chance-constrained knapsack solvers and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Generate {
        /// uncorr or bsc
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Profits and weights are drawn from 1..=range.
        #[arg(long, default_value_t = 1000)]
        range: u64,
        /// Capacity as a fraction of the total expected weight.
        #[arg(long, default_value_t = 0.25)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare Chebyshev and Chernoff with exact or sampled violation
    /// probabilities on random selections.
    VerifyBounds {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        delta: f64,
        /// Monte Carlo samples for selections too large for the exact tail.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        selections: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment grid from a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Spread of the PS crossover insertion count (sqrt or linear).
        #[arg(long)]
        ps_k_sigma: Option<KSigma>,
    },
    /// Summarize an experiment directory and run the significance tests.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate {
            family,
            n,
            range,
            fraction,
            seed,
            out,
        } => {
            let inst = generate(family, &GeneratorConfig::new(n, range, fraction, seed))?;
            save_instance(&inst, &out).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "wrote {} ({} items, capacity {})",
                out.display(),
                inst.len(),
                inst.capacity()
            );
        }
        Command::VerifyBounds {
            instance,
            delta,
            samples,
            seed,
            selections,
            out,
        } => {
            let inst = load_instance(&instance)
                .with_context(|| format!("reading {}", instance.display()))?;
            let rows = verify_bounds(&inst, delta, selections, samples, seed)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_bound_checks(&rows, BufWriter::new(file))?;
            let unsound = rows
                .iter()
                .filter(|r| {
                    r.std_error == 0.0 && (r.reference > r.chebyshev || r.reference > r.chernoff)
                })
                .count();
            println!("wrote {} selections to {}", rows.len(), out.display());
            if unsound > 0 {
                bail!("{unsound} selections have an exact probability above a bound");
            }
        }
        Command::Run {
            config,
            out,
            ps_k_sigma,
        } => {
            let mut cfg = ExperimentConfig::load(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            if let Some(sigma) = ps_k_sigma {
                cfg.set_ps_k_sigma(sigma);
            }
            let Some(dir) = out.or_else(|| cfg.output.clone()) else {
                bail!("no output directory: pass --out or set `output` in the config");
            };
            let result = run_experiment(&cfg, &dir)?;
            let mut failed = 0;
            for row in &result.summary {
                if let CellStatus::Error(m) = &row.status {
                    failed += 1;
                    eprintln!(
                        "cell '{}' alpha={} delta={} {}: {m}",
                        row.cell.algorithm, row.cell.alpha, row.cell.delta, row.cell.bound
                    );
                }
            }
            println!(
                "{} runs in {} cells written to {}",
                result.runs.len(),
                result.summary.len(),
                dir.display()
            );
            if failed > 0 {
                bail!("{failed} cells could not run");
            }
        }
        Command::Stats { input, out } => {
            let report = write_stats_report(&input, &out)?;
            println!("wrote {} rows to {}", report.len(), out.display());
        }
    }
    Ok(())
}
