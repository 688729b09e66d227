//! Grid execution: every (algorithm, α, δ, bound) cell is run `repetitions`
//! times with its own derived seed.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::summary::{summarize, write_runs, write_summary, write_timings, CellStatus, SummaryRow};
use crate::algorithms::{run, RunConfig};
use crate::chance::{Bound, ChanceSpec};
use crate::error::{CckpError, Result};
use crate::instances::Instance;

pub const RUNS_FILE: &str = "runs.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const TIMINGS_FILE: &str = "timings.csv";

/// Identifies one grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellKey {
    /// 0-based position in the configuration's algorithm list.
    pub algorithm_index: usize,
    pub algorithm: String,
    pub instance: String,
    pub alpha: f64,
    pub delta: f64,
    pub bound: String,
}

impl CellKey {
    pub fn same_cell(&self, other: &CellKey) -> bool {
        self.algorithm_index == other.algorithm_index
            && self.algorithm == other.algorithm
            && self.instance == other.instance
            && self.alpha.to_bits() == other.alpha.to_bits()
            && self.delta.to_bits() == other.delta.to_bits()
            && self.bound == other.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub cell: CellKey,
    pub rep: usize,
    pub seed: u64,
    /// `None` when the run never evaluated a feasible selection.
    pub best_profit: Option<f64>,
    pub evaluations: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTiming {
    pub cell: CellKey,
    pub rep: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub runs: Vec<RunRecord>,
    pub timings: Vec<RunTiming>,
    pub summary: Vec<SummaryRow>,
}

/// Seed of one run: the first 8 bytes of SHA-256 over the base seed and the
/// run's identity, so adding cells leaves existing streams untouched.
pub fn derive_seed(base_seed: u64, cell: &CellKey, rep: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    for field in [&cell.instance, &cell.algorithm, &cell.bound] {
        h.update((field.len() as u64).to_le_bytes());
        h.update(field.as_bytes());
    }
    h.update(cell.alpha.to_bits().to_le_bytes());
    h.update(cell.delta.to_bits().to_le_bytes());
    h.update((rep as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

struct Job {
    cell_index: usize,
    rep: usize,
    seed: u64,
}

/// Cells in canonical order: algorithm, then α, δ and bound as listed.
pub fn cells(cfg: &ExperimentConfig, instance_label: &str) -> Vec<(CellKey, Bound)> {
    let mut out = Vec::new();
    for (i, alg) in cfg.algorithms.iter().enumerate() {
        for &alpha in &cfg.alphas {
            for &delta in &cfg.deltas {
                for &bound in &cfg.bounds {
                    let key = CellKey {
                        algorithm_index: i,
                        algorithm: alg.label.clone(),
                        instance: instance_label.to_string(),
                        alpha,
                        delta,
                        bound: bound.name().to_string(),
                    };
                    out.push((key, bound));
                }
            }
        }
    }
    out
}

/// Runs the whole grid in memory. Runs execute in parallel; the returned
/// records are in canonical order regardless of completion order.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let inst = cfg.instance.load()?;
    execute_on(cfg, &inst)
}

/// As [`execute`], with the instance already loaded.
pub fn execute_on(cfg: &ExperimentConfig, inst: &Instance) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let cells = cells(cfg, inst.label());
    let mut jobs = Vec::with_capacity(cells.len() * cfg.repetitions);
    for (cell_index, (key, _)) in cells.iter().enumerate() {
        for rep in 0..cfg.repetitions {
            jobs.push(Job {
                cell_index,
                rep,
                seed: derive_seed(cfg.base_seed, key, rep),
            });
        }
    }
    let mut seeds: Vec<u64> = jobs.iter().map(|j| j.seed).collect();
    seeds.sort_unstable();
    if seeds.windows(2).any(|w| w[0] == w[1]) {
        return Err(CckpError::Config(
            "seed derivation collided; change base_seed".into(),
        ));
    }

    let outcomes: Vec<Result<(RunRecord, RunTiming)>> = jobs
        .par_iter()
        .map(|job| {
            let (key, bound) = &cells[job.cell_index];
            let alg = &cfg.algorithms[key.algorithm_index];
            let spec = ChanceSpec::new(key.delta, key.alpha, *bound)?;
            let run_cfg = RunConfig {
                seed: job.seed,
                ..alg.template.clone()
            };
            let start = Instant::now();
            let result = run(alg.kind, inst, &spec, &run_cfg)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok((
                RunRecord {
                    cell: key.clone(),
                    rep: job.rep,
                    seed: job.seed,
                    best_profit: result.best_feasible_profit,
                    evaluations: result.evaluations_used,
                },
                RunTiming {
                    cell: key.clone(),
                    rep: job.rep,
                    seconds,
                },
            ))
        })
        .collect();

    let mut runs = Vec::new();
    let mut timings = Vec::new();
    let mut errors: Vec<Option<String>> = vec![None; cells.len()];
    for (job, outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok((r, t)) => {
                runs.push(r);
                timings.push(t);
            }
            Err(e) => {
                errors[job.cell_index].get_or_insert_with(|| e.to_string());
            }
        }
    }
    let keys: Vec<CellKey> = cells.into_iter().map(|(k, _)| k).collect();
    let mut summary = summarize(&keys, cfg.repetitions, &runs);
    for (row, err) in summary.iter_mut().zip(errors) {
        if let Some(message) = err {
            row.status = CellStatus::Error(message);
        }
    }
    Ok(ExperimentOutput {
        runs,
        timings,
        summary,
    })
}

/// Runs the grid and writes `runs.csv`, `summary.csv` and `timings.csv`
/// into `out_dir` (created if missing).
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: impl AsRef<Path>,
) -> Result<ExperimentOutput> {
    let out_dir = out_dir.as_ref();
    let output = execute(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    write_runs(&output.runs, out_dir.join(RUNS_FILE))?;
    write_summary(&output.summary, out_dir.join(SUMMARY_FILE))?;
    write_timings(&output.timings, out_dir.join(TIMINGS_FILE))?;
    Ok(output)
}
