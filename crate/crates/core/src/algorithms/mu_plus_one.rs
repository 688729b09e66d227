use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{distinct_pair, Evaluator, FitnessRecord, RunConfig, RunResult};
use crate::chance::ChanceSpec;
use crate::error::{config_err, Result};
use crate::fitness::{lex_compare, FitnessTriple};
use crate::instances::Instance;
use crate::operators::{crossover, CrossoverKind, Mutator};
use crate::selection::Selection;

/// Index of the lexicographically worst member (first one on ties).
fn worst(pop: &[(Selection, FitnessTriple)]) -> usize {
    let mut w = 0;
    for i in 1..pop.len() {
        if lex_compare(&pop[i].1, &pop[w].1) == Ordering::Less {
            w = i;
        }
    }
    w
}

fn best(pop: &[(Selection, FitnessTriple)]) -> FitnessTriple {
    pop.iter()
        .map(|(_, f)| *f)
        .max_by(lex_compare)
        .expect("population is non-empty")
}

/// (μ+1) EA: two distinct parents, optional crossover, mutation, and the
/// child replaces the worst member if it is at least as good.
pub fn run_mu_plus_one(inst: &Instance, spec: &ChanceSpec, cfg: &RunConfig) -> Result<RunResult> {
    cfg.require_model(true)?;
    if cfg.mu == 0 {
        return config_err("population size must be positive");
    }
    if cfg.crossover != CrossoverKind::None && cfg.mu < 2 {
        return config_err(format!(
            "crossover needs a population of at least 2, got mu = {}",
            cfg.mu
        ));
    }
    if cfg.max_evaluations < cfg.mu as u64 {
        return config_err(format!(
            "budget {} cannot cover the initial population of {}",
            cfg.max_evaluations, cfg.mu
        ));
    }
    let mut eval = Evaluator::new(inst, spec, cfg)?;
    let mutator = Mutator::new(cfg.mutation, inst.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut pop = Vec::with_capacity(cfg.mu);
    for _ in 0..cfg.mu {
        let x = Selection::random(inst, &mut rng);
        let f = eval.triple(&x)?;
        pop.push((x, f));
    }

    let mut violations = 0;
    let mut elite = best(&pop);
    while !eval.exhausted() {
        let child = if cfg.mu >= 2 {
            let (i, j) = distinct_pair(cfg.mu, &mut rng);
            crossover(
                cfg.crossover,
                &pop[i].0,
                &pop[j].0,
                inst,
                cfg.ps_k_sigma,
                &mut rng,
            )?
        } else {
            pop[rng.random_range(0..cfg.mu)].0.clone()
        };
        let child = mutator.mutate(&child, inst, &mut rng);
        let f = eval.triple(&child)?;
        let w = worst(&pop);
        if lex_compare(&f, &pop[w].1) != Ordering::Less {
            pop[w] = (child, f);
        }
        if cfg.check_invariants {
            let now = best(&pop);
            if pop.len() != cfg.mu || lex_compare(&now, &elite) == Ordering::Less {
                violations += 1;
            }
            elite = now;
        }
    }
    let final_population = pop
        .into_iter()
        .map(|(s, f)| (s, FitnessRecord::Triple(f)))
        .collect();
    Ok(eval.finish(final_population, violations))
}
