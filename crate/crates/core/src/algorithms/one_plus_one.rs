use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Evaluator, FitnessRecord, RunConfig, RunResult};
use crate::chance::ChanceSpec;
use crate::error::{config_err, Result};
use crate::fitness::lex_compare;
use crate::instances::Instance;
use crate::operators::{CrossoverKind, Mutator};
use crate::selection::Selection;

/// (1+1) EA on the lexicographic fitness. The offspring replaces the parent
/// whenever it is at least as good.
pub fn run_one_plus_one(inst: &Instance, spec: &ChanceSpec, cfg: &RunConfig) -> Result<RunResult> {
    cfg.require_model(true)?;
    if cfg.crossover != CrossoverKind::None {
        return config_err("(1+1) EA has a single parent and cannot use crossover");
    }
    let mut eval = Evaluator::new(inst, spec, cfg)?;
    let mutator = Mutator::new(cfg.mutation, inst.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut x = Selection::random(inst, &mut rng);
    let mut fx = eval.triple(&x)?;
    let mut violations = 0;
    while !eval.exhausted() {
        let y = mutator.mutate(&x, inst, &mut rng);
        if cfg.check_invariants && !y.caches_consistent(inst) {
            violations += 1;
        }
        let fy = eval.triple(&y)?;
        if lex_compare(&fy, &fx) != Ordering::Less {
            x = y;
            fx = fy;
        }
    }
    Ok(eval.finish(vec![(x, FitnessRecord::Triple(fx))], violations))
}
