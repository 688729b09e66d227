use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{distinct_pair, Evaluator, FitnessRecord, RunConfig, RunResult};
use crate::chance::ChanceSpec;
use crate::error::Result;
use crate::fitness::{best_feasible, ParetoArchive};
use crate::instances::Instance;
use crate::operators::{crossover, CrossoverKind, Mutator};
use crate::selection::Selection;

/// GSEMO over the configured bi-objective model.
///
/// Each step mutates a uniformly chosen archive member. With a crossover
/// configured and at least two members, a second distinct member is drawn
/// and the pair is recombined before mutation. The child enters the archive
/// unless a member weakly dominates it, and evicts every member it weakly
/// dominates.
pub fn run_gsemo(inst: &Instance, spec: &ChanceSpec, cfg: &RunConfig) -> Result<RunResult> {
    cfg.require_model(false)?;
    let model = cfg.model.mo_model().expect("checked above");
    let mut eval = Evaluator::new(inst, spec, cfg)?;
    let mutator = Mutator::new(cfg.mutation, inst.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut archive = ParetoArchive::new();
    let x = Selection::random(inst, &mut rng);
    let p = eval.point(model, &x)?;
    archive.insert(x, p);

    let mut violations = 0;
    while !eval.exhausted() {
        let parent = if cfg.crossover != CrossoverKind::None && archive.len() >= 2 {
            let (i, j) = distinct_pair(archive.len(), &mut rng);
            crossover(
                cfg.crossover,
                &archive.get(i).0,
                &archive.get(j).0,
                inst,
                cfg.ps_k_sigma,
                &mut rng,
            )?
        } else {
            archive.get(rng.random_range(0..archive.len())).0.clone()
        };
        let child = mutator.mutate(&parent, inst, &mut rng);
        let p = eval.point(model, &child)?;
        archive.insert(child, p);
        if cfg.check_invariants {
            if !archive.is_mutually_non_dominating() {
                violations += 1;
            }
            // The archive's best feasible member must match the running best.
            let in_archive =
                best_feasible(archive.entries().iter().map(|(s, p)| (s, p)), spec.alpha)
                    .map(|s| s.profit());
            if in_archive != eval.best.as_ref().map(|(_, p)| *p) {
                violations += 1;
            }
        }
    }
    let final_population = archive
        .into_entries()
        .into_iter()
        .map(|(s, p)| (s, FitnessRecord::Point(p)))
        .collect();
    Ok(eval.finish(final_population, violations))
}
