use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sorting::{crowding_distance, fast_non_dominated_sort};
use super::{Evaluator, FitnessRecord, RunConfig, RunResult};
use crate::chance::ChanceSpec;
use crate::error::{config_err, Result};
use crate::fitness::{strictly_dominates, MOPoint};
use crate::instances::Instance;
use crate::operators::{crossover, Mutator};
use crate::selection::Selection;

struct Member {
    sel: Selection,
    point: MOPoint,
    rank: usize,
    crowding: f64,
}

/// Binary tournament on (rank, crowding distance); the first contestant
/// wins ties.
fn tournament<'a, R: Rng + ?Sized>(pop: &'a [Member], rng: &mut R) -> &'a Member {
    let a = &pop[rng.random_range(0..pop.len())];
    let b = &pop[rng.random_range(0..pop.len())];
    if b.rank < a.rank || (b.rank == a.rank && b.crowding > a.crowding) {
        b
    } else {
        a
    }
}

/// Sorts the combined pool and keeps `mu` members: whole fronts first, then
/// the most spread-out members of the front that overflows.
fn environmental_selection(pool: Vec<(Selection, MOPoint)>, mu: usize) -> Vec<Member> {
    let points: Vec<MOPoint> = pool.iter().map(|(_, p)| *p).collect();
    let fronts = fast_non_dominated_sort(&points);
    let mut keep: Vec<(usize, usize, f64)> = Vec::with_capacity(mu);
    for (rank, front) in fronts.iter().enumerate() {
        if keep.len() >= mu {
            break;
        }
        let front_points: Vec<MOPoint> = front.iter().map(|&i| points[i]).collect();
        let crowd = crowding_distance(&front_points);
        let mut members: Vec<(usize, usize, f64)> = front
            .iter()
            .zip(crowd)
            .map(|(&i, c)| (i, rank, c))
            .collect();
        if keep.len() + members.len() > mu {
            members.sort_by(|a, b| b.2.total_cmp(&a.2));
            members.truncate(mu - keep.len());
        }
        keep.extend(members);
    }
    let mut pool: Vec<Option<(Selection, MOPoint)>> = pool.into_iter().map(Some).collect();
    keep.into_iter()
        .map(|(i, rank, crowding)| {
            let (sel, point) = pool[i].take().expect("each index kept once");
            Member {
                sel,
                point,
                rank,
                crowding,
            }
        })
        .collect()
}

/// Survivors of a better front are never strictly dominated by survivors of
/// a worse one.
fn ranks_consistent(pop: &[Member]) -> bool {
    pop.iter().all(|a| {
        pop.iter()
            .all(|b| b.rank <= a.rank || !strictly_dominates(&b.point, &a.point))
    })
}

/// NSGA-II with `mu` parents and `offspring_per_generation` children per
/// generation. The best feasible selection is tracked over every evaluated
/// individual.
pub fn run_nsga2(inst: &Instance, spec: &ChanceSpec, cfg: &RunConfig) -> Result<RunResult> {
    cfg.require_model(false)?;
    let model = cfg.model.mo_model().expect("checked above");
    if cfg.mu < 2 {
        return config_err(format!("NSGA-II needs mu >= 2, got {}", cfg.mu));
    }
    if cfg.offspring_per_generation == 0 {
        return config_err("NSGA-II needs at least one offspring per generation");
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

    let mut initial = Vec::with_capacity(cfg.mu);
    for _ in 0..cfg.mu {
        let x = Selection::random(inst, &mut rng);
        let p = eval.point(model, &x)?;
        initial.push((x, p));
    }
    let mut pop = environmental_selection(initial, cfg.mu);

    let mut violations = 0;
    while !eval.exhausted() {
        let count = (cfg.offspring_per_generation as u64).min(eval.remaining()) as usize;
        let mut pool: Vec<(Selection, MOPoint)> = Vec::with_capacity(cfg.mu + count);
        for _ in 0..count {
            let a = tournament(&pop, &mut rng);
            let b = tournament(&pop, &mut rng);
            let child = crossover(
                cfg.crossover,
                &a.sel,
                &b.sel,
                inst,
                cfg.ps_k_sigma,
                &mut rng,
            )?;
            let child = mutator.mutate(&child, inst, &mut rng);
            let p = eval.point(model, &child)?;
            pool.push((child, p));
        }
        pool.extend(pop.into_iter().map(|m| (m.sel, m.point)));
        pop = environmental_selection(pool, cfg.mu);
        if cfg.check_invariants && (pop.len() != cfg.mu || !ranks_consistent(&pop)) {
            violations += 1;
        }
    }
    let final_population = pop
        .into_iter()
        .map(|m| (m.sel, FitnessRecord::Point(m.point)))
        .collect();
    Ok(eval.finish(final_population, violations))
}
