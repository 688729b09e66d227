//! Search algorithms: (1+1) EA, (μ+1) EA, GSEMO and NSGA-II.
//!
//! Every run owns its random stream (ChaCha8 seeded from
//! [`RunConfig::seed`]) and all of its mutable state, so runs are
//! reproducible and independent runs can execute concurrently.

mod gsemo;
mod mu_plus_one;
mod nsga2;
mod one_plus_one;
mod sorting;

use std::fmt;
use std::str::FromStr;

pub use gsemo::run_gsemo;
pub use mu_plus_one::run_mu_plus_one;
pub use nsga2::run_nsga2;
pub use one_plus_one::run_one_plus_one;
pub use sorting::{brute_force_fronts, crowding_distance, fast_non_dominated_sort};

use crate::chance::ChanceSpec;
use crate::error::{config_err, CckpError, Result};
use crate::fitness::{fitness_triple, mo_point, FitnessTriple, MOPoint, MoModel};
use crate::instances::Instance;
use crate::operators::{CrossoverKind, KSigma, MutationKind};
use crate::selection::Selection;

/// Fitness model driving a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// Lexicographic `(u, v, P)`.
    SingleObjective,
    MoOld,
    MoNew,
}

impl Model {
    fn mo_model(self) -> Option<MoModel> {
        match self {
            Model::SingleObjective => None,
            Model::MoOld => Some(MoModel::Old),
            Model::MoNew => Some(MoModel::New),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::SingleObjective => "single",
            Model::MoOld => "mo-old",
            Model::MoNew => "mo-new",
        })
    }
}

impl FromStr for Model {
    type Err = CckpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" | "single-objective" => Ok(Model::SingleObjective),
            "mo-old" | "old" => Ok(Model::MoOld),
            "mo-new" | "new" => Ok(Model::MoNew),
            other => config_err(format!("unknown model '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgorithmKind {
    OnePlusOne,
    MuPlusOne,
    Gsemo,
    Nsga2,
}

impl AlgorithmKind {
    pub fn default_mu(self) -> usize {
        match self {
            AlgorithmKind::OnePlusOne | AlgorithmKind::Gsemo => 1,
            AlgorithmKind::MuPlusOne => 10,
            AlgorithmKind::Nsga2 => 20,
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgorithmKind::OnePlusOne => "one-plus-one",
            AlgorithmKind::MuPlusOne => "mu-plus-one",
            AlgorithmKind::Gsemo => "gsemo",
            AlgorithmKind::Nsga2 => "nsga2",
        })
    }
}

impl FromStr for AlgorithmKind {
    type Err = CckpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-plus-one" | "(1+1)" => Ok(AlgorithmKind::OnePlusOne),
            "mu-plus-one" | "(mu+1)" => Ok(AlgorithmKind::MuPlusOne),
            "gsemo" => Ok(AlgorithmKind::Gsemo),
            "nsga2" | "nsga-ii" => Ok(AlgorithmKind::Nsga2),
            other => config_err(format!("unknown algorithm '{other}'")),
        }
    }
}

/// Parameters of a single run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Fitness-evaluation budget; initial individuals count against it.
    pub max_evaluations: u64,
    /// Population size for (μ+1) EA and NSGA-II.
    pub mu: usize,
    /// Offspring per NSGA-II generation.
    pub offspring_per_generation: usize,
    pub mutation: MutationKind,
    pub crossover: CrossoverKind,
    pub model: Model,
    pub ps_k_sigma: KSigma,
    pub seed: u64,
    /// Record `(evaluation, best feasible profit)` at every improvement.
    pub record_trace: bool,
    /// Run the all-pairs archive / front checks after every update and count
    /// violations in [`RunResult::invariant_violations`].
    pub check_invariants: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_evaluations: 100_000,
            mu: 10,
            offspring_per_generation: 10,
            mutation: MutationKind::Standard,
            crossover: CrossoverKind::None,
            model: Model::SingleObjective,
            ps_k_sigma: KSigma::Sqrt,
            seed: 0,
            record_trace: false,
            check_invariants: false,
        }
    }
}

impl RunConfig {
    pub fn with_budget(mut self, evaluations: u64) -> Self {
        self.max_evaluations = evaluations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mutation(mut self, mutation: MutationKind) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn with_crossover(mut self, crossover: CrossoverKind) -> Self {
        self.crossover = crossover;
        self
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn with_mu(mut self, mu: usize) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn with_invariant_checks(mut self) -> Self {
        self.check_invariants = true;
        self
    }

    fn require_budget(&self) -> Result<()> {
        if self.max_evaluations == 0 {
            return config_err("evaluation budget must be at least 1");
        }
        Ok(())
    }

    fn require_model(&self, single: bool) -> Result<()> {
        match (single, self.model) {
            (true, Model::SingleObjective) => Ok(()),
            (false, Model::MoOld | Model::MoNew) => Ok(()),
            (true, m) => config_err(format!("single-objective algorithm cannot use model {m}")),
            (false, m) => config_err(format!("multi-objective algorithm cannot use model {m}")),
        }
    }
}

/// Fitness stored alongside each final individual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitnessRecord {
    Triple(FitnessTriple),
    Point(MOPoint),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub best_feasible_profit: Option<f64>,
    pub best_selection: Option<Selection>,
    pub evaluations_used: u64,
    pub trace: Option<Vec<(u64, f64)>>,
    pub final_population: Vec<(Selection, FitnessRecord)>,
    /// Only populated when [`RunConfig::check_invariants`] is set.
    pub invariant_violations: u64,
}

pub fn run(
    kind: AlgorithmKind,
    inst: &Instance,
    spec: &ChanceSpec,
    cfg: &RunConfig,
) -> Result<RunResult> {
    match kind {
        AlgorithmKind::OnePlusOne => run_one_plus_one(inst, spec, cfg),
        AlgorithmKind::MuPlusOne => run_mu_plus_one(inst, spec, cfg),
        AlgorithmKind::Gsemo => run_gsemo(inst, spec, cfg),
        AlgorithmKind::Nsga2 => run_nsga2(inst, spec, cfg),
    }
}

/// Counts fitness evaluations and remembers the best feasible selection seen.
struct Evaluator<'a> {
    inst: &'a Instance,
    spec: &'a ChanceSpec,
    used: u64,
    budget: u64,
    best: Option<(Selection, f64)>,
    trace: Option<Vec<(u64, f64)>>,
}

impl<'a> Evaluator<'a> {
    fn new(inst: &'a Instance, spec: &'a ChanceSpec, cfg: &RunConfig) -> Result<Self> {
        spec.validate()?;
        cfg.require_budget()?;
        Ok(Self {
            inst,
            spec,
            used: 0,
            budget: cfg.max_evaluations,
            best: None,
            trace: cfg.record_trace.then(Vec::new),
        })
    }

    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    fn remaining(&self) -> u64 {
        self.budget - self.used
    }

    fn offer(&mut self, sel: &Selection, feasible: bool) {
        if !feasible {
            return;
        }
        let profit = sel.profit();
        if self.best.as_ref().is_none_or(|(_, p)| profit > *p) {
            self.best = Some((sel.clone(), profit));
            if let Some(trace) = &mut self.trace {
                trace.push((self.used, profit));
            }
        }
    }

    fn triple(&mut self, sel: &Selection) -> Result<FitnessTriple> {
        let f = fitness_triple(sel, self.inst, self.spec)?;
        self.used += 1;
        self.offer(sel, f.is_feasible());
        Ok(f)
    }

    fn point(&mut self, model: MoModel, sel: &Selection) -> Result<MOPoint> {
        let p = mo_point(model, sel, self.inst, self.spec)?;
        self.used += 1;
        self.offer(sel, p.g1 <= self.spec.alpha);
        Ok(p)
    }

    fn finish(
        self,
        final_population: Vec<(Selection, FitnessRecord)>,
        invariant_violations: u64,
    ) -> RunResult {
        let (best_selection, best_feasible_profit) = match self.best {
            Some((s, p)) => (Some(s), Some(p)),
            None => (None, None),
        };
        RunResult {
            best_feasible_profit,
            best_selection,
            evaluations_used: self.used,
            trace: self.trace,
            final_population,
            invariant_violations,
        }
    }
}

/// Two distinct indices drawn uniformly from `0..len` (`len ≥ 2`).
fn distinct_pair<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..len);
    let mut j = rng.random_range(0..len - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}
