//! Experiment configuration read from TOML.
//!
//! ```toml
//! repetitions = 30
//! base_seed = 7
//! budget = 100000
//!
//! [generator]            # or: [instance] path = "items.txt"
//! family = "bsc"
//! n = 500
//! range = 1000
//! fraction = 0.25
//! seed = 1
//!
//! [grid]
//! alpha = [0.001, 0.01, 0.1]
//! delta = [25, 50]
//! bound = ["chebyshev", "chernoff"]
//!
//! [[algorithm]]
//! label = "(1+1) EA HT"
//! kind = "one-plus-one"
//! mutation = "heavy-tail"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::algorithms::{AlgorithmKind, Model, RunConfig};
use crate::chance::Bound;
use crate::error::{config_err, Result};
use crate::instances::{generate, load_instance, Family, GeneratorConfig, Instance};
use crate::operators::{CrossoverKind, KSigma, MutationKind, DEFAULT_BETA};

/// Fitness-evaluation budget used when neither the experiment nor the
/// algorithm sets one.
pub const DEFAULT_BUDGET: u64 = 100_000;
pub const DEFAULT_REPETITIONS: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    File(PathBuf),
    Generated {
        family: Family,
        config: GeneratorConfig,
    },
}

impl InstanceSource {
    pub fn load(&self) -> Result<Instance> {
        match self {
            InstanceSource::File(path) => load_instance(path),
            InstanceSource::Generated { family, config } => generate(*family, config),
        }
    }
}

/// One algorithm column of the experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmSpec {
    pub label: String,
    pub kind: AlgorithmKind,
    /// Seed and budget are filled in per run.
    pub template: RunConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub bounds: Vec<Bound>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub repetitions: usize,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    instance: Option<RawInstance>,
    generator: Option<RawGenerator>,
    grid: RawGrid,
    #[serde(rename = "algorithm")]
    algorithms: Vec<RawAlgorithm>,
    repetitions: Option<usize>,
    #[serde(default)]
    base_seed: u64,
    budget: Option<u64>,
    output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    path: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    family: String,
    n: usize,
    range: u64,
    fraction: f64,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    alpha: Vec<f64>,
    delta: Vec<f64>,
    bound: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgorithm {
    label: String,
    kind: String,
    mutation: Option<String>,
    beta: Option<f64>,
    crossover: Option<String>,
    model: Option<String>,
    mu: Option<usize>,
    offspring: Option<usize>,
    ps_k_sigma: Option<String>,
    budget: Option<u64>,
}

fn parse_mutation(name: Option<&str>, beta: Option<f64>) -> Result<MutationKind> {
    match name.unwrap_or("standard") {
        "standard" => match beta {
            None => Ok(MutationKind::Standard),
            Some(_) => config_err("beta only applies to heavy-tail mutation"),
        },
        "heavy-tail" | "ht" => Ok(MutationKind::HeavyTail {
            beta: beta.unwrap_or(DEFAULT_BETA),
        }),
        other => config_err(format!(
            "unknown mutation '{other}' (standard or heavy-tail)"
        )),
    }
}

impl RawAlgorithm {
    fn into_spec(self, default_budget: u64) -> Result<AlgorithmSpec> {
        let kind: AlgorithmKind = self.kind.parse()?;
        let model = match self.model.as_deref() {
            Some(m) => m.parse()?,
            None => match kind {
                AlgorithmKind::OnePlusOne | AlgorithmKind::MuPlusOne => Model::SingleObjective,
                AlgorithmKind::Gsemo | AlgorithmKind::Nsga2 => Model::MoNew,
            },
        };
        let crossover = match self.crossover.as_deref() {
            Some(c) => c.parse()?,
            None if kind == AlgorithmKind::Nsga2 => CrossoverKind::Uniform,
            None => CrossoverKind::None,
        };
        let defaults = RunConfig::default();
        let template = RunConfig {
            max_evaluations: self.budget.unwrap_or(default_budget),
            mu: self.mu.unwrap_or(kind.default_mu()),
            offspring_per_generation: self.offspring.unwrap_or(defaults.offspring_per_generation),
            mutation: parse_mutation(self.mutation.as_deref(), self.beta)?,
            crossover,
            model,
            ps_k_sigma: match self.ps_k_sigma.as_deref() {
                Some(s) => s.parse()?,
                None => KSigma::default(),
            },
            ..defaults
        };
        Ok(AlgorithmSpec {
            label: self.label,
            kind,
            template,
        })
    }
}

impl ExperimentConfig {
    /// Parses TOML text; relative instance paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text)?;
        let instance = match (raw.instance, raw.generator) {
            (Some(i), None) => InstanceSource::File(base_dir.join(i.path)),
            (None, Some(g)) => InstanceSource::Generated {
                family: g.family.parse()?,
                config: GeneratorConfig::new(g.n, g.range, g.fraction, g.seed),
            },
            _ => return config_err("give exactly one of [instance] and [generator]"),
        };
        let default_budget = raw.budget.unwrap_or(DEFAULT_BUDGET);
        let cfg = Self {
            instance,
            alphas: raw.grid.alpha,
            deltas: raw.grid.delta,
            bounds: raw
                .grid
                .bound
                .iter()
                .map(|b| b.parse())
                .collect::<Result<_>>()?,
            algorithms: raw
                .algorithms
                .into_iter()
                .map(|a| a.into_spec(default_budget))
                .collect::<Result<_>>()?,
            repetitions: raw.repetitions.unwrap_or(DEFAULT_REPETITIONS),
            base_seed: raw.base_seed,
            output: raw.output.map(|p| base_dir.join(p)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    /// Checks the grid and the labels. Per-algorithm settings are checked
    /// when the cell runs, so one bad algorithm does not block the others.
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return config_err("repetitions must be at least 1");
        }
        if self.alphas.is_empty() || self.deltas.is_empty() || self.bounds.is_empty() {
            return config_err("grid needs at least one alpha, delta and bound");
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return config_err(format!("alpha must lie in (0, 1), got {a}"));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return config_err(format!("delta must be positive, got {d}"));
        }
        if self
            .bounds
            .iter()
            .any(|b| matches!(b, Bound::MonteCarlo { .. }))
        {
            return config_err("Monte Carlo is not available as a grid bound");
        }
        if self.algorithms.is_empty() {
            return config_err("at least one [[algorithm]] is required");
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if a.label.trim().is_empty() {
                return config_err(format!("algorithm {} has an empty label", i + 1));
            }
            if self.algorithms[..i].iter().any(|b| b.label == a.label) {
                return config_err(format!("duplicate algorithm label '{}'", a.label));
            }
        }
        Ok(())
    }

    /// Replaces the PS insertion-count spread of every algorithm.
    pub fn set_ps_k_sigma(&mut self, sigma: KSigma) {
        for a in &mut self.algorithms {
            a.template.ps_k_sigma = sigma;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
        repetitions = 5
        base_seed = 3
        budget = 2000
        [generator]
        family = "uncorr"
        n = 20
        range = 100
        fraction = 0.3
        [grid]
        alpha = [0.01, 0.1]
        delta = [5.0]
        bound = ["chebyshev", "chernoff"]
        [[algorithm]]
        label = "ht"
        kind = "one-plus-one"
        mutation = "heavy-tail"
        [[algorithm]]
        label = "nsga"
        kind = "nsga2"
        crossover = "ps"
        budget = 500
    "#;

    #[test]
    fn parses_and_applies_defaults() {
        let cfg = ExperimentConfig::from_toml_str(BASIC, Path::new(".")).unwrap();
        assert_eq!(cfg.repetitions, 5);
        assert_eq!(cfg.bounds, vec![Bound::Chebyshev, Bound::Chernoff]);
        let ht = &cfg.algorithms[0].template;
        assert_eq!(ht.mutation, MutationKind::HeavyTail { beta: 1.5 });
        assert_eq!(ht.max_evaluations, 2000);
        let nsga = &cfg.algorithms[1].template;
        assert_eq!(
            (nsga.mu, nsga.model, nsga.max_evaluations),
            (20, Model::MoNew, 500)
        );
        assert_eq!(nsga.crossover, CrossoverKind::Ps);
    }

    #[test]
    fn rejects_bad_grids() {
        let bad = BASIC.replace("alpha = [0.01, 0.1]", "alpha = [1.5]");
        assert!(ExperimentConfig::from_toml_str(&bad, Path::new(".")).is_err());
        let bad = BASIC.replace("repetitions = 5", "repetitions = 0");
        assert!(ExperimentConfig::from_toml_str(&bad, Path::new(".")).is_err());
        let bad = BASIC.replace("label = \"nsga\"", "label = \"ht\"");
        assert!(ExperimentConfig::from_toml_str(&bad, Path::new(".")).is_err());
        let bad = BASIC.replace("kind = \"nsga2\"", "kind = \"spea2\"");
        assert!(ExperimentConfig::from_toml_str(&bad, Path::new(".")).is_err());
    }
}
