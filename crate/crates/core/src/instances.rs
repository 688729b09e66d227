//! Knapsack instances: the data model, the two benchmark generators and the
//! plain-text instance file format.
//!
//! File layout (UTF-8):
//!
//! ```text
//! cckp 1
//! <n> <capacity> <family> <label...>
//! 1 <p_1> <a_1>
//! ...
//! n <p_n> <a_n>
//! ```
//!
//! Item indices are 1-based and must appear in order. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{config_err, CckpError, Result};

const MAGIC: &str = "cckp";
const FORMAT_VERSION: u32 = 1;

/// How an instance was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Uncorrelated,
    BoundedStronglyCorrelated,
    Custom,
}

impl Family {
    pub fn token(self) -> &'static str {
        match self {
            Family::Uncorrelated => "uncorr",
            Family::BoundedStronglyCorrelated => "bsc",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Family {
    type Err = CckpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uncorr" | "uncorrelated" => Ok(Family::Uncorrelated),
            "bsc" | "bounded-strongly-correlated" => Ok(Family::BoundedStronglyCorrelated),
            "custom" => Ok(Family::Custom),
            other => config_err(format!("unknown instance family '{other}'")),
        }
    }
}

/// Deterministic skeleton of a chance-constrained knapsack instance:
/// profits `p_i`, expected weights `a_i` and capacity `C`.
///
/// Immutable after construction, so a single instance can be shared by any
/// number of concurrent runs.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    profits: Vec<f64>,
    expected_weights: Vec<f64>,
    capacity: f64,
    family: Family,
    label: String,
    ratio_order: Vec<usize>,
}

impl Instance {
    /// Validates and builds an instance. The label is trimmed and any line
    /// breaks are replaced by spaces so that it fits on the header line.
    pub fn new(
        profits: Vec<f64>,
        expected_weights: Vec<f64>,
        capacity: f64,
        family: Family,
        label: impl Into<String>,
    ) -> Result<Self> {
        if profits.is_empty() {
            return Err(CckpError::Validation("instance has no items".into()));
        }
        if profits.len() != expected_weights.len() {
            return Err(CckpError::Validation(format!(
                "{} profits but {} expected weights",
                profits.len(),
                expected_weights.len()
            )));
        }
        for (i, (&p, &a)) in profits.iter().zip(&expected_weights).enumerate() {
            if !(p.is_finite() && p > 0.0) {
                return Err(CckpError::Validation(format!(
                    "item {}: profit must be positive, got {p}",
                    i + 1
                )));
            }
            if !(a.is_finite() && a > 0.0) {
                return Err(CckpError::Validation(format!(
                    "item {}: expected weight must be positive, got {a}",
                    i + 1
                )));
            }
        }
        if !(capacity.is_finite() && capacity > 0.0) {
            return Err(CckpError::Validation(format!(
                "capacity must be positive, got {capacity}"
            )));
        }
        let label = label
            .into()
            .split(['\n', '\r'])
            .collect::<Vec<_>>()
            .join(" ")
            .trim()
            .to_string();
        let ratio_order = ratio_order(&profits, &expected_weights);
        Ok(Self {
            profits,
            expected_weights,
            capacity,
            family,
            label,
            ratio_order,
        })
    }

    pub fn len(&self) -> usize {
        self.profits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profits.is_empty()
    }

    pub fn profits(&self) -> &[f64] {
        &self.profits
    }

    pub fn expected_weights(&self) -> &[f64] {
        &self.expected_weights
    }

    pub fn profit(&self, i: usize) -> f64 {
        self.profits[i]
    }

    pub fn expected_weight(&self, i: usize) -> f64 {
        self.expected_weights[i]
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn total_expected_weight(&self) -> f64 {
        self.expected_weights.iter().sum()
    }

    /// Item indices sorted by profit/weight ratio, best first; equal ratios
    /// keep the lower index first.
    pub fn ratio_order(&self) -> &[usize] {
        &self.ratio_order
    }

    /// Same items, different capacity.
    pub fn with_capacity(&self, capacity: f64) -> Result<Self> {
        Self::new(
            self.profits.clone(),
            self.expected_weights.clone(),
            capacity,
            self.family,
            self.label.clone(),
        )
    }
}

fn ratio_order(profits: &[f64], weights: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..profits.len()).collect();
    // Compare p_i/a_i vs p_j/a_j; a stable sort keeps lower indices first on ties.
    order.sort_by(|&i, &j| {
        let ri = profits[i] / weights[i];
        let rj = profits[j] / weights[j];
        rj.total_cmp(&ri)
    });
    order
}

/// Parameters shared by both benchmark generators.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Values are drawn from the integers `[1, value_range]`.
    pub value_range: u64,
    pub capacity_fraction: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(n: usize, value_range: u64, capacity_fraction: f64, seed: u64) -> Self {
        Self {
            n,
            value_range,
            capacity_fraction,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return config_err("generator needs at least one item");
        }
        if self.value_range < 10 {
            return config_err(format!(
                "value range must be at least 10, got {}",
                self.value_range
            ));
        }
        if !(self.capacity_fraction > 0.0 && self.capacity_fraction < 1.0) {
            return config_err(format!(
                "capacity fraction must lie in (0, 1), got {}",
                self.capacity_fraction
            ));
        }
        Ok(())
    }

    fn capacity_for(&self, weights: &[f64]) -> f64 {
        let total: f64 = weights.iter().sum();
        // A single light item can round to zero; the smallest usable capacity is 1.
        (self.capacity_fraction * total).round().max(1.0)
    }

    fn default_label(&self, family: Family) -> String {
        format!(
            "{}-n{}-r{}-f{}-s{}",
            family.token(),
            self.n,
            self.value_range,
            self.capacity_fraction,
            self.seed
        )
    }
}

/// Uncorrelated family: `p_i` and `a_i` independently uniform on `[1, R]`.
pub fn generate_uncorrelated(cfg: &GeneratorConfig) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut profits = Vec::with_capacity(cfg.n);
    let mut weights = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        profits.push(rng.random_range(1..=cfg.value_range) as f64);
        weights.push(rng.random_range(1..=cfg.value_range) as f64);
    }
    let capacity = cfg.capacity_for(&weights);
    Instance::new(
        profits,
        weights,
        capacity,
        Family::Uncorrelated,
        cfg.default_label(Family::Uncorrelated),
    )
}

/// Bounded strongly correlated family: `a_i` uniform on `[1, R]` and
/// `p_i = a_i + R/10`.
pub fn generate_bounded_strongly_correlated(cfg: &GeneratorConfig) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let weights: Vec<f64> = (0..cfg.n)
        .map(|_| rng.random_range(1..=cfg.value_range) as f64)
        .collect();
    strongly_correlated_from_weights(weights, cfg)
}

/// Applies the strongly-correlated profit rule to an explicit weight draw.
pub fn strongly_correlated_from_weights(
    weights: Vec<f64>,
    cfg: &GeneratorConfig,
) -> Result<Instance> {
    cfg.validate()?;
    if weights.len() != cfg.n {
        return config_err(format!("expected {} weights, got {}", cfg.n, weights.len()));
    }
    let shift = cfg.value_range as f64 / 10.0;
    let profits = weights.iter().map(|a| a + shift).collect();
    let capacity = cfg.capacity_for(&weights);
    Instance::new(
        profits,
        weights,
        capacity,
        Family::BoundedStronglyCorrelated,
        cfg.default_label(Family::BoundedStronglyCorrelated),
    )
}

pub fn generate(family: Family, cfg: &GeneratorConfig) -> Result<Instance> {
    match family {
        Family::Uncorrelated => generate_uncorrelated(cfg),
        Family::BoundedStronglyCorrelated => generate_bounded_strongly_correlated(cfg),
        Family::Custom => config_err("the custom family has no generator"),
    }
}

/// Renders an instance in the text format described in the module docs.
pub fn format_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("{MAGIC} {FORMAT_VERSION}\n"));
    out.push_str(&format!(
        "{} {} {} {}\n",
        inst.len(),
        inst.capacity(),
        inst.family().token(),
        inst.label()
    ));
    for (i, (p, a)) in inst
        .profits()
        .iter()
        .zip(inst.expected_weights())
        .enumerate()
    {
        out.push_str(&format!("{} {} {}\n", i + 1, p, a));
    }
    out
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(format_instance(inst).as_bytes())?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text)
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(CckpError::Parse {
        line,
        message: message.into(),
    })
}

fn parse_num<T: FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T> {
    match token {
        None => parse_err(line, format!("missing {what}")),
        Some(t) => t
            .parse()
            .or_else(|_| parse_err(line, format!("invalid {what} '{t}'"))),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let Some((lno, magic)) = lines.next() else {
        return parse_err(1, "empty file");
    };
    let mut tokens = magic.split_whitespace();
    if tokens.next() != Some(MAGIC) {
        return parse_err(lno, format!("expected '{MAGIC} {FORMAT_VERSION}' header"));
    }
    let version: u32 = parse_num(tokens.next(), lno, "format version")?;
    if version != FORMAT_VERSION {
        return parse_err(lno, format!("unsupported format version {version}"));
    }

    let Some((lno, header)) = lines.next() else {
        return parse_err(lno + 1, "missing instance header");
    };
    let mut parts = header.splitn(4, char::is_whitespace);
    let n: usize = parse_num(parts.next(), lno, "item count")?;
    let capacity: f64 = parse_num(parts.next(), lno, "capacity")?;
    let family: Family = match parts.next() {
        Some(tok) => tok
            .parse()
            .or_else(|_| parse_err(lno, format!("unknown family '{tok}'")))?,
        None => return parse_err(lno, "missing family"),
    };
    let label = parts.next().unwrap_or("").trim().to_string();
    if n == 0 {
        return parse_err(lno, "item count must be positive");
    }

    let mut profits = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut last_line = lno;
    for (lno, line) in lines {
        last_line = lno;
        if profits.len() == n {
            return parse_err(lno, format!("more than {n} item lines"));
        }
        let mut tokens = line.split_whitespace();
        let index: usize = parse_num(tokens.next(), lno, "item index")?;
        if index != profits.len() + 1 {
            return parse_err(
                lno,
                format!("expected item index {}, found {index}", profits.len() + 1),
            );
        }
        let p: f64 = parse_num(tokens.next(), lno, "profit")?;
        let a: f64 = parse_num(tokens.next(), lno, "expected weight")?;
        if tokens.next().is_some() {
            return parse_err(lno, "trailing tokens after item");
        }
        profits.push(p);
        weights.push(a);
    }
    if profits.len() != n {
        return parse_err(
            last_line,
            format!("header declares {n} items but {} were found", profits.len()),
        );
    }
    Instance::new(profits, weights, capacity, family, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_item_ranges() {
        for seed in 0..50 {
            let cfg = GeneratorConfig::new(1, 10, 0.5, seed);
            let inst = generate_uncorrelated(&cfg).unwrap();
            let (p, a) = (inst.profit(0), inst.expected_weight(0));
            assert!((1.0..=10.0).contains(&p));
            assert!((1.0..=10.0).contains(&a));
            assert_eq!(inst.capacity(), (0.5 * a).round().max(1.0));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GeneratorConfig::new(64, 1000, 0.25, 99);
        assert_eq!(
            format_instance(&generate_uncorrelated(&cfg).unwrap()),
            format_instance(&generate_uncorrelated(&cfg).unwrap())
        );
        assert_eq!(
            format_instance(&generate_bounded_strongly_correlated(&cfg).unwrap()),
            format_instance(&generate_bounded_strongly_correlated(&cfg).unwrap())
        );
    }

    #[test]
    fn uncorrelated_weight_mean_band() {
        let cfg = GeneratorConfig::new(500, 1000, 0.5, 42);
        let inst = generate_uncorrelated(&cfg).unwrap();
        let mean = inst.total_expected_weight() / 500.0;
        // U{1..R}: mean (R+1)/2, variance (R^2-1)/12.
        let r = 1000.0_f64;
        let mu = (r + 1.0) / 2.0;
        let sd_of_mean = ((r * r - 1.0) / 12.0).sqrt() / 500f64.sqrt();
        assert!((mean - mu).abs() <= 3.0 * sd_of_mean, "mean {mean}");
        assert!((450.0..=550.0).contains(&mean));
    }

    #[test]
    fn strongly_correlated_shift() {
        let cfg = GeneratorConfig::new(300, 1000, 0.25, 5);
        let inst = generate_bounded_strongly_correlated(&cfg).unwrap();
        for i in 0..inst.len() {
            assert_eq!(inst.profit(i) - inst.expected_weight(i), 100.0);
        }
    }

    #[test]
    fn strongly_correlated_hand_trace() {
        let cfg = GeneratorConfig::new(2, 10, 0.5, 0);
        let inst = strongly_correlated_from_weights(vec![3.0, 7.0], &cfg).unwrap();
        assert_eq!(inst.profits(), &[4.0, 8.0]);
        assert_eq!(inst.capacity(), 5.0);
    }

    #[test]
    fn generated_invariants() {
        for seed in 0..20 {
            for fraction in [0.25, 0.5, 0.9] {
                let cfg = GeneratorConfig::new(100, 50, fraction, seed);
                for inst in [
                    generate_uncorrelated(&cfg).unwrap(),
                    generate_bounded_strongly_correlated(&cfg).unwrap(),
                ] {
                    let w = inst.expected_weights();
                    assert!(w.iter().all(|&a| (1.0..=50.0).contains(&a)));
                    assert!(inst.capacity() < inst.total_expected_weight());
                }
            }
        }
    }

    #[test]
    fn rejects_bad_config() {
        assert!(matches!(
            generate_uncorrelated(&GeneratorConfig::new(0, 100, 0.5, 1)),
            Err(CckpError::Config(_))
        ));
        assert!(matches!(
            generate_bounded_strongly_correlated(&GeneratorConfig::new(5, 9, 0.5, 1)),
            Err(CckpError::Config(_))
        ));
        assert!(generate_uncorrelated(&GeneratorConfig::new(5, 100, 1.0, 1)).is_err());
    }

    #[test]
    fn too_many_item_lines() {
        let text = "cckp 1\n2 10 custom demo\n1 1 1\n2 2 2\n3 3 3\n";
        match parse_instance(text) {
            Err(CckpError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_item_lines() {
        let text = "cckp 1\n3 10 custom demo\n1 1 1\n2 2 2\n";
        assert!(matches!(parse_instance(text), Err(CckpError::Parse { .. })));
    }

    #[test]
    fn zero_profit_is_a_validation_error() {
        let text = "cckp 1\n2 10 custom demo\n1 0 1\n2 2 2\n";
        assert!(matches!(
            parse_instance(text),
            Err(CckpError::Validation(_))
        ));
        let text = "cckp 1\n2 10 custom demo\n1 3 -1\n2 2 2\n";
        assert!(matches!(
            parse_instance(text),
            Err(CckpError::Validation(_))
        ));
    }

    #[test]
    fn bad_number_names_line() {
        let text = "cckp 1\n2 10 custom demo\n1 3 x\n2 2 2\n";
        match parse_instance(text) {
            Err(CckpError::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("expected weight"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn label_with_spaces_survives() {
        let inst = Instance::new(
            vec![1.5, 2.0],
            vec![3.0, 4.25],
            5.0,
            Family::Custom,
            "  my  label\nwith break ",
        )
        .unwrap();
        assert_eq!(inst.label(), "my  label with break");
        let back = parse_instance(&format_instance(&inst)).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn ratio_order_ties_by_index() {
        let inst = Instance::new(
            vec![10.0, 8.0, 6.0, 4.0, 9.0],
            vec![5.0, 4.0, 3.0, 2.0, 3.0],
            10.0,
            Family::Custom,
            "",
        )
        .unwrap();
        assert_eq!(inst.ratio_order(), &[4, 0, 1, 2, 3]);
    }
}
