//! Variation operators on [`Selection`]s.
//!
//! All operators return a new selection and leave their parents untouched.
//! Independent per-bit flips are realised by jumping between flipped
//! positions with geometrically distributed gaps, so a mutation costs time
//! proportional to the number of flipped bits rather than to `n`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Geometric, Normal};

use crate::error::{config_err, CckpError, Result};
use crate::instances::Instance;
use crate::selection::Selection;

/// Default power-law exponent for heavy-tail mutation.
pub const DEFAULT_BETA: f64 = 1.5;

/// Discrete power law on `{1, ..., ⌊n/2⌋}` with `Prob(θ) ∝ θ^{-β}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerLawDist {
    n: usize,
    beta: f64,
    half_n: usize,
    norm: f64,
    cdf_table: Vec<f64>,
}

impl PowerLawDist {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n < 2 {
            return config_err(format!("power-law mutation needs n >= 2, got {n}"));
        }
        if !(beta.is_finite() && beta > 1.0) {
            return config_err(format!("power-law exponent must exceed 1, got {beta}"));
        }
        let half_n = n / 2;
        let weights: Vec<f64> = (1..=half_n).map(|i| (i as f64).powf(-beta)).collect();
        let norm: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cdf_table: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / norm
            })
            .collect();
        *cdf_table.last_mut().expect("non-empty support") = 1.0;
        Ok(Self {
            n,
            beta,
            half_n,
            norm,
            cdf_table,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Largest value in the support, `⌊n/2⌋`.
    pub fn half_n(&self) -> usize {
        self.half_n
    }

    /// Normalising constant `Σ_{i=1}^{⌊n/2⌋} i^{-β}`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn cdf_table(&self) -> &[f64] {
        &self.cdf_table
    }

    pub fn pmf(&self, theta: usize) -> f64 {
        if theta == 0 || theta > self.half_n {
            return 0.0;
        }
        (theta as f64).powf(-self.beta) / self.norm
    }

    pub fn mean(&self) -> f64 {
        (1..=self.half_n).map(|t| t as f64 * self.pmf(t)).sum()
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf_table.partition_point(|&c| c <= u) + 1
    }
}

/// Flips every bit of `sel` independently with probability `rate`.
fn flip_independently<R: Rng + ?Sized>(
    sel: &mut Selection,
    rate: f64,
    inst: &Instance,
    rng: &mut R,
) {
    let n = sel.len();
    if rate <= 0.0 || n == 0 {
        return;
    }
    if rate >= 1.0 {
        for i in 0..n {
            sel.flip(i, inst);
        }
        return;
    }
    let gap = Geometric::new(rate).expect("rate lies in (0, 1)");
    let mut pos = gap.sample(rng);
    while pos < n as u64 {
        sel.flip(pos as usize, inst);
        pos = pos.saturating_add(1).saturating_add(gap.sample(rng));
    }
}

/// Standard bit mutation with per-bit probability `rate`.
pub fn standard_mutation<R: Rng + ?Sized>(
    x: &Selection,
    rate: f64,
    inst: &Instance,
    rng: &mut R,
) -> Result<Selection> {
    if !(0.0..=1.0).contains(&rate) {
        return config_err(format!("mutation rate must lie in [0, 1], got {rate}"));
    }
    let mut child = x.clone();
    flip_independently(&mut child, rate, inst, rng);
    debug_assert!(child.caches_consistent(inst));
    Ok(child)
}

/// Heavy-tail mutation: draws `θ` from the power law, then flips each bit
/// with probability `θ/n`.
pub fn heavy_tail_mutation<R: Rng + ?Sized>(
    x: &Selection,
    dist: &PowerLawDist,
    inst: &Instance,
    rng: &mut R,
) -> Selection {
    let theta = dist.sample(rng);
    mutate_with_theta(x, theta, inst, rng)
}

/// The flip stage of heavy-tail mutation for a given `θ`.
pub fn mutate_with_theta<R: Rng + ?Sized>(
    x: &Selection,
    theta: usize,
    inst: &Instance,
    rng: &mut R,
) -> Selection {
    let mut child = x.clone();
    let rate = theta as f64 / x.len().max(1) as f64;
    flip_independently(&mut child, rate, inst, rng);
    debug_assert!(child.caches_consistent(inst));
    child
}

/// Mutation operator choice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MutationKind {
    /// Per-bit rate `1/n`.
    Standard,
    HeavyTail {
        beta: f64,
    },
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutationKind::Standard => f.write_str("standard"),
            MutationKind::HeavyTail { beta } => write!(f, "heavy-tail(beta={beta})"),
        }
    }
}

/// A mutation operator prepared for a fixed string length.
#[derive(Clone, Debug)]
pub enum Mutator {
    Standard { rate: f64 },
    HeavyTail(PowerLawDist),
}

impl Mutator {
    pub fn new(kind: MutationKind, n: usize) -> Result<Self> {
        match kind {
            MutationKind::Standard => Ok(Mutator::Standard {
                rate: 1.0 / n.max(1) as f64,
            }),
            MutationKind::HeavyTail { beta } => Ok(Mutator::HeavyTail(PowerLawDist::new(n, beta)?)),
        }
    }

    pub fn mutate<R: Rng + ?Sized>(
        &self,
        x: &Selection,
        inst: &Instance,
        rng: &mut R,
    ) -> Selection {
        match self {
            Mutator::Standard { rate } => {
                let mut child = x.clone();
                flip_independently(&mut child, *rate, inst, rng);
                child
            }
            Mutator::HeavyTail(dist) => heavy_tail_mutation(x, dist, inst, rng),
        }
    }
}

fn check_parents(x1: &Selection, x2: &Selection, inst: &Instance) -> Result<()> {
    if x1.len() != x2.len() || x1.len() != inst.len() {
        return Err(CckpError::Validation(format!(
            "crossover parents of lengths {} and {} do not match the instance ({} items)",
            x1.len(),
            x2.len(),
            inst.len()
        )));
    }
    Ok(())
}

/// Uniform crossover: agreeing bits are copied, each disagreeing bit comes
/// from either parent with probability 1/2.
pub fn uniform_crossover<R: Rng + ?Sized>(
    x1: &Selection,
    x2: &Selection,
    inst: &Instance,
    rng: &mut R,
) -> Result<Selection> {
    check_parents(x1, x2, inst)?;
    let mut child = x1.clone();
    for i in 0..x1.len() {
        if x1.get(i) != x2.get(i) && rng.random::<bool>() {
            child.flip(i, inst);
        }
    }
    debug_assert!(child.caches_consistent(inst));
    Ok(child)
}

/// Spread of the number `k` of items inserted by PS crossover, drawn from a
/// normal distribution centred on `m/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum KSigma {
    /// Standard deviation `sqrt(m/2)` (variance `m/2`).
    #[default]
    Sqrt,
    /// Standard deviation `m/2`.
    Linear,
}

impl FromStr for KSigma {
    type Err = CckpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(KSigma::Sqrt),
            "linear" => Ok(KSigma::Linear),
            other => config_err(format!("unknown k spread '{other}' (sqrt or linear)")),
        }
    }
}

impl fmt::Display for KSigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KSigma::Sqrt => "sqrt",
            KSigma::Linear => "linear",
        })
    }
}

/// Draws the insertion count for `m` differing positions: normal sample,
/// rounded to the nearest integer and clamped to `[0, m]`.
pub fn draw_insert_count<R: Rng + ?Sized>(m: usize, sigma: KSigma, rng: &mut R) -> usize {
    if m == 0 {
        return 0;
    }
    let mean = m as f64 / 2.0;
    let sd = match sigma {
        KSigma::Sqrt => mean.sqrt(),
        KSigma::Linear => mean,
    };
    let k = Normal::new(mean, sd)
        .expect("finite positive sd")
        .sample(rng);
    k.round().clamp(0.0, m as f64) as usize
}

/// Problem-specific crossover: common bits are inherited, the differing
/// positions are ranked by profit/weight ratio and the best `k` of them are
/// set, the rest cleared. Capacity is not checked here.
pub fn ps_crossover<R: Rng + ?Sized>(
    x1: &Selection,
    x2: &Selection,
    inst: &Instance,
    sigma: KSigma,
    rng: &mut R,
) -> Result<Selection> {
    check_parents(x1, x2, inst)?;
    let m = x1.hamming(x2);
    if m == 0 {
        return Ok(x1.clone());
    }
    let k = draw_insert_count(m, sigma, rng);
    ps_crossover_with_k(x1, x2, inst, k)
}

/// PS crossover with a fixed insertion count `k` (clamped to `m`).
pub fn ps_crossover_with_k(
    x1: &Selection,
    x2: &Selection,
    inst: &Instance,
    k: usize,
) -> Result<Selection> {
    check_parents(x1, x2, inst)?;
    let mut child = x1.clone();
    let mut rank = 0;
    for &i in inst.ratio_order() {
        if x1.get(i) != x2.get(i) {
            child.set(i, rank < k, inst);
            rank += 1;
        }
    }
    debug_assert!(child.caches_consistent(inst));
    Ok(child)
}

/// Crossover operator choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossoverKind {
    None,
    Uniform,
    Ps,
}

impl fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossoverKind::None => "none",
            CrossoverKind::Uniform => "uniform",
            CrossoverKind::Ps => "ps",
        })
    }
}

impl FromStr for CrossoverKind {
    type Err = CckpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(CrossoverKind::None),
            "uniform" => Ok(CrossoverKind::Uniform),
            "ps" => Ok(CrossoverKind::Ps),
            other => config_err(format!("unknown crossover '{other}' (none, uniform or ps)")),
        }
    }
}

/// Applies `kind` to two parents; `None` returns a copy of the first.
pub fn crossover<R: Rng + ?Sized>(
    kind: CrossoverKind,
    x1: &Selection,
    x2: &Selection,
    inst: &Instance,
    sigma: KSigma,
    rng: &mut R,
) -> Result<Selection> {
    match kind {
        CrossoverKind::None => Ok(x1.clone()),
        CrossoverKind::Uniform => uniform_crossover(x1, x2, inst, rng),
        CrossoverKind::Ps => ps_crossover(x1, x2, inst, sigma, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Family;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_instance(n: usize) -> Instance {
        Instance::new(vec![1.0; n], vec![1.0; n], n as f64, Family::Custom, "").unwrap()
    }

    fn ps_instance() -> Instance {
        Instance::new(
            vec![10.0, 8.0, 6.0, 4.0],
            vec![5.0, 4.0, 3.0, 2.0],
            8.0,
            Family::Custom,
            "",
        )
        .unwrap()
    }

    #[test]
    fn power_law_n4() {
        let d = PowerLawDist::new(4, 1.5).unwrap();
        assert_eq!(d.half_n(), 2);
        assert_abs_diff_eq!(d.norm(), 1.0 + 2f64.powf(-1.5), epsilon = 1e-15);
        assert_abs_diff_eq!(d.norm(), 1.353553, epsilon = 1e-6);
        // 1 / 1.353553... = 0.738796...
        assert_abs_diff_eq!(d.pmf(1), 1.0 / (1.0 + 2f64.powf(-1.5)), epsilon = 1e-15);
        assert_abs_diff_eq!(d.pmf(1), 0.738796, epsilon = 1e-6);
        assert_abs_diff_eq!(d.pmf(2), 0.261204, epsilon = 1e-6);
        assert_eq!(d.pmf(3), 0.0);
    }

    #[test]
    fn power_law_singleton_support() {
        let d = PowerLawDist::new(2, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..1000).all(|_| d.sample(&mut rng) == 1));
        let d = PowerLawDist::new(3, 1.5).unwrap();
        assert!((0..1000).all(|_| d.sample(&mut rng) == 1));
    }

    #[test]
    fn power_law_rejects_bad_params() {
        assert!(PowerLawDist::new(1, 1.5).is_err());
        assert!(PowerLawDist::new(10, 1.0).is_err());
    }

    #[test]
    fn power_law_table_shape() {
        let d = PowerLawDist::new(500, 1.5).unwrap();
        let t = d.cdf_table();
        assert_eq!(t.len(), 250);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!((t[249] - 1.0).abs() <= 1e-12);
        assert!((1..250).all(|k| d.pmf(k) > d.pmf(k + 1)));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!((0..10_000).all(|_| (1..=250).contains(&d.sample(&mut rng))));
    }

    #[test]
    fn standard_mutation_extremes() {
        let inst = unit_instance(20);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Selection::random(&inst, &mut rng);
        assert_eq!(standard_mutation(&x, 0.0, &inst, &mut rng).unwrap(), x);
        let c = standard_mutation(&x, 1.0, &inst, &mut rng).unwrap();
        assert!((0..20).all(|i| c.get(i) != x.get(i)));
        assert!(c.caches_consistent(&inst));
        assert!(standard_mutation(&x, 1.5, &inst, &mut rng).is_err());
        assert!(standard_mutation(&x, -0.1, &inst, &mut rng).is_err());
    }

    #[test]
    fn uniform_crossover_basics() {
        let inst = unit_instance(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let zero = Selection::from_bit_str(&inst, "00").unwrap();
        let one = Selection::from_bit_str(&inst, "11").unwrap();
        assert_eq!(uniform_crossover(&one, &one, &inst, &mut rng).unwrap(), one);
        let mut counts = [0usize; 4];
        let trials = 40_000;
        for _ in 0..trials {
            let c = uniform_crossover(&zero, &one, &inst, &mut rng).unwrap();
            counts[(c.get(0) as usize) * 2 + c.get(1) as usize] += 1;
        }
        // each cell ~ Binomial(40000, 1/4): sd ≈ 86.6
        for c in counts {
            assert!((c as f64 - 10_000.0).abs() < 5.0 * 86.6, "{counts:?}");
        }
        let short = Selection::empty(3);
        assert!(uniform_crossover(&zero, &short, &inst, &mut rng).is_err());
    }

    #[test]
    fn ps_hand_traces() {
        let inst = ps_instance();
        let x1 = Selection::from_bit_str(&inst, "1100").unwrap();
        let x2 = Selection::from_bit_str(&inst, "1010").unwrap();
        let child = |k| ps_crossover_with_k(&x1, &x2, &inst, k).unwrap().to_string();
        assert_eq!(child(1), "1100");
        assert_eq!(child(2), "1110");
        assert_eq!(child(0), "1000");
        assert_eq!(child(7), "1110");
    }

    #[test]
    fn ps_identical_parents() {
        let inst = ps_instance();
        let x = Selection::from_bit_str(&inst, "0110").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(
            ps_crossover(&x, &x, &inst, KSigma::Sqrt, &mut rng).unwrap(),
            x
        );
    }

    #[test]
    fn insert_count_is_clamped() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for m in 0..20 {
            for sigma in [KSigma::Sqrt, KSigma::Linear] {
                for _ in 0..200 {
                    assert!(draw_insert_count(m, sigma, &mut rng) <= m);
                }
            }
        }
        let n = 20_000;
        let mean = (0..n)
            .map(|_| draw_insert_count(40, KSigma::Sqrt, &mut rng) as f64)
            .sum::<f64>()
            / n as f64;
        assert!((mean - 20.0).abs() < 0.1, "{mean}");
    }

    fn bits(n: usize) -> impl Strategy<Value = Vec<bool>> {
        proptest::collection::vec(any::<bool>(), n)
    }

    proptest! {
        #[test]
        fn crossovers_keep_common_bits(a in bits(24), b in bits(24), seed in any::<u64>()) {
            let inst = Instance::new(
                (1..=24).map(|i| (i * 7 % 11 + 1) as f64).collect(),
                (1..=24).map(|i| (i * 5 % 13 + 1) as f64).collect(),
                50.0,
                Family::Custom,
                "",
            ).unwrap();
            let x1 = Selection::from_bits(&inst, a).unwrap();
            let x2 = Selection::from_bits(&inst, b).unwrap();
            let (c1, c2) = (x1.clone(), x2.clone());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = uniform_crossover(&x1, &x2, &inst, &mut rng).unwrap();
            let p = ps_crossover(&x1, &x2, &inst, KSigma::Sqrt, &mut rng).unwrap();
            for child in [&u, &p] {
                prop_assert!(child.caches_consistent(&inst));
                for i in 0..24 {
                    if x1.get(i) == x2.get(i) {
                        prop_assert_eq!(child.get(i), x1.get(i));
                    }
                }
            }
            // ones among the differing positions form a prefix of the ratio order
            let differing: Vec<usize> = inst.ratio_order().iter().copied()
                .filter(|&i| x1.get(i) != x2.get(i)).collect();
            let k = differing.iter().take_while(|&&i| p.get(i)).count();
            prop_assert!(differing[k..].iter().all(|&i| !p.get(i)));
            prop_assert_eq!(x1, c1);
            prop_assert_eq!(x2, c2);
        }

        #[test]
        fn mutations_keep_caches(a in bits(30), seed in any::<u64>()) {
            let inst = unit_instance(30);
            let x = Selection::from_bits(&inst, a).unwrap();
            let copy = x.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dist = PowerLawDist::new(30, 1.5).unwrap();
            let h = heavy_tail_mutation(&x, &dist, &inst, &mut rng);
            let s = standard_mutation(&x, 0.2, &inst, &mut rng).unwrap();
            prop_assert!(h.caches_consistent(&inst));
            prop_assert!(s.caches_consistent(&inst));
            prop_assert_eq!(x, copy);
        }
    }
}
