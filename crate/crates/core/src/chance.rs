//! Probability that a selection overloads the knapsack.
//!
//! Item weights are independent and uniform on `[a_i - δ, a_i + δ]`, so the
//! total weight of `s` selected items is `W = E_W + δ·ΣU_i` with
//! `U_i ~ U[-1, 1]`. Two closed-form upper bounds on `Prob(W ≥ C)` are
//! provided (one-sided Chebyshev and Chernoff) along with two references:
//! the exact Irwin-Hall tail for small `s` and a Monte Carlo estimate.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{config_err, format_real, CckpError, Result};
use crate::instances::Instance;
pub use crate::selection::Selection;

/// Largest selection size accepted by [`exact_violation`].
pub const EXACT_MAX_ITEMS: usize = 30;

/// How `Prob(W ≥ C)` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Chebyshev,
    Chernoff,
    /// Irwin-Hall tail; only for selections of at most [`EXACT_MAX_ITEMS`] items.
    Exact,
    /// Sampled frequency with a fixed seed, so repeated evaluation of the
    /// same selection is deterministic.
    MonteCarlo {
        samples: u64,
        seed: u64,
    },
}

impl Bound {
    pub fn name(&self) -> &'static str {
        match self {
            Bound::Chebyshev => "chebyshev",
            Bound::Chernoff => "chernoff",
            Bound::Exact => "exact",
            Bound::MonteCarlo { .. } => "montecarlo",
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bound {
    type Err = CckpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chebyshev" => Ok(Bound::Chebyshev),
            "chernoff" => Ok(Bound::Chernoff),
            "exact" => Ok(Bound::Exact),
            other => config_err(format!(
                "unknown bound '{other}' (expected chebyshev, chernoff or exact)"
            )),
        }
    }
}

/// Parameters of the stochastic constraint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChanceSpec {
    /// Half-width of each item's weight interval.
    pub delta: f64,
    /// Tolerated violation probability.
    pub alpha: f64,
    pub bound: Bound,
}

impl ChanceSpec {
    pub fn new(delta: f64, alpha: f64, bound: Bound) -> Result<Self> {
        let spec = Self {
            delta,
            alpha,
            bound,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return config_err(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return config_err(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if let Bound::MonteCarlo { samples, .. } = self.bound {
            if samples == 0 {
                return config_err("Monte Carlo needs at least one sample");
            }
        }
        Ok(())
    }
}

fn overload_error(expected: f64, capacity: f64) -> CckpError {
    CckpError::Domain(format!(
        "expected weight {expected} is not below capacity {capacity}; \
         overloaded selections take the penalty branch (g1 = 1 + overload)"
    ))
}

/// One-sided Chebyshev (Cantelli) bound
/// `δ²s / (δ²s + 3(C − E_W)²)`; requires `E_W < C`.
pub fn chebyshev_bound(sel: &Selection, inst: &Instance, spec: &ChanceSpec) -> Result<f64> {
    let (ew, cap) = (sel.expected_weight(), inst.capacity());
    if ew >= cap {
        return Err(overload_error(ew, cap));
    }
    Ok(chebyshev_tail(sel.count(), cap - ew, spec.delta))
}

/// Chebyshev bound from the selection size and the slack `C − E_W > 0`.
pub fn chebyshev_tail(count: usize, slack: f64, delta: f64) -> f64 {
    if count == 0 {
        return 0.0;
    }
    let var = delta * delta * count as f64;
    var / (var + 3.0 * slack * slack)
}

/// Chernoff bound `(e^g / h^h)^{s/2}` with `g = (C − E_W)/(δs)`, `h = 1 + g`,
/// evaluated in log space; requires `E_W ≤ C`.
pub fn chernoff_bound(sel: &Selection, inst: &Instance, spec: &ChanceSpec) -> Result<f64> {
    let (ew, cap) = (sel.expected_weight(), inst.capacity());
    if ew > cap {
        return Err(overload_error(ew, cap));
    }
    Ok(chernoff_tail(sel.count(), cap - ew, spec.delta))
}

/// Chernoff bound from the selection size and the slack `C − E_W ≥ 0`.
pub fn chernoff_tail(count: usize, slack: f64, delta: f64) -> f64 {
    if count == 0 {
        return 0.0;
    }
    let s = count as f64;
    let g = slack / (delta * s);
    // h ln h with h = 1 + g
    let log_bound = 0.5 * s * (g - (1.0 + g) * g.ln_1p());
    log_bound.exp().clamp(0.0, 1.0)
}

/// Exact `Prob(W ≥ C)` for at most [`EXACT_MAX_ITEMS`] selected items.
///
/// With `V_i = (U_i + 1)/2 ~ U[0,1]` the event is `ΣV_i ≥ t`,
/// `t = (y + s)/2`, `y = (C − E_W)/δ`; the tail is read off the Irwin-Hall
/// distribution.
pub fn exact_violation(sel: &Selection, inst: &Instance, spec: &ChanceSpec) -> Result<f64> {
    let s = sel.count();
    if s > EXACT_MAX_ITEMS {
        return Err(CckpError::Unsupported(format!(
            "exact evaluation handles at most {EXACT_MAX_ITEMS} items, selection has {s}; \
             use the Monte Carlo estimator"
        )));
    }
    Ok(exact_tail(
        s,
        inst.capacity() - sel.expected_weight(),
        spec.delta,
    ))
}

/// Exact tail from the selection size and the (possibly negative) slack.
pub fn exact_tail(count: usize, slack: f64, delta: f64) -> f64 {
    if count == 0 {
        return if slack > 0.0 { 0.0 } else { 1.0 };
    }
    let s = count as f64;
    let t = (slack / delta + s) / 2.0;
    // Prob(ΣV ≥ t) = Prob(ΣV ≤ s − t) by symmetry; evaluating the lower
    // tail keeps small probabilities accurate.
    irwin_hall_cdf(count, s - t).clamp(0.0, 1.0)
}

/// CDF of the sum of `n` independent `U[0,1]` variables.
///
/// Uses `F_j(x) = (x·F_{j−1}(x) + (j − x)·F_{j−1}(x − 1)) / j`, which inside
/// the support is a convex combination and therefore free of the
/// cancellation that plagues the alternating-sum formula.
pub fn irwin_hall_cdf(n: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= n as f64 {
        return 1.0;
    }
    // vals[k] = F_j(x − k), k = 0..=n−j
    let mut vals: Vec<f64> = (0..=n)
        .map(|k| if x - k as f64 >= 0.0 { 1.0 } else { 0.0 })
        .collect();
    for j in 1..=n {
        let jf = j as f64;
        for k in 0..=(n - j) {
            let xk = x - k as f64;
            vals[k] = if xk <= 0.0 {
                0.0
            } else if xk >= jf {
                1.0
            } else {
                (xk * vals[k] + (jf - xk) * vals[k + 1]) / jf
            };
        }
    }
    vals[0]
}

/// Sampled violation frequency and its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

pub fn monte_carlo_violation(
    sel: &Selection,
    inst: &Instance,
    spec: &ChanceSpec,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    spec.validate()?;
    if samples == 0 {
        return config_err("Monte Carlo needs at least one sample");
    }
    let lows: Vec<f64> = sel
        .selected()
        .map(|i| inst.expected_weight(i) - spec.delta)
        .collect();
    if lows.is_empty() {
        return Ok(McEstimate {
            estimate: if inst.capacity() > 0.0 { 0.0 } else { 1.0 },
            std_error: 0.0,
        });
    }
    let width = 2.0 * spec.delta;
    let cap = inst.capacity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let w: f64 = lows.iter().map(|lo| lo + width * rng.random::<f64>()).sum();
        if w >= cap {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

/// `Prob(W ≥ C)` according to `spec.bound`.
///
/// The surrogate bounds reject overloaded selections with a domain error;
/// the fitness functions never call them in that regime.
pub fn violation_probability(sel: &Selection, inst: &Instance, spec: &ChanceSpec) -> Result<f64> {
    match spec.bound {
        Bound::Chebyshev => chebyshev_bound(sel, inst, spec),
        Bound::Chernoff => chernoff_bound(sel, inst, spec),
        Bound::Exact => exact_violation(sel, inst, spec),
        Bound::MonteCarlo { samples, seed } => {
            monte_carlo_violation(sel, inst, spec, samples, seed).map(|e| e.estimate)
        }
    }
}

/// One line of a bound verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub count: usize,
    pub expected_weight: f64,
    pub capacity: f64,
    pub chebyshev: f64,
    pub chernoff: f64,
    /// Exact tail when `count ≤ EXACT_MAX_ITEMS`, otherwise Monte Carlo.
    pub reference: f64,
    /// Zero for exact references.
    pub std_error: f64,
    pub reference_method: Bound,
}

/// Compares both surrogates with a reference probability on random
/// selections of the instance. Sizes are drawn uniformly from
/// `1..=min(n, 2·EXACT_MAX_ITEMS)`; selections at or above capacity are
/// redrawn and skipped after repeated failure.
pub fn verify_bounds(
    inst: &Instance,
    delta: f64,
    selections: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<BoundCheck>> {
    let spec = ChanceSpec::new(delta, 0.5, Bound::Chebyshev)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_size = inst.len().min(2 * EXACT_MAX_ITEMS);
    let mut rows = Vec::with_capacity(selections);
    for _ in 0..selections {
        let mut found = None;
        for _attempt in 0..100 {
            let size = rng.random_range(1..=max_size);
            let mut bits = vec![false; inst.len()];
            for i in index::sample(&mut rng, inst.len(), size) {
                bits[i] = true;
            }
            let sel = Selection::from_bits(inst, bits)?;
            if sel.expected_weight() < inst.capacity() {
                found = Some(sel);
                break;
            }
        }
        let Some(sel) = found else { continue };
        let chebyshev = chebyshev_bound(&sel, inst, &spec)?;
        let chernoff = chernoff_bound(&sel, inst, &spec)?;
        let (reference, std_error, reference_method) = if sel.count() <= EXACT_MAX_ITEMS {
            (exact_violation(&sel, inst, &spec)?, 0.0, Bound::Exact)
        } else {
            let mc_seed = rng.random::<u64>();
            let est = monte_carlo_violation(&sel, inst, &spec, samples, mc_seed)?;
            (
                est.estimate,
                est.std_error,
                Bound::MonteCarlo {
                    samples,
                    seed: mc_seed,
                },
            )
        };
        rows.push(BoundCheck {
            count: sel.count(),
            expected_weight: sel.expected_weight(),
            capacity: inst.capacity(),
            chebyshev,
            chernoff,
            reference,
            std_error,
            reference_method,
        });
    }
    Ok(rows)
}

pub fn write_bound_checks<W: std::io::Write>(rows: &[BoundCheck], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "s",
        "E_W",
        "C",
        "chebyshev",
        "chernoff",
        "exact_or_mc",
        "std_error",
        "method",
    ])?;
    for r in rows {
        w.write_record([
            r.count.to_string(),
            format_real(r.expected_weight),
            format_real(r.capacity),
            format_real(r.chebyshev),
            format_real(r.chernoff),
            format_real(r.reference),
            format_real(r.std_error),
            r.reference_method.name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
