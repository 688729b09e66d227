//! Fitness models: the lexicographic triple used by the single-objective
//! algorithms and the two bi-objective models used by GSEMO and NSGA-II.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::chance::{violation_probability, ChanceSpec};
use crate::error::{config_err, CckpError, Result};
use crate::instances::Instance;
use crate::selection::Selection;

/// `(u, v, P)`: expected overload, probability excess over α, profit.
/// `u` and `v` are minimised, `P` maximised, in that order of priority.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitnessTriple {
    pub overload: f64,
    pub excess: f64,
    pub profit: f64,
}

impl FitnessTriple {
    pub fn is_feasible(&self) -> bool {
        self.overload == 0.0 && self.excess == 0.0
    }
}

/// Violation probability, or 1 for selections whose expected weight reaches
/// the capacity (the surrogates are undefined there).
fn probability_or_one(sel: &Selection, inst: &Instance, spec: &ChanceSpec) -> Result<f64> {
    if sel.expected_weight() >= inst.capacity() {
        Ok(1.0)
    } else {
        violation_probability(sel, inst, spec)
    }
}

pub fn fitness_triple(
    sel: &Selection,
    inst: &Instance,
    spec: &ChanceSpec,
) -> Result<FitnessTriple> {
    let overload = (sel.expected_weight() - inst.capacity()).max(0.0);
    let prob = probability_or_one(sel, inst, spec)?;
    Ok(FitnessTriple {
        overload,
        excess: (prob - spec.alpha).max(0.0),
        profit: sel.profit(),
    })
}

/// Lexicographic comparison. `Greater` means `a` is the better triple.
pub fn lex_compare(a: &FitnessTriple, b: &FitnessTriple) -> Ordering {
    b.overload
        .total_cmp(&a.overload)
        .then_with(|| b.excess.total_cmp(&a.excess))
        .then_with(|| a.profit.total_cmp(&b.profit))
}

/// Objective pair `(g1, g2)`: g1 minimised, g2 maximised.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MOPoint {
    pub g1: f64,
    pub g2: f64,
}

impl MOPoint {
    pub fn new(g1: f64, g2: f64) -> Self {
        Self { g1, g2 }
    }
}

/// Which bi-objective formulation to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoModel {
    /// Every feasible point dominates every infeasible one: profits of
    /// α-infeasible selections collapse to −1.
    Old,
    /// Profits are kept for every selection below expected capacity, so
    /// α-infeasible trade-off points stay in the front.
    New,
}

impl fmt::Display for MoModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoModel::Old => "old",
            MoModel::New => "new",
        })
    }
}

impl FromStr for MoModel {
    type Err = CckpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "old" => Ok(MoModel::Old),
            "new" => Ok(MoModel::New),
            other => config_err(format!("unknown model '{other}'")),
        }
    }
}

/// `g1`: violation probability below expected capacity, `1 + overload` at or
/// above it.
fn g1(sel: &Selection, inst: &Instance, spec: &ChanceSpec) -> Result<f64> {
    let (ew, cap) = (sel.expected_weight(), inst.capacity());
    if ew < cap {
        violation_probability(sel, inst, spec)
    } else {
        Ok(1.0 + (ew - cap))
    }
}

pub fn mo_point_new(sel: &Selection, inst: &Instance, spec: &ChanceSpec) -> Result<MOPoint> {
    let g1 = g1(sel, inst, spec)?;
    let g2 = if g1 <= 1.0 { sel.profit() } else { -1.0 };
    Ok(MOPoint { g1, g2 })
}

/// Reconstruction of the earlier model: same `g1`, profit only for
/// α-feasible selections.
pub fn mo_point_old(sel: &Selection, inst: &Instance, spec: &ChanceSpec) -> Result<MOPoint> {
    let g1 = g1(sel, inst, spec)?;
    let g2 = if g1 <= spec.alpha { sel.profit() } else { -1.0 };
    Ok(MOPoint { g1, g2 })
}

pub fn mo_point(
    model: MoModel,
    sel: &Selection,
    inst: &Instance,
    spec: &ChanceSpec,
) -> Result<MOPoint> {
    match model {
        MoModel::Old => mo_point_old(sel, inst, spec),
        MoModel::New => mo_point_new(sel, inst, spec),
    }
}

/// Weak dominance: `a` is no worse than `b` in both objectives.
pub fn dominates(a: &MOPoint, b: &MOPoint) -> bool {
    a.g1 <= b.g1 && a.g2 >= b.g2
}

/// Pareto dominance: weakly better everywhere, strictly better somewhere.
pub fn strictly_dominates(a: &MOPoint, b: &MOPoint) -> bool {
    dominates(a, b) && (a.g1 < b.g1 || a.g2 > b.g2)
}

/// Set of mutually non-dominating selections.
#[derive(Clone, Debug, Default)]
pub struct ParetoArchive {
    entries: Vec<(Selection, MOPoint)>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Selection, MOPoint)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(Selection, MOPoint)> {
        self.entries
    }

    pub fn get(&self, i: usize) -> &(Selection, MOPoint) {
        &self.entries[i]
    }

    /// Adds the candidate unless some member weakly dominates it, dropping
    /// every member the candidate weakly dominates. Returns whether the
    /// candidate was inserted.
    pub fn insert(&mut self, sel: Selection, point: MOPoint) -> bool {
        if self.entries.iter().any(|(_, p)| dominates(p, &point)) {
            return false;
        }
        self.entries.retain(|(_, p)| !dominates(&point, p));
        self.entries.push((sel, point));
        true
    }

    /// True when no member weakly dominates another. Sorted by `g1`
    /// (ties: higher `g2` first), that holds exactly when both objectives
    /// strictly increase along the order.
    pub fn is_mutually_non_dominating(&self) -> bool {
        let mut points: Vec<MOPoint> = self.entries.iter().map(|(_, p)| *p).collect();
        points.sort_by(|a, b| a.g1.total_cmp(&b.g1).then(b.g2.total_cmp(&a.g2)));
        points
            .windows(2)
            .all(|w| w[0].g1 < w[1].g1 && w[0].g2 < w[1].g2)
    }
}

/// Read access to whatever record an algorithm keeps per individual.
pub trait FeasibilityView {
    fn is_feasible(&self, alpha: f64) -> bool;
    fn profit(&self) -> f64;
    /// Secondary key for ties: lower is preferred.
    fn violation(&self) -> f64;
}

impl FeasibilityView for MOPoint {
    fn is_feasible(&self, alpha: f64) -> bool {
        // α < 1, so g1 ≤ α implies the selection is below expected capacity.
        self.g1 <= alpha
    }

    fn profit(&self) -> f64 {
        self.g2
    }

    fn violation(&self) -> f64 {
        self.g1
    }
}

impl FeasibilityView for FitnessTriple {
    fn is_feasible(&self, _alpha: f64) -> bool {
        FitnessTriple::is_feasible(self)
    }

    fn profit(&self) -> f64 {
        self.profit
    }

    fn violation(&self) -> f64 {
        self.excess
    }
}

/// Highest-profit feasible member; ties go to the lower violation value,
/// then to the earlier member.
pub fn best_feasible<'a, F, I>(members: I, alpha: f64) -> Option<&'a Selection>
where
    F: FeasibilityView + 'a,
    I: IntoIterator<Item = (&'a Selection, &'a F)>,
{
    let mut best: Option<(&'a Selection, &'a F)> = None;
    for (sel, rec) in members {
        if !rec.is_feasible(alpha) {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, b)) => {
                rec.profit() > b.profit()
                    || (rec.profit() == b.profit() && rec.violation() < b.violation())
            }
        };
        if better {
            best = Some((sel, rec));
        }
    }
    best.map(|(s, _)| s)
}

/// Direct feasibility check: `E_W < C` and the configured probability ≤ α.
pub fn is_feasible(sel: &Selection, inst: &Instance, spec: &ChanceSpec) -> Result<bool> {
    if sel.expected_weight() >= inst.capacity() {
        return Ok(false);
    }
    Ok(violation_probability(sel, inst, spec)? <= spec.alpha)
}
