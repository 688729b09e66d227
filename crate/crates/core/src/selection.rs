//! Bit-string genotype with cached sums.

use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::error::{CckpError, Result};
use crate::instances::Instance;

/// A subset of items, `x ∈ {0,1}^n`, together with the running totals every
/// fitness function needs: item count, expected weight and profit.
///
/// The totals are tied to the instance used to build the selection; every
/// mutating method therefore takes that instance again. Equality and hashing
/// look at the bits only.
#[derive(Clone, Debug)]
pub struct Selection {
    bits: Vec<bool>,
    count: usize,
    expected_weight: f64,
    profit: f64,
}

impl Selection {
    pub fn empty(n: usize) -> Self {
        Self {
            bits: vec![false; n],
            count: 0,
            expected_weight: 0.0,
            profit: 0.0,
        }
    }

    pub fn from_bits(inst: &Instance, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != inst.len() {
            return Err(CckpError::Validation(format!(
                "selection has {} bits but the instance has {} items",
                bits.len(),
                inst.len()
            )));
        }
        let mut sel = Self {
            bits,
            count: 0,
            expected_weight: 0.0,
            profit: 0.0,
        };
        sel.recompute(inst);
        Ok(sel)
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bit_str(inst: &Instance, s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CckpError::Validation(format!(
                    "invalid bit character '{other}'"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(inst, bits)
    }

    /// Every bit set independently with probability 1/2.
    pub fn random<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Self {
        let bits = (0..inst.len()).map(|_| rng.random::<bool>()).collect();
        let mut sel = Self {
            bits,
            count: 0,
            expected_weight: 0.0,
            profit: 0.0,
        };
        sel.recompute(inst);
        sel
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// Number of selected items `s`.
    pub fn count(&self) -> usize {
        self.count
    }

    /// `E_W = Σ a_i x_i`.
    pub fn expected_weight(&self) -> f64 {
        self.expected_weight
    }

    /// `P = Σ p_i x_i`.
    pub fn profit(&self) -> f64 {
        self.profit
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn flip(&mut self, i: usize, inst: &Instance) {
        let now = !self.bits[i];
        self.bits[i] = now;
        if now {
            self.count += 1;
            self.expected_weight += inst.expected_weight(i);
            self.profit += inst.profit(i);
        } else {
            self.count -= 1;
            self.expected_weight -= inst.expected_weight(i);
            self.profit -= inst.profit(i);
        }
    }

    pub fn set(&mut self, i: usize, value: bool, inst: &Instance) {
        if self.bits[i] != value {
            self.flip(i, inst);
        }
    }

    pub fn hamming(&self, other: &Selection) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Recomputes the cached totals from scratch.
    pub fn recompute(&mut self, inst: &Instance) {
        let (mut count, mut weight, mut profit) = (0, 0.0, 0.0);
        for i in self.selected() {
            count += 1;
            weight += inst.expected_weight(i);
            profit += inst.profit(i);
        }
        self.count = count;
        self.expected_weight = weight;
        self.profit = profit;
    }

    /// True when the cached totals agree with a fresh recomputation (up to
    /// rounding drift from incremental updates on non-integer data).
    pub fn caches_consistent(&self, inst: &Instance) -> bool {
        if self.bits.len() != inst.len() {
            return false;
        }
        let mut fresh = self.clone();
        fresh.recompute(inst);
        let tol_w = 1e-9 * inst.total_expected_weight().max(1.0);
        let tol_p = 1e-9 * inst.profits().iter().sum::<f64>().max(1.0);
        fresh.count == self.count
            && self.count == self.bits.iter().filter(|&&b| b).count()
            && (fresh.expected_weight - self.expected_weight).abs() <= tol_w
            && (fresh.profit - self.profit).abs() <= tol_p
    }
}

impl PartialEq for Selection {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

impl Eq for Selection {}

impl Hash for Selection {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
