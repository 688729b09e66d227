//! Rank-based significance tests and summary statistics.

use std::fmt;

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{CckpError, Result};

/// Mid-ranks (1-based) of `values`; tied values share the mean of their ranks.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

/// `Σ (t³ − t)` over the tie groups of `values`.
fn tie_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        sum += t * t * t - t;
        i = j;
    }
    sum
}

fn check_groups(groups: &[Vec<f64>]) -> Result<()> {
    if groups.len() < 2 {
        return Err(CckpError::Stats(format!(
            "need at least 2 groups, got {}",
            groups.len()
        )));
    }
    if let Some(i) = groups.iter().position(|g| g.is_empty()) {
        return Err(CckpError::Stats(format!("group {i} is empty")));
    }
    if groups.iter().flatten().any(|v| v.is_nan()) {
        return Err(CckpError::Stats("NaN in sample".into()));
    }
    Ok(())
}

/// Kruskal-Wallis H statistic with tie correction and its chi-square
/// p-value on `groups − 1` degrees of freedom. When every observation is
/// tied, `H = 0` and `p = 1`.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<(f64, f64)> {
    check_groups(groups)?;
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let ranks = mid_ranks(&pooled);
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let correction = 1.0 - tie_sum(&pooled) / (n * n * n - n);
    if correction <= 0.0 {
        return Ok((0.0, 1.0));
    }
    let h = ((12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction).max(0.0);
    let chi =
        ChiSquared::new((groups.len() - 1) as f64).map_err(|e| CckpError::Stats(e.to_string()))?;
    Ok((h, chi.sf(h)))
}

/// Two-sided Mann-Whitney rank-sum test, normal approximation with tie
/// correction. Returns `(p, mean rank of a − mean rank of b)`.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    check_groups(&[a.to_vec(), b.to_vec()])?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = mid_ranks(&pooled);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let r1: f64 = ranks[..a.len()].iter().sum();
    let r2: f64 = ranks[a.len()..].iter().sum();
    let shift = r1 / n1 - r2 / n2;
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_sum(&pooled) / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok((1.0, shift));
    }
    let z = (u - n1 * n2 / 2.0).abs() / var.sqrt();
    let normal = Normal::standard();
    Ok(((2.0 * normal.sf(z)).min(1.0), shift))
}

/// Outcome of comparing the row group against the column group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Better,
    Worse,
    Indistinguishable,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Better => "better",
            Comparison::Worse => "worse",
            Comparison::Indistinguishable => "indistinguishable",
        })
    }
}

/// All-pairs rank-sum tests at level `alpha_level / pairs`. Entry `[i][j]`
/// says whether group `i` has significantly higher (`Better`) or lower
/// (`Worse`) values than group `j`; the diagonal is `Indistinguishable`.
pub fn pairwise_bonferroni(groups: &[Vec<f64>], alpha_level: f64) -> Result<Vec<Vec<Comparison>>> {
    check_groups(groups)?;
    if !(alpha_level > 0.0 && alpha_level < 1.0) {
        return Err(CckpError::Stats(format!(
            "significance level must lie in (0, 1), got {alpha_level}"
        )));
    }
    let k = groups.len();
    let level = alpha_level / (k * (k - 1) / 2) as f64;
    let mut matrix = vec![vec![Comparison::Indistinguishable; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let (p, shift) = rank_sum_test(&groups[i], &groups[j])?;
            if p < level && shift != 0.0 {
                let (a, b) = if shift > 0.0 {
                    (Comparison::Better, Comparison::Worse)
                } else {
                    (Comparison::Worse, Comparison::Better)
                };
                matrix[i][j] = a;
                matrix[j][i] = b;
            }
        }
    }
    Ok(matrix)
}

/// Renders row `i` of a comparison matrix as e.g. `"2(-) 3(+)"`, with
/// 1-based group numbers: `j(+)` means group `i` beats group `j`.
pub fn stat_notation(matrix: &[Vec<Comparison>], i: usize) -> String {
    matrix[i]
        .iter()
        .enumerate()
        .filter_map(|(j, c)| match c {
            Comparison::Better => Some(format!("{}(+)", j + 1)),
            Comparison::Worse => Some(format!("{}(-)", j + 1)),
            Comparison::Indistinguishable => None,
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Mean and sample (n − 1) standard deviation; one value has std 0.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Some((mean, (ss / (n - 1.0)).sqrt()))
}
