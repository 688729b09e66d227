//! Non-dominated sorting and crowding distance for NSGA-II.
//!
//! Sorting uses strict Pareto dominance so that duplicate objective vectors
//! share a front.

use crate::fitness::{strictly_dominates, MOPoint};

/// Partitions `points` into fronts; front 0 holds the non-dominated points.
/// Indices inside each front are ascending.
pub fn fast_non_dominated_sort(points: &[MOPoint]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if strictly_dominates(&points[i], &points[j]) {
                dominates[i].push(j);
                dominated_by[j] += 1;
            } else if strictly_dominates(&points[j], &points[i]) {
                dominates[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Reference classifier: repeatedly peel off the points that no remaining
/// point strictly dominates. Quadratic per front; meant for testing.
pub fn brute_force_fronts(points: &[MOPoint]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                !remaining
                    .iter()
                    .any(|&j| strictly_dominates(&points[j], &points[i]))
            })
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Crowding distance of every point of one front. Boundary points of either
/// objective get `f64::INFINITY`; objectives with zero span contribute 0.
pub fn crowding_distance(front: &[MOPoint]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut dist = vec![0.0; n];
    let objectives: [fn(&MOPoint) -> f64; 2] = [|p| p.g1, |p| p.g2];
    for value in objectives {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| value(&front[a]).total_cmp(&value(&front[b])));
        let lo = value(&front[order[0]]);
        let hi = value(&front[order[n - 1]]);
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            let i = order[k];
            if dist[i].is_finite() {
                dist[i] += (value(&front[order[k + 1]]) - value(&front[order[k - 1]])) / span;
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pts(v: &[(f64, f64)]) -> Vec<MOPoint> {
        v.iter().map(|&(a, b)| MOPoint::new(a, b)).collect()
    }

    #[test]
    fn sort_examples() {
        let p = pts(&[(0.1, 50.0), (0.2, 40.0), (0.3, 60.0)]);
        assert_eq!(fast_non_dominated_sort(&p), vec![vec![0, 2], vec![1]]);
        let p = pts(&[(0.5, 5.0); 4]);
        assert_eq!(fast_non_dominated_sort(&p), vec![vec![0, 1, 2, 3]]);
        assert_eq!(fast_non_dominated_sort(&pts(&[(1.0, 1.0)])), vec![vec![0]]);
        assert!(fast_non_dominated_sort(&[]).is_empty());
    }

    #[test]
    fn crowding_examples() {
        assert!(crowding_distance(&pts(&[(0.0, 1.0), (1.0, 2.0)]))
            .iter()
            .all(|d| d.is_infinite()));
        let d = crowding_distance(&pts(&[(0.0, 0.0), (0.5, 30.0), (1.0, 100.0)]));
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert_abs_diff_eq!(d[1], 2.0, epsilon = 1e-15);
        let d = crowding_distance(&pts(&[(0.3, 7.0); 5]));
        assert_eq!(d.iter().filter(|x| x.is_infinite()).count(), 2);
        assert_eq!(d.iter().filter(|&&x| x == 0.0).count(), 3);
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            raw in proptest::collection::vec((0u8..8, 0u8..8), 0..40)
        ) {
            let p: Vec<MOPoint> = raw.iter()
                .map(|&(a, b)| MOPoint::new(a as f64 / 7.0, b as f64 - 1.0))
                .collect();
            prop_assert_eq!(fast_non_dominated_sort(&p), brute_force_fronts(&p));
        }
    }
}
