//! Soundness, Monte Carlo consistency and monotonicity of the tail bounds.

use cckp::chance::{
    chebyshev_bound, chernoff_bound, exact_violation, monte_carlo_violation, EXACT_MAX_ITEMS,
};
use cckp::instances::{generate, Family, GeneratorConfig, Instance};
use cckp::{Bound, ChanceSpec, Selection};
use proptest::prelude::*;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_subset<R: Rng>(inst: &Instance, size: usize, rng: &mut R) -> Selection {
    let mut bits = vec![false; inst.len()];
    for i in index::sample(rng, inst.len(), size) {
        bits[i] = true;
    }
    Selection::from_bits(inst, bits).unwrap()
}

#[test]
fn exact_never_exceeds_surrogates() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (family, seed) in [
        (Family::Uncorrelated, 1),
        (Family::BoundedStronglyCorrelated, 2),
    ] {
        let inst = generate(family, &GeneratorConfig::new(100, 1000, 0.25, seed)).unwrap();
        for delta in [1.0, 25.0, 50.0] {
            let spec = ChanceSpec::new(delta, 0.1, Bound::Exact).unwrap();
            let mut checked = 0;
            while checked < 1000 {
                let size = rng.random_range(0..=EXACT_MAX_ITEMS);
                let sel = random_subset(&inst, size, &mut rng);
                if sel.expected_weight() >= inst.capacity() {
                    continue;
                }
                let exact = exact_violation(&sel, &inst, &spec).unwrap();
                let cheb = chebyshev_bound(&sel, &inst, &spec).unwrap();
                let chern = chernoff_bound(&sel, &inst, &spec).unwrap();
                assert!(exact <= cheb + 1e-12, "{exact} > chebyshev {cheb}");
                assert!(exact <= chern + 1e-12, "{exact} > chernoff {chern}");
                checked += 1;
            }
        }
    }
}

#[test]
fn monte_carlo_agrees_with_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let delta = 10.0;
    let mut within = 0;
    let trials = 1000;
    for t in 0..trials {
        let s = rng.random_range(1..=12usize);
        let weights: Vec<f64> = (0..s).map(|_| rng.random_range(20..=100) as f64).collect();
        let total: f64 = weights.iter().sum();
        // Capacity within two standard deviations of E_W (Var ΣU_i = s/3),
        // so the tail is not so small that 10⁵ samples see no violation.
        let spread = (2.0 * (s as f64 / 3.0).sqrt()).min(0.9 * s as f64);
        let z = rng.random_range(-spread..spread);
        let inst = Instance::new(
            vec![1.0; s],
            weights,
            total + delta * z,
            Family::Custom,
            "mc",
        )
        .unwrap();
        let sel = Selection::from_bits(&inst, vec![true; s]).unwrap();
        let spec = ChanceSpec::new(delta, 0.1, Bound::Exact).unwrap();
        let exact = exact_violation(&sel, &inst, &spec).unwrap();
        let mc = monte_carlo_violation(&sel, &inst, &spec, 100_000, t).unwrap();
        if (mc.estimate - exact).abs() <= 3.0 * mc.std_error {
            within += 1;
        }
    }
    assert!(within >= 990, "{within}/{trials} within 3 standard errors");
}

fn instance_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (1usize..400).prop_flat_map(|n| {
        (
            proptest::collection::vec(1u32..1000, n)
                .prop_map(|v| v.into_iter().map(f64::from).collect()),
            proptest::collection::vec(any::<bool>(), n),
        )
    })
}

proptest! {
    #[test]
    fn surrogates_are_monotone_in_capacity(
        (weights, bits) in instance_strategy(),
        delta in 0.5f64..100.0,
        steps in proptest::collection::vec(0.01f64..50.0, 1..20),
    ) {
        let n = weights.len();
        let expected: f64 = weights.iter().zip(&bits).filter(|(_, &b)| b).map(|(w, _)| w).sum();
        let mut capacity = expected + 0.001;
        let mut prev: Option<(f64, f64)> = None;
        for step in steps {
            let inst = Instance::new(vec![1.0; n], weights.clone(), capacity, Family::Custom, "p").unwrap();
            let sel = Selection::from_bits(&inst, bits.clone()).unwrap();
            let spec = ChanceSpec::new(delta, 0.1, Bound::Chernoff).unwrap();
            let cheb = chebyshev_bound(&sel, &inst, &spec).unwrap();
            let chern = chernoff_bound(&sel, &inst, &spec).unwrap();
            prop_assert!((0.0..=1.0).contains(&cheb) && (0.0..=1.0).contains(&chern));
            if let Some((pc, pn)) = prev {
                prop_assert!(cheb <= pc + 1e-15 && chern <= pn + 1e-15);
            }
            prev = Some((cheb, chern));
            capacity += step * delta;
        }
    }
}
