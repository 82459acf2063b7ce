//! Randomized invariants of the probability core and channel transforms.

use proptest::prelude::*;
use sicap::prob::{
    conditional_mi, entropy_bits, mutual_information, simplex_grid, simplex_grid_len, Dist,
    JointTable,
};

fn raw_weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(1e-6..1.0f64, len)
}

fn joint_table(axes: Vec<usize>) -> impl Strategy<Value = JointTable> {
    let total: usize = axes.iter().product();
    raw_weights(total).prop_map(move |raw| {
        let sum: f64 = raw.iter().sum();
        JointTable::new(axes.clone(), raw.into_iter().map(|w| w / sum).collect())
            .expect("normalized table")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mutual_information_is_bounded_by_marginal_entropies(
        j in prop_oneof![joint_table(vec![2, 3]), joint_table(vec![3, 3]), joint_table(vec![4, 2])]
    ) {
        let i = mutual_information(&j).unwrap();
        let ha = entropy_bits(j.marginal(&[0]).unwrap().mass());
        let hb = entropy_bits(j.marginal(&[1]).unwrap().mass());
        prop_assert!(i >= 0.0);
        prop_assert!(i <= ha.min(hb) + 1e-9);
    }

    #[test]
    fn chain_rule_holds(j in joint_table(vec![2, 3, 2])) {
        let lhs = mutual_information(&j.regroup(&[&[0], &[1, 2]]).unwrap()).unwrap();
        let rhs = mutual_information(&j.regroup(&[&[0], &[2]]).unwrap()).unwrap()
            + conditional_mi(&j).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn entropy_is_concave(
        p in raw_weights(5),
        q in raw_weights(5),
        lambda in 0.0..1.0f64
    ) {
        let p = Dist::normalized(p).unwrap();
        let q = Dist::normalized(q).unwrap();
        let mix: Vec<f64> = p
            .weights()
            .iter()
            .zip(q.weights())
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        let h_mix = entropy_bits(&mix);
        prop_assert!(h_mix >= lambda * p.entropy() + (1.0 - lambda) * q.entropy() - 1e-9);
    }

    #[test]
    fn simplex_grid_count_matches_binomial(dim in 1usize..=4, k in 1usize..=12) {
        let grid = simplex_grid(dim, k).unwrap();
        prop_assert_eq!(grid.len() as u128, simplex_grid_len(dim, k).unwrap());
        // no duplicates: integerized coordinates are unique
        let mut keys: Vec<Vec<u64>> = grid
            .iter()
            .map(|d| d.weights().iter().map(|w| (w * k as f64).round() as u64).collect())
            .collect();
        keys.sort();
        let before = keys.len();
        keys.dedup();
        prop_assert_eq!(before, keys.len());
    }

    #[test]
    fn strategy_transform_rows_are_distributions(seed in 0u64..500) {
        let c = sicap::generators::random_state_channel(2, 3, 2, 2, 2, seed);
        let t = sicap::channel::strategy_transform(&c, 4096).unwrap();
        for i in 0..t.dmc.n_in {
            let sum: f64 = t.dmc.row(i).iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn block_expansion_keeps_marginals(seed in 0u64..200) {
        let c = sicap::generators::random_state_channel(2, 2, 2, 2, 1, seed);
        let e = sicap::channel::block_static_expand(&c, 2, 4096).unwrap();
        prop_assert_eq!(e.state_law.mass(), c.state_law.mass());
        // expanded rows remain distributions
        for x in 0..e.nx {
            for s in 0..e.ns {
                let sum: f64 = e.transition_row(x, s).iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }
}
