use fairrisk_core::audit::audit_with_tolerance;
use fairrisk_core::integral::{assignment_from_partition, enumerate_partitions};
use fairrisk_core::reduction::{
    certify_by_interval, check_reduction_equation, decode_partition, encode_solution,
    reduce_subset_sum, search_reduction, sum_of_squares_identity, SubsetSumInstance,
};
use fairrisk_core::scalar::ratio;
use fairrisk_core::Rational;
use proptest::prelude::*;

/// Reachable sums by dynamic programming.
fn subset_sum_oracle(weights: &[u64], target: u64) -> bool {
    let mut reachable = vec![false; target as usize + 1];
    reachable[0] = true;
    for &w in weights {
        for s in (w as usize..=target as usize).rev() {
            reachable[s] |= reachable[s - w as usize];
        }
    }
    reachable[target as usize]
}

fn subset_sum_strategy() -> impl Strategy<Value = SubsetSumInstance> {
    (1u64..=50)
        .prop_flat_map(|t| (prop::collection::vec(1u64..=t, 1..=4), Just(t)))
        .prop_map(|(w, t)| SubsetSumInstance::new(w, t).unwrap())
}

proptest! {
    #[test]
    fn sum_of_squares_sides_agree(z in prop::collection::vec((-50i64..50, 1i64..12), 1..8)) {
        let z: Vec<Rational> = z.into_iter().map(|(n, d)| ratio(n, d)).collect();
        let (lhs, rhs) = sum_of_squares_identity(&z).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn encoded_solutions_round_trip(ss in subset_sum_strategy()) {
        let ri = match reduce_subset_sum(&ss) {
            Ok(ri) => ri,
            Err(_) => return Ok(()),
        };
        let kept = ri.kept_weights();
        for mask in 0u32..1 << ri.m {
            let subset: Vec<usize> = (0..ri.m).filter(|i| mask >> i & 1 == 1).collect();
            let q = encode_solution(&ri, &subset).unwrap();
            prop_assert_eq!(decode_partition(&ri, &q).unwrap(), subset.clone());
            let sum: u64 = subset.iter().map(|&i| kept[i]).sum();
            prop_assert_eq!(check_reduction_equation(&ri, &q).unwrap(), sum == ss.target);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn passing_partition_exists_iff_solvable(ss in subset_sum_strategy()) {
        let solvable = subset_sum_oracle(&ss.weights, ss.target);
        match reduce_subset_sum(&ss) {
            Ok(ri) => {
                let search = search_reduction(&ri, None).unwrap();
                prop_assert!(search.exhausted);
                prop_assert_eq!(!search.passing.is_empty(), solvable);
                let kept = ri.kept_weights();
                for q in &search.passing {
                    let s = decode_partition(&ri, q).unwrap();
                    prop_assert_eq!(s.iter().map(|&i| kept[i]).sum::<u64>(), ss.target);
                    prop_assert_eq!(certify_by_interval(&ri, q, 128).unwrap(), Some(true));
                }
            }
            // only a lone item below the target cannot be reduced
            Err(_) => prop_assert!(!solvable),
        }
    }
}

#[test]
fn interval_route_agrees_with_symbolic_check() {
    let ri = reduce_subset_sum(&SubsetSumInstance::new(vec![3, 5, 7], 12).unwrap()).unwrap();
    for q in enumerate_partitions(2 * ri.m, None).unwrap() {
        let exact = check_reduction_equation(&ri, &q).unwrap();
        if let Some(decided) = certify_by_interval(&ri, &q, 128).unwrap() {
            assert_eq!(decided, exact, "{q}");
        }
    }
}

#[test]
fn last_two_features_are_split_in_fair_assignments() {
    for (w, t) in [(vec![1, 2], 3), (vec![2, 3, 4], 7), (vec![1, 1, 2], 2)] {
        let ri = reduce_subset_sum(&SubsetSumInstance::new(w, t).unwrap()).unwrap();
        let k = ri.feature_count();
        let mut fair_nontrivial = 0;
        for q in enumerate_partitions(k, None).unwrap() {
            let asg = assignment_from_partition(&ri.instance, &q).unwrap();
            if !asg.is_nontrivial(&ri.instance, 1e-9) {
                continue;
            }
            if audit_with_tolerance(&ri.instance, &asg, 1e-9).unwrap().fair {
                fair_nontrivial += 1;
                assert_ne!(q.block_of(k - 2), q.block_of(k - 1), "{q}");
            }
        }
        assert!(fair_nontrivial > 0);
    }
}
