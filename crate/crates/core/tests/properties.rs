use proptest::prelude::*;

use polyfix::classify::{
    banach_coefficient, kannan_perimetric_coefficient_with, perimetric_coefficient,
    perimetric_coefficient_with, total_distance_coefficient, Evaluation, Options, Semantics,
};
use polyfix::dynamics::{least_periods, orbit, periodic_points};
use polyfix::metric::{validate_metric, FiniteMetricSpace, SelfMap};
use polyfix::oracle::{random_permutation, random_space, DistanceModel};
use polyfix::picard::{picard_iterate, BoundCoefficients, MapRegistry, StopRule};
use polyfix::rational::Rational;

fn instance() -> impl Strategy<Value = (FiniteMetricSpace, SelfMap)> {
    (3usize..=7, any::<u64>(), prop::bool::ANY).prop_flat_map(|(n, seed, grid)| {
        let model = if grid {
            DistanceModel::Grid { dim: 2, side: 5 }
        } else {
            DistanceModel::Closure { max_weight: 12 }
        };
        let space = random_space(seed, n, model).unwrap();
        prop::collection::vec(0..n, n)
            .prop_map(move |image| (space.clone(), SelfMap::new(image).unwrap()))
    })
}

fn instance_with_k() -> impl Strategy<Value = (FiniteMetricSpace, SelfMap, usize)> {
    instance().prop_flat_map(|(s, m)| {
        let n = s.len();
        (Just(s), Just(m), 3..=n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_spaces_are_metrics((s, _) in instance()) {
        prop_assert!(validate_metric(s.matrix()).unwrap().is_valid());
    }

    #[test]
    fn perimeter_bounds((s, _, k) in instance_with_k(), seed in any::<u64>()) {
        let tuple = random_permutation(seed, s.len())[..k].to_vec();
        let p = s.perimeter(&tuple).unwrap();
        let total = s.total_pairwise(&tuple).unwrap();
        prop_assert!(p.is_positive());
        prop_assert!(p <= Rational::from_integer(2) * total.clone());
        if k == 3 {
            prop_assert_eq!(p, total);
        }
    }

    #[test]
    fn total_pairwise_never_exceeds_perimetric((s, m, k) in instance_with_k()) {
        let tp = total_distance_coefficient(&s, &m, k).unwrap().coefficient;
        let p = perimetric_coefficient(&s, &m, k).unwrap().coefficient;
        prop_assert!(tp.cmp_extended(&p).is_le(), "{} > {}", tp, p);
    }

    #[test]
    fn total_pairwise_is_monotone_in_point_count((s, m) in instance()) {
        let n = s.len();
        let coeffs: Vec<_> = (2..=n)
            .map(|j| total_distance_coefficient(&s, &m, j).unwrap().coefficient)
            .collect();
        for w in coeffs.windows(2) {
            prop_assert!(w[1].cmp_extended(&w[0]).is_le(), "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn banach_members_have_no_nontrivial_cycles((s, m) in instance()) {
        if banach_coefficient(&s, &m).unwrap().member {
            prop_assert!(least_periods(&m).iter().flatten().all(|&p| p == 1));
        }
    }

    #[test]
    fn parallel_and_sequential_agree((s, m, k) in instance_with_k()) {
        for semantics in [Semantics::Strict, Semantics::ListedOrder] {
            let seq = Options { semantics, evaluation: Evaluation::Sequential };
            let par = Options { semantics, evaluation: Evaluation::Parallel };
            prop_assert_eq!(
                perimetric_coefficient_with(&s, &m, k, &seq).unwrap(),
                perimetric_coefficient_with(&s, &m, k, &par).unwrap()
            );
            prop_assert_eq!(
                kannan_perimetric_coefficient_with(&s, &m, k, &seq).unwrap(),
                kannan_perimetric_coefficient_with(&s, &m, k, &par).unwrap()
            );
        }
    }

    #[test]
    fn scaling_leaves_coefficients_and_witnesses((s, m, k) in instance_with_k(), p in 1i64..50, q in 1i64..50) {
        let scaled = s.scaled_by(&Rational::new(p, q)).unwrap();
        let a = perimetric_coefficient(&s, &m, k).unwrap();
        let b = perimetric_coefficient(&scaled, &m, k).unwrap();
        prop_assert_eq!(a.coefficient, b.coefficient);
        prop_assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn periodic_classes_partition_cycle_points((_, m) in instance()) {
        let n = m.len();
        let on_cycles: std::collections::BTreeSet<usize> =
            (0..n).flat_map(|x| orbit(&m, x).unwrap().cycle).collect();
        let total: usize = (1..=n).map(|p| periodic_points(&m, p).unwrap().len()).sum();
        prop_assert_eq!(total, on_cycles.len());
    }

    #[test]
    fn linear_picard_respects_bound(a in 0.0f64..0.95, x0 in -100.0f64..100.0, k in 3usize..6) {
        let params = [("a".to_string(), a)].into_iter().collect();
        let o = MapRegistry::builtin().oracle("linear", &params).unwrap();
        let t = picard_iterate(&o, &[x0], k, StopRule::default(), BoundCoefficients::default()).unwrap();
        prop_assert!(t.converged);
        prop_assert!(t.bound_violations().is_empty());
    }
}
