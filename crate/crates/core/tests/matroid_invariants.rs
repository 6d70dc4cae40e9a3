mod common;

use common::{random_graphic, random_mask, random_matroid, rng};
use ocrs_core::oracle::{bases, bruteforce_weighted_rank};
use ocrs_core::{Matroid, SubsetMask};
use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn greedy_weighted_rank_is_optimal(seed in 0u64..u64::MAX, n in 1usize..=10) {
        let mut r = rng(seed);
        let m = random_matroid(n, &mut r);
        let w: Vec<f64> = (0..n)
            .map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen::<f64>() })
            .collect();
        let s = random_mask(n, &mut r);
        let greedy = m.weighted_rank(&w, &s).unwrap();
        let brute = bruteforce_weighted_rank(&m, &w, &s).unwrap();
        prop_assert!((greedy - brute).abs() <= 1e-12, "{greedy} vs {brute}");
    }

    #[test]
    fn random_graphic_matroids_satisfy_axioms(seed in 0u64..u64::MAX, n in 1usize..=9) {
        let m = random_graphic(n, &mut rng(seed));
        prop_assert!(m.verify_axioms().unwrap());
    }

    #[test]
    fn span_agrees_with_every_basis(seed in 0u64..u64::MAX, n in 1usize..=8) {
        let mut r = rng(seed);
        let m = random_matroid(n, &mut r);
        let s = random_mask(n, &mut r);
        let span = m.span(&s).unwrap();
        prop_assert!(s.is_subset(&span));
        for y in bases(&m, &s).unwrap() {
            prop_assert_eq!(y.cardinality(), m.rank(&s).unwrap());
            for i in 0..n {
                let closes = y.contains(i) || !m.is_independent(&y.with(i)).unwrap();
                prop_assert_eq!(span.contains(i), closes);
            }
        }
    }

    #[test]
    fn rank_is_monotone_and_submodular(seed in 0u64..u64::MAX, n in 1usize..=10) {
        let mut r = rng(seed);
        let m = random_matroid(n, &mut r);
        let a = random_mask(n, &mut r);
        let b = random_mask(n, &mut r);
        let rk = |s: &SubsetMask| m.rank(s).unwrap();
        prop_assert!(rk(&a) <= a.cardinality());
        prop_assert!(rk(&a.intersection(&b)) <= rk(&a));
        prop_assert!(rk(&a.union(&b)) + rk(&a.intersection(&b)) <= rk(&a) + rk(&b));
    }

    #[test]
    fn restriction_keeps_rank_inside_ground(seed in 0u64..u64::MAX, n in 1usize..=9) {
        let mut r = rng(seed);
        let m = random_matroid(n, &mut r);
        let ground = random_mask(n, &mut r);
        let sub = m.restrict(&ground).unwrap();
        prop_assert!(sub.verify_axioms().unwrap());
        let s = random_mask(n, &mut r);
        prop_assert_eq!(sub.rank(&s).unwrap(), m.rank(&s.intersection(&ground)).unwrap());
        prop_assert!(sub.span(&s).unwrap().is_subset(&ground));
    }
}

#[test]
fn uniform_matroids_satisfy_axioms() {
    for n in 1..=8 {
        for k in 0..=n {
            assert!(
                Matroid::uniform(n, k).verify_axioms().unwrap(),
                "U({k},{n})"
            );
        }
    }
}

#[test]
fn broken_exchange_is_detected() {
    let n = 3;
    let family = [vec![], vec![0], vec![1], vec![2], vec![0, 1]];
    let m = Matroid::explicit(
        n,
        family
            .iter()
            .map(|s| SubsetMask::from_elements(n, s.iter().copied()).unwrap()),
    )
    .unwrap();
    assert!(!m.verify_axioms().unwrap());
}

#[test]
fn spec_round_trip_preserves_independence() {
    let mut r = rng(11);
    for n in 1..=7 {
        let m = random_matroid(n, &mut r);
        let back = Matroid::from_spec(&m.to_spec()).unwrap();
        for s in SubsetMask::all(n) {
            assert_eq!(
                m.is_independent(&s).unwrap(),
                back.is_independent(&s).unwrap()
            );
        }
    }
}
