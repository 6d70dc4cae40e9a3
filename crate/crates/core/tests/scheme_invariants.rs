mod common;

use common::{random_mask, random_matroid, random_prior, rng};
use num_rational::BigRational;
use num_traits::Zero;
use ocrs_core::oracle::exact_selection;
use ocrs_core::{
    greedy_ordered, secretary_wrap, Matroid, Permutation, Scheme, SecretaryAlg, SubsetMask,
};
use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::Rng;

fn random_scheme<R: Rng>(n: usize, r: &mut R) -> Scheme {
    let order = Permutation::random(n, r);
    match r.gen_range(0..5) {
        0 => Scheme::GreedyOrdered { order },
        1 => Scheme::IndependentSubsample {
            order,
            rho: r.gen::<f64>(),
        },
        2 => Scheme::SentinelPrefix { order },
        3 => Scheme::PermutationMixture {
            components: vec![(order, 0.3), (Permutation::random(n, r), 0.7)],
        },
        _ => Scheme::WeightMixture {
            secretary: if r.gen_bool(0.5) {
                SecretaryAlg::GreedyByWeight
            } else {
                SecretaryAlg::Classic1Uniform
            },
            components: vec![
                ((0..n).map(|_| r.gen::<f64>()).collect(), 0.5),
                (vec![0.0; n], 0.5),
            ],
        },
    }
}

fn decisions(
    scheme: &Scheme,
    m: &Matroid,
    draw: ocrs_core::scheme::SchemeDraw,
    active: &SubsetMask,
) -> Vec<(usize, bool)> {
    let mut session = scheme.start_with(m, draw);
    let mut out = Vec::new();
    while let Some(e) = session.next_element() {
        out.push((e, session.decide(active.contains(e))));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn outputs_are_feasible(seed in 0u64..u64::MAX, n in 1usize..=9) {
        let mut r = rng(seed);
        let m = random_matroid(n, &mut r);
        let scheme = random_scheme(n, &mut r);
        for _ in 0..20 {
            let a = random_mask(n, &mut r);
            let out = scheme.run(&m, &a, &mut r);
            prop_assert!(out.is_subset(&a));
            prop_assert!(m.is_independent(&out).unwrap());
        }
    }

    #[test]
    fn decisions_ignore_future_activity(seed in 0u64..u64::MAX, n in 1usize..=8) {
        let mut r = rng(seed);
        let m = random_matroid(n, &mut r);
        let scheme = random_scheme(n, &mut r);
        let draw = scheme.draw(n, &mut r);
        let a = random_mask(n, &mut r);
        let full = decisions(&scheme, &m, draw.clone(), &a);
        prop_assert_eq!(full.len(), n);
        for t in 0..n {
            let seen: Vec<usize> = full[..=t].iter().map(|d| d.0).collect();
            let mut other = random_mask(n, &mut r);
            for &e in &seen {
                if a.contains(e) { other.insert(e) } else { other.remove(e) }
            }
            let replay = decisions(&scheme, &m, draw.clone(), &other);
            prop_assert_eq!(&replay[..=t], &full[..=t]);
        }
    }

    #[test]
    fn greedy_by_weight_attains_weighted_rank(seed in 0u64..u64::MAX, n in 1usize..=10) {
        let mut r = rng(seed);
        let m = random_matroid(n, &mut r);
        let w: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(0u8..6))).collect();
        let a = random_mask(n, &mut r);
        let out = secretary_wrap(SecretaryAlg::GreedyByWeight, &w, &m, &a, None).unwrap();
        let got: f64 = out.iter().map(|i| w[i]).sum();
        prop_assert_eq!(got, m.weighted_rank(&w, &a).unwrap());
    }
}

#[test]
fn weight_order_dominates_every_order_in_expectation() {
    let mut r = rng(5);
    for _ in 0..30 {
        let n = r.gen_range(1..=6);
        let m = random_matroid(n, &mut r);
        let prior = random_prior(n, &mut r);
        let support = prior.support().unwrap();
        let w: Vec<i64> = (0..n).map(|_| r.gen_range(0..10)).collect();
        let wf: Vec<f64> = w.iter().map(|&v| v as f64).collect();
        let value = |order: Permutation| -> BigRational {
            let sel = exact_selection(&m, &Scheme::GreedyOrdered { order }, &support).unwrap();
            sel.iter()
                .zip(&w)
                .fold(BigRational::zero(), |acc, (s, &wi)| {
                    acc + s * BigRational::from_integer(wi.into())
                })
        };
        let best = value(Permutation::by_weight(&wf));
        for pi in Permutation::all(n) {
            assert!(value(pi) <= best);
        }
    }
}

#[test]
fn greedy_ordered_matches_scheme_run() {
    let mut r = rng(9);
    for _ in 0..100 {
        let n = r.gen_range(1..=8);
        let m = random_matroid(n, &mut r);
        let order = Permutation::random(n, &mut r);
        let a = random_mask(n, &mut r);
        let scheme = Scheme::GreedyOrdered {
            order: order.clone(),
        };
        assert_eq!(scheme.run(&m, &a, &mut r), greedy_ordered(&m, &order, &a));
    }
}
