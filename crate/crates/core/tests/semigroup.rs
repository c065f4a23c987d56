mod common;

use common::*;
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use splice_core::diagram::RootedShape;
use splice_core::random;
use splice_core::semigroup::{
    ci_presentation, combine, monomial_basis_upto, monomial_value, mu_rooted, normal_form, rooted_generators,
    satisfies_rooted_condition, semigroup_condition, sg_of_rooted_tree,
};
use splice_core::{Monomial, NumericSemigroup, RootedWeightedTree};

fn leaf() -> RootedShape {
    RootedShape::leaf()
}

#[test]
fn delta_a_rooted_at_lower_left_leaf() {
    let a = sdf(DELTA_A);
    let t = a.root_at_leaf(2).unwrap();
    let s = sg_of_rooted_tree(&t).unwrap();
    assert_eq!(s.minimal_generators(), vec![4, 7, 10]);
    assert_eq!(mu_rooted(&t), big(14));
    assert_eq!(s.conductor(), 14);
    assert_eq!(brute_conductor_delta(&[4, 7, 10]), (14, 7));
}

#[test]
fn delta_b_fails_at_left_node() {
    let b = sdf(DELTA_B);
    let r = semigroup_condition(&b).unwrap();
    let bad = r.first_failure().unwrap();
    assert_eq!(bad.weight, big(1));
    let mut gens = bad.generators.clone();
    gens.sort();
    assert_eq!(gens, vec![big(2), big(3)]);
    assert!(semigroup_condition(&sdf(DELTA_A)).unwrap().holds());
    assert!(semigroup_condition(&sdf(DELTA_D)).unwrap().holds());
}

#[test]
fn small_semigroups() {
    let s = NumericSemigroup::new(&[3, 5]).unwrap();
    assert_eq!(s.gaps(), vec![1, 2, 4, 7]);
    assert_eq!((s.conductor(), s.delta()), (8, 4));
    assert!(s.is_symmetric());
    let t = NumericSemigroup::new(&[3, 4, 5]).unwrap();
    assert_eq!((t.conductor(), t.delta()), (3, 2));
    assert!(!t.is_symmetric());
    assert!(NumericSemigroup::new(&[4, 6]).is_err());
}

#[test]
fn brieskorn_conductor_formula() {
    // node semigroup ⟨P/p, P/q, P/r⟩ has conductor P(2 − Σ1/p_i) + 1
    let mut checked = 0;
    for p in 2..=40u64 {
        for q in p + 1..=60 {
            if p.gcd(&q) != 1 {
                continue;
            }
            for r in q + 1..=2000 {
                let big_p = p * q * r;
                if big_p > 10_000 {
                    break;
                }
                if r.gcd(&p) != 1 || r.gcd(&q) != 1 {
                    continue;
                }
                let formula = 2 * big_p + 1 - (q * r + p * r + p * q);
                assert_eq!(brute_conductor_delta(&[q * r, p * r, p * q]).0, formula, "({p},{q},{r})");
                // rooted at the r leaf the star gives ⟨p, q⟩
                let t = RootedWeightedTree::from_branches(&[(p, leaf()), (q, leaf())]).unwrap();
                let gens: Vec<u64> = rooted_generators(&t).iter().map(|g| u64::try_from(g).unwrap()).collect();
                let (c, _) = brute_conductor_delta(&gens);
                assert_eq!(c, (p - 1) * (q - 1));
                assert_eq!(BigInt::from(c), mu_rooted(&t));
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn brieskorn_presentation_is_diagonal() {
    let t = RootedWeightedTree::from_branches(&[(2, leaf()), (3, leaf()), (7, leaf())]).unwrap();
    let pres = ci_presentation(&t).unwrap();
    assert_eq!(pres.deficiency(), 1);
    assert!(pres.relations_hold());
    let nf = normal_form(&t, &Monomial(vec![2, 0, 0])).unwrap();
    assert_eq!(monomial_value(&t, &nf), monomial_value(&t, &Monomial(vec![2, 0, 0])));
}

#[test]
fn gluing_lemma_on_small_inputs() {
    let parts = [NumericSemigroup::new(&[2, 3]).unwrap(), NumericSemigroup::new(&[2, 5]).unwrap()];
    let (gamma, report) = combine(&parts, &[7, 11]).unwrap();
    assert!(report.all_p_in_gamma);
    assert!(report.all_hold(), "{report:?}");
    assert_eq!(report.conductor_lhs, report.conductor_rhs);
    assert!(gamma.is_symmetric());

    let parts = [NumericSemigroup::new(&[2, 3]).unwrap(), NumericSemigroup::new(&[2, 3]).unwrap()];
    let (_, report) = combine(&parts, &[1, 37]).unwrap();
    assert!(!report.all_p_in_gamma);
    assert!(report.all_hold(), "{report:?}");
    assert!(report.conductor_lhs < report.conductor_rhs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn apery_matches_sieve(seed in any::<u64>()) {
        let gens = random::generator_set(&mut rng(seed), 5, 60);
        let s = NumericSemigroup::new(&gens).unwrap();
        let (c, delta) = brute_conductor_delta(&gens);
        prop_assert_eq!(s.conductor(), c);
        prop_assert_eq!(s.delta(), delta);
        let table = member_table(&gens, c as usize + 10);
        for (x, &m) in table.iter().enumerate() {
            prop_assert_eq!(s.contains(x as u64), m);
        }
    }

    #[test]
    fn coprime_pairs_match_sylvester(a in 2u64..60, b in 2u64..60) {
        prop_assume!(a.gcd(&b) == 1);
        let s = NumericSemigroup::new(&[a, b]).unwrap();
        prop_assert_eq!(s.conductor(), (a - 1) * (b - 1));
        prop_assert_eq!(brute_conductor_delta(&[a, b]).0, (a - 1) * (b - 1));
        prop_assert!(s.is_symmetric());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rooted_dichotomy(seed in any::<u64>()) {
        let t = random::rooted_tree(&mut rng(seed), 4, 12);
        let s = sg_of_rooted_tree(&t).unwrap();
        let gens: Vec<u64> = rooted_generators(&t).iter().map(|g| u64::try_from(g).unwrap()).collect();
        let (c, delta) = brute_conductor_delta(&gens);
        prop_assert_eq!((s.conductor(), s.delta()), (c, delta));
        let condition = satisfies_rooted_condition(&t).unwrap();
        let mu = mu_rooted(&t);
        prop_assert_eq!(BigInt::from(2 * delta) == mu, condition);
        if condition {
            prop_assert!(s.is_symmetric());
            prop_assert_eq!(BigInt::from(c), mu);
            let pres = ci_presentation(&t).unwrap();
            prop_assert_eq!(pres.deficiency(), 1);
            prop_assert!(pres.relations_hold());
        } else {
            prop_assert!(ci_presentation(&t).is_err());
        }
    }

    #[test]
    fn normal_forms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random::rooted_tree(&mut r, 3, 12);
        prop_assume!(satisfies_rooted_condition(&t).unwrap());
        let n = t.leaves().len();
        for _ in 0..10 {
            let m = Monomial((0..n).map(|_| rand::Rng::gen_range(&mut r, 0..4u64)).collect());
            let nf = normal_form(&t, &m).unwrap();
            prop_assert_eq!(monomial_value(&t, &nf), monomial_value(&t, &m));
            prop_assert_eq!(normal_form(&t, &nf).unwrap(), nf);
        }
    }

    #[test]
    fn monomial_basis_is_bijective(seed in any::<u64>()) {
        let t = random::rooted_tree(&mut rng(seed), 3, 12);
        prop_assume!(satisfies_rooted_condition(&t).unwrap());
        let s = sg_of_rooted_tree(&t).unwrap();
        let bound = s.conductor() + 20;
        let basis = monomial_basis_upto(&t, bound).unwrap();
        let values: Vec<u64> = basis.iter().map(|(g, _)| *g).collect();
        let expected: Vec<u64> = (0..=bound).filter(|&g| s.contains(g)).collect();
        prop_assert_eq!(values, expected);
        for (g, m) in &basis {
            prop_assert_eq!(monomial_value(&t, m), BigInt::from(*g));
        }
    }

    #[test]
    fn gluing_lemma(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = rand::Rng::gen_range(&mut r, 2..=3usize);
        let parts: Vec<NumericSemigroup> =
            (0..k).map(|_| NumericSemigroup::new(&random::generator_set(&mut r, 3, 9)).unwrap()).collect();
        let ps: Vec<u64> = loop {
            let ps: Vec<u64> = (0..k).map(|_| rand::Rng::gen_range(&mut r, 1..=13u64)).collect();
            if (0..k).all(|i| (i + 1..k).all(|j| ps[i].gcd(&ps[j]) == 1)) {
                break ps;
            }
        };
        let (_, report) = combine(&parts, &ps).unwrap();
        prop_assert!(report.all_hold(), "{:?}", report);
        if report.all_p_in_gamma {
            prop_assert_eq!(&report.conductor_lhs, &report.conductor_rhs);
        }
    }
}
