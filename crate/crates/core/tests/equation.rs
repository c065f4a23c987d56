mod common;

use common::*;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use splice_core::equation::{
    chain_conductors, chain_diagram, chain_semigroup_generators, check_generic, cover_diagram, monomial_curve_system,
    plane_curve, splice_system, weight_check, CharPairs,
};
use splice_core::random;
use splice_core::semigroup::{mu_rooted, rooted_generators, satisfies_rooted_condition, semigroup_condition};
use splice_core::{NumericSemigroup, SpliceDiagram};

fn dot(exps: &[u64], weights: &[BigInt]) -> BigInt {
    exps.iter().zip(weights).map(|(&a, w)| BigInt::from(a) * w).sum()
}

/// All `r × r` minors of an integral `r × (r + 2)` matrix, by cofactors.
fn all_minors_nonzero(m: &[Vec<BigInt>]) -> bool {
    let r = m.len();
    let cols = r + 2;
    (0..1u32 << cols).filter(|mask| mask.count_ones() as usize == r).all(|mask| {
        let sub: Vec<Vec<BigInt>> = m
            .iter()
            .map(|row| (0..cols).filter(|j| mask >> j & 1 == 1).map(|j| row[j].clone()).collect())
            .collect();
        !cofactor_det(&sub).is_zero()
    })
}

/// Every property a splice-type system must have, recomputed from the
/// linking-number definition.
fn check_system(d: &SpliceDiagram) -> Result<(), TestCaseError> {
    let sys = splice_system(d).unwrap();
    prop_assert!(weight_check(&sys, d).unwrap().ok());
    let expected: usize = d.nodes().iter().map(|&v| d.valency(v) - 2).sum();
    prop_assert_eq!(sys.equations.len(), expected);

    for (v, matrix) in &sys.coefficient_matrices {
        prop_assert!(check_generic(matrix).unwrap());
        let ints: Vec<Vec<BigInt>> = matrix.iter().map(|row| row.iter().map(|c| c.to_integer()).collect()).collect();
        prop_assert!(all_minors_nonzero(&ints), "node {}", v);
    }

    for eq in &sys.equations {
        let v = eq.node.unwrap();
        let lv: Vec<BigInt> = sys.leaves.iter().map(|&w| linking_oracle(d, v, w, false)).collect();
        let lvp: Vec<BigInt> = sys.leaves.iter().map(|&w| linking_oracle(d, v, w, true)).collect();
        let mut used_edges = Vec::new();
        for t in &eq.terms {
            prop_assert_eq!(dot(&t.exps, &lv), d.weight_product(v));
            // admissible: supported beyond one edge, ℓ'-weight equal to d_ve
            let support: Vec<usize> = (0..t.exps.len()).filter(|&i| t.exps[i] > 0).map(|i| sys.leaves[i]).collect();
            let e = *d
                .incident(v)
                .iter()
                .find(|&&e| support.iter().all(|w| d.leaves_beyond(v, e).contains(w)))
                .expect("monomial beyond a single edge");
            prop_assert_eq!(&dot(&t.exps, &lvp), d.weight(v, e).unwrap());
            used_edges.push(e);
        }
        used_edges.sort();
        used_edges.dedup();
        prop_assert_eq!(used_edges.len(), eq.terms.len());

        for u in d.nodes() {
            if u == v {
                continue;
            }
            let lu: Vec<BigInt> = sys.leaves.iter().map(|&w| linking_oracle(d, u, w, false)).collect();
            let least = eq.terms.iter().map(|t| dot(&t.exps, &lu)).min().unwrap();
            prop_assert_eq!(least, linking_oracle(d, u, v, false));
        }
    }
    Ok(())
}

#[test]
fn fixture_systems() {
    for (name, d) in fixtures() {
        if name == "B" {
            assert!(splice_system(&d).is_err());
            continue;
        }
        check_system(&d).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn brieskorn_four_variables() {
    let d = sdf("(2 *, 3 *, 5 *, 7 *)");
    let sys = splice_system(&d).unwrap();
    assert_eq!(sys.equations.len(), 2);
    check_system(&d).unwrap();
}

#[test]
fn first_pair_gives_brieskorn_polynomial() {
    for (p, q) in [(3, 2), (5, 2), (7, 3), (2, 9)] {
        let f = plane_curve(&CharPairs::new(vec![(p, q)], None).unwrap(), None).unwrap();
        assert_eq!(f.to_string(), format!("x^{p} + y^{q}"));
        assert_eq!(f.y_degree(), q);
    }
}

#[test]
fn two_pair_curve() {
    let cp = CharPairs::new(vec![(3, 2), (13, 2)], None).unwrap();
    assert_eq!(plane_curve(&cp, None).unwrap().to_string(), "x^6 + 2*x^3*y^2 + x^2*y^3 + y^4");
    assert_eq!(chain_conductors(&cp), vec![big(2), big(16)]);
    let gens: Vec<u64> = chain_semigroup_generators(&cp, 2).iter().map(|g| u64::try_from(g).unwrap()).collect();
    assert_eq!(gens, vec![4, 6, 13]);
    assert_eq!(brute_conductor_delta(&gens), (16, 8));
}

#[test]
fn cover_of_two_pair_curve() {
    let cp = CharPairs::new(vec![(3, 2), (13, 2)], Some(5)).unwrap();
    let d = cover_diagram(&cp).unwrap();
    assert!(d.validate(true).is_valid(), "{}", d.validate(true));
    assert!(semigroup_condition(&d).unwrap().holds());
    check_system(&d).unwrap();
}

#[test]
fn cover_of_cusp_is_e8() {
    let cp = CharPairs::new(vec![(3, 2)], Some(5)).unwrap();
    assert!(cover_diagram(&cp).unwrap().is_isomorphic(&sdf(DELTA_C)));
    assert!(CharPairs::new(vec![(3, 2)], Some(6)).is_err());
    assert!(CharPairs::new(vec![(3, 2), (11, 2)], None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn random_systems(seed in any::<u64>()) {
        let d = random::line_diagram_with_condition(&mut rng(seed), 3, 11, 1_000_000);
        check_system(&d)?;
    }

    #[test]
    fn random_star_systems(seed in any::<u64>()) {
        let d = random::diagram_with_nodes(&mut rng(seed), 1, 13);
        check_system(&d)?;
    }

    #[test]
    fn monomial_curves_vanish(seed in any::<u64>()) {
        let t = random::rooted_tree(&mut rng(seed), 4, 12);
        prop_assume!(satisfies_rooted_condition(&t).unwrap());
        let sys = monomial_curve_system(&t).unwrap();
        let gens = rooted_generators(&t);
        for eq in &sys.equations {
            prop_assert_eq!(eq.terms.len(), 2);
            prop_assert_eq!(&eq.terms[0].coeff + &eq.terms[1].coeff, Zero::zero());
            prop_assert_eq!(dot(&eq.terms[0].exps, &gens), dot(&eq.terms[1].exps, &gens));
        }
        // one binomial per downward edge beyond the first at each vertex
        let leaves = t.leaves().len();
        prop_assert_eq!(sys.equations.len(), leaves - 1);
    }

    #[test]
    fn plane_curve_conductors(seed in any::<u64>()) {
        let cp = random::char_pairs(&mut rng(seed), 3);
        let f = plane_curve(&cp, None).unwrap();
        // intersection multiplicities with the axes: (f·x) = q₁⋯q_k and
        // (f·y) = p₁q₂⋯q_k
        let q_product: u64 = cp.pairs.iter().map(|&(_, q)| q).product();
        let y_order = f.terms().iter().filter(|(_, a, _)| *a == 0).map(|(_, _, b)| *b).min();
        prop_assert_eq!(y_order, Some(q_product));
        let x_order = f.restrict_y_zero().iter().map(|(_, a)| *a).min();
        prop_assert_eq!(x_order, Some(cp.pairs[0].0 * q_product / cp.pairs[0].1));
        prop_assert!(f.y_degree() >= q_product);

        let conductors = chain_conductors(&cp);
        for j in 1..=cp.len() {
            let gens: Vec<u64> =
                chain_semigroup_generators(&cp, j).iter().map(|g| u64::try_from(g).unwrap()).collect();
            let (c, delta) = brute_conductor_delta(&gens);
            prop_assert_eq!(BigInt::from(c), conductors[j - 1].clone());
            prop_assert_eq!(c, 2 * delta);
        }

        // the chain diagram rooted at its last leaf carries the same semigroup
        let chain = chain_diagram(&cp).unwrap();
        let t = chain.root_at_leaf(chain.find_leaf("z").unwrap()).unwrap();
        prop_assert_eq!(&mu_rooted(&t), conductors.last().unwrap());
        let from_tree = NumericSemigroup::from_bigints(&rooted_generators(&t)).unwrap();
        let from_pairs = NumericSemigroup::from_bigints(&chain_semigroup_generators(&cp, cp.len())).unwrap();
        prop_assert_eq!(from_tree.minimal_generators(), from_pairs.minimal_generators());
    }
}
