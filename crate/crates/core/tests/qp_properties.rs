mod common;

use std::collections::BTreeSet;

use common::{disc_qps, exchange_matrix, matrix_mutation, multiset_of, random_qp};
use mixang::qp::{
    cyclic_derivative, ginzburg, mures_check, mutate, premutate, reduce, ArrowId, Generator,
    PathSum, Potential, QpError, Term, Vertex,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn proper_subsets(vs: &[Vertex]) -> impl Iterator<Item = BTreeSet<Vertex>> + '_ {
    (1..(1u32 << vs.len()) - 1).map(move |mask| {
        vs.iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .collect()
    })
}

#[test]
fn disc_mutation_matches_matrix_mutation() {
    for m in 4..=8 {
        for (_, qp) in disc_qps(m) {
            let (vs, b) = exchange_matrix(&qp);
            for (k, &v) in vs.iter().enumerate() {
                let once = mutate(&qp, v).unwrap();
                assert_eq!(
                    once.quiver().arrow_multiset(),
                    multiset_of(&vs, &matrix_mutation(&b, k))
                );
                let twice = mutate(&once, v).unwrap();
                assert_eq!(
                    twice.quiver().arrow_multiset(),
                    qp.quiver().arrow_multiset()
                );
            }
        }
    }
}

#[test]
fn disc_restriction_commutes_with_mutation() {
    let mut checks = 0;
    let mut potential_equal = 0;
    for m in 4..=8 {
        for (_, qp) in disc_qps(m) {
            let vs: Vec<Vertex> = qp.vertices().iter().copied().collect();
            for keep in proper_subsets(&vs) {
                for &i in &keep {
                    let r = mures_check(&qp, &keep, i).unwrap();
                    assert!(r.quiver_equal, "m={m} keep={keep:?} i={i}");
                    checks += 1;
                    potential_equal += usize::from(r.potential_equal);
                }
            }
        }
    }
    assert!(checks > 0 && potential_equal <= checks);
}

#[test]
fn reduction_leaves_no_quadratic_terms_on_discs() {
    for m in 4..=8 {
        for (_, qp) in disc_qps(m) {
            for &v in qp.vertices() {
                let pre = premutate(&qp, v).unwrap();
                let cancelled: Vec<Vec<ArrowId>> = pre
                    .potential
                    .terms()
                    .iter()
                    .filter(|t| t.cycle.len() == 2)
                    .map(|t| t.cycle.clone())
                    .collect();
                let out = reduce(pre).unwrap();
                assert!(out.potential().terms().iter().all(|t| t.cycle.len() != 2));
                for pair in cancelled {
                    assert!(pair.iter().all(|a| out.quiver().arrow(a).is_none()));
                }
            }
        }
    }
}

#[test]
fn ginzburg_differential_squares_to_zero_on_discs() {
    for m in 4..=7 {
        for (_, qp) in disc_qps(m) {
            let g = ginzburg(&qp);
            for gen in g.differential.keys() {
                let once = PathSum::from_terms([(1, vec![gen.clone()])]);
                assert!(g.apply(&g.apply(&once)).is_zero(), "d^2 {gen}");
            }
            let loops = g
                .arrows
                .iter()
                .filter(|a| matches!(a.generator, Generator::Loop(_)))
                .count();
            assert_eq!(loops, qp.vertices().len());
        }
    }
}

fn term_strategy() -> impl Strategy<Value = Term> {
    (
        prop_oneof![Just(-2i64), Just(-1), Just(1), Just(3)],
        prop::collection::vec(0u8..4, 1..5),
    )
        .prop_map(|(coef, ids)| Term {
            coef,
            cycle: ids
                .into_iter()
                .map(|i| ArrowId::new(format!("a{i}")))
                .collect(),
        })
}

proptest! {
    #[test]
    fn derivative_is_linear(t1 in term_strategy(), t2 in term_strategy(), a in 0u8..4) {
        let a = ArrowId::new(format!("a{a}"));
        let (w1, w2) = (Potential::new([t1]), Potential::new([t2]));
        let mut sum = cyclic_derivative(&w1, &a);
        sum.add_assign(&cyclic_derivative(&w2, &a));
        prop_assert_eq!(cyclic_derivative(&w1.add(&w2), &a), sum);
    }

    #[test]
    fn canonicalization_is_idempotent(terms in prop::collection::vec(term_strategy(), 0..6)) {
        let w = Potential::new(terms);
        prop_assert_eq!(Potential::new(w.terms().to_vec()), w);
    }

    #[test]
    fn random_mutation_matches_matrix_mutation(seed in any::<u64>(), n in 2usize..6, max_mult in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qp = random_qp(&mut rng, n, max_mult);
        let (vs, b) = exchange_matrix(&qp);
        for (k, &v) in vs.iter().enumerate() {
            match mutate(&qp, v) {
                Ok(once) => {
                    prop_assert!(once.potential().terms().iter().all(|t| t.cycle.len() != 2));
                    prop_assert_eq!(once.quiver().arrow_multiset(), multiset_of(&vs, &matrix_mutation(&b, k)));
                    if let Ok(twice) = mutate(&once, v) {
                        prop_assert_eq!(twice.quiver().arrow_multiset(), qp.quiver().arrow_multiset());
                    }
                }
                Err(e) => prop_assert!(matches!(e, QpError::UnsupportedReduction(_)), "{}", e),
            }
        }
    }
}
