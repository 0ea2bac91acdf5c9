use mixang::torus::{flip, invariant, normal_form, reachable, Bubble, TorusFlip, TorusState};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M = [[i64; 2]; 2];

fn mul(a: M, b: M) -> M {
    let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn state(m: M) -> TorusState {
    TorusState::new(m[0], m[1], Bubble::BL)
}

/// Product of random elementary matrices, with a random sign flip of one row.
fn random_unimodular(rng: &mut impl Rng, len: usize) -> M {
    const GENS: [M; 4] = [
        [[1, 1], [0, 1]],
        [[1, 0], [1, 1]],
        [[1, -1], [0, 1]],
        [[1, 0], [-1, 1]],
    ];
    let mut m: M = if rng.gen_bool(0.5) {
        [[1, 0], [0, 1]]
    } else {
        [[0, 1], [1, 0]]
    };
    for _ in 0..len {
        m = mul(GENS[rng.gen_range(0..4)], m);
    }
    m
}

fn residues(m: M) -> (u8, u8) {
    (
        (m[0][0] + m[1][0]).rem_euclid(3) as u8,
        (m[0][1] + m[1][1]).rem_euclid(3) as u8,
    )
}

#[test]
fn flips_are_left_multiplication() {
    for f in TorusFlip::ALL {
        assert_eq!(
            flip(&state([[1, 0], [0, 1]]), f).unwrap(),
            state(f.matrix())
        );
    }
    assert_eq!(
        flip(&state([[1, 0], [0, 1]]), TorusFlip::HorizontalForward).unwrap(),
        state([[0, -1], [1, 2]])
    );
}

#[test]
fn start_states_are_separated() {
    let (a, b) = (state([[1, 0], [0, 1]]), state([[1, 1], [0, 1]]));
    assert_eq!(invariant(&a), (1, 1));
    assert_eq!(invariant(&b), (1, 2));
    let ra = reachable(&a, 12).unwrap();
    let rb = reachable(&b, 12).unwrap();
    assert!(ra.is_disjoint(&rb));
    assert!(ra.iter().all(|s| invariant(s) == (1, 1)));
    assert!(rb.iter().all(|s| invariant(s) == (1, 2)));
}

#[test]
fn random_walks_keep_the_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let m = random_unimodular(&mut rng, 6);
        let mut cur = state(m);
        let mut oracle = m;
        let inv = invariant(&cur);
        assert_eq!(inv, residues(m));
        for _ in 0..100 {
            let f = TorusFlip::ALL[rng.gen_range(0..4)];
            cur = flip(&cur, f).unwrap();
            oracle = mul(f.matrix(), oracle);
            assert_eq!(cur, state(oracle));
            assert_eq!(invariant(&cur), inv);
        }
    }
}

#[test]
fn long_walks_leave_i64_safely() {
    let mut cur = state([[1, 0], [0, 1]]);
    for i in 0..200 {
        let f = if i % 2 == 0 {
            TorusFlip::HorizontalForward
        } else {
            TorusFlip::VerticalInverseArc
        };
        cur = flip(&cur, f).unwrap();
    }
    assert!(cur.h[0].bits() > 64);
    assert_eq!(cur.det() * cur.det(), BigInt::from(1));
    assert_eq!(invariant(&cur), (1, 1));
}

fn bubble() -> impl Strategy<Value = Bubble> {
    prop_oneof![
        Just(Bubble::BL),
        Just(Bubble::TL),
        Just(Bubble::TR),
        Just(Bubble::BR)
    ]
}

proptest! {
    #[test]
    fn normal_form_is_idempotent(seed in any::<u64>(), b in bubble()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_unimodular(&mut rng, 8);
        let s = TorusState::new(m[0], m[1], b);
        let n = normal_form(&s).unwrap();
        prop_assert_eq!(n.bubble, Bubble::BL);
        prop_assert_eq!(normal_form(&n).unwrap(), n);
    }

    #[test]
    fn every_flip_keeps_the_invariant(seed in any::<u64>(), ops in prop::collection::vec(0usize..4, 1..50)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = state(random_unimodular(&mut rng, 5));
        let inv = invariant(&s);
        let mut cur = s;
        for op in ops {
            cur = flip(&cur, TorusFlip::ALL[op]).unwrap();
            prop_assert_eq!(invariant(&cur), inv);
        }
    }

    #[test]
    fn non_unimodular_is_rejected(a in -5i64..5, b in -5i64..5, c in -5i64..5, d in -5i64..5) {
        prop_assume!((a * d - b * c).abs() != 1);
        prop_assert!(normal_form(&TorusState::new([a, b], [c, d], Bubble::BL)).is_err());
    }
}
