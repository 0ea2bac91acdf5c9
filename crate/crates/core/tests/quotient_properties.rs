use std::collections::BTreeSet;

use mixang::exchange::BuildOptions;
use mixang::qp::Vertex;
use mixang::quotient::{
    admissible_refinements, induced_tilt, induced_tilt_via, project, quotient_graph,
    quotient_invariance_check, QuotientError,
};
use mixang::seeds::{apply_step, init_seed, Direction, Seed, Step};
use mixang::surface::{
    complementary_arcs, enumerate_dissections, quiver_from_triangulation, refinements,
    PolygonDissection,
};
use proptest::prelude::*;

/// Every hexagon dissection with at least one complementary arc, paired with
/// each of its refinements and the collapsed vertex set.
fn hexagon_cases() -> Vec<(Seed, BTreeSet<Vertex>)> {
    let mut out = Vec::new();
    for w in [vec![1, 1, 2], vec![2, 2], vec![1, 3]] {
        for a in enumerate_dissections(6, &w).unwrap() {
            for t in refinements(&a) {
                let i: BTreeSet<Vertex> = complementary_arcs(&t, &a)
                    .unwrap()
                    .into_iter()
                    .map(|x| x as Vertex)
                    .collect();
                out.push((init_seed(quiver_from_triangulation(&t)), i));
            }
        }
    }
    out
}

fn supported(s: &Seed, i: &BTreeSet<Vertex>) -> bool {
    i.iter().all(|&v| {
        let col = s.c_column(s.index_of(v).unwrap());
        (0..s.rank()).all(|r| i.contains(&s.vertex_at(r)) || col[r] == 0)
    })
}

#[test]
fn single_collapsed_tilts_keep_projection() {
    let cases = hexagon_cases();
    assert!(!cases.is_empty());
    for (s, i) in cases {
        for &v in &i {
            for direction in [Direction::Forward, Direction::Backward] {
                assert!(quotient_invariance_check(
                    &s,
                    &i,
                    &[Step {
                        vertex: v,
                        direction
                    }]
                )
                .unwrap());
            }
        }
    }
}

#[test]
fn admissible_refinements_exist() {
    for (m, w) in [
        (5, vec![1, 2]),
        (6, vec![1, 1, 2]),
        (6, vec![2, 2]),
        (6, vec![1, 3]),
        (7, vec![1, 1, 3]),
        (7, vec![1, 2, 2]),
    ] {
        for a in enumerate_dissections(m, &w).unwrap() {
            for gamma in a.diagonal_list() {
                let ok = admissible_refinements(&a, gamma).unwrap();
                assert!(!ok.is_empty(), "{a} at {gamma:?}");
                let first = induced_tilt(&a, gamma).unwrap();
                let mut after = first.labels_after();
                after.sort();
                assert_eq!(after, a.flip_forward(gamma).unwrap().diagonal_list());
                for t in &ok {
                    let it = induced_tilt_via(t, &a, gamma).unwrap();
                    assert_eq!(
                        it.labelled_after(),
                        first.labelled_after(),
                        "{a} at {gamma:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn class_level_graph_isomorphism() {
    for (m, w) in [
        (5, vec![1, 2]),
        (6, vec![1, 1, 2]),
        (6, vec![2, 2]),
        (6, vec![1, 3]),
        (7, vec![1, 1, 1, 2]),
        (7, vec![2, 3]),
    ] {
        let g = quotient_graph(m, &w, BuildOptions::default()).unwrap();
        let r = &g.report;
        assert!(
            r.bijection_ok && r.edge_commute_ok && r.witness_independent,
            "m={m} w={w:?}"
        );
        assert!(r.collisions.is_empty());
        assert_eq!(r.vertices_left, enumerate_dissections(m, &w).unwrap().len());
        assert_eq!(g.quotient.edge_count(), g.dissections.edge_count());
        assert_eq!(r.global_frame.quiver_mismatches, 0);
        assert_eq!(r.global_frame.support_violations, 0);
    }
    let single = quotient_graph(5, &[3], BuildOptions::default()).unwrap();
    assert_eq!(
        (single.report.vertices_left, single.quotient.edge_count()),
        (1, 0)
    );
}

#[test]
fn report_json_shape() {
    let g = quotient_graph(5, &[1, 2], BuildOptions::default()).unwrap();
    let v = serde_json::to_value(&g.report).unwrap();
    for key in [
        "vertices_left",
        "vertices_right",
        "bijection_ok",
        "edge_commute_ok",
        "collisions",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn errors() {
    let a = PolygonDissection::new(6, []).unwrap();
    assert!(matches!(
        quotient_graph(6, &[1, 1], BuildOptions::default()),
        Err(QuotientError::Dissection(_))
    ));
    let t = &refinements(&a)[0];
    let s = init_seed(quiver_from_triangulation(t));
    let all: BTreeSet<Vertex> = s.qp().vertices().clone();
    assert!(matches!(
        project(&s, &all),
        Err(QuotientError::BadSubset(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn collapsed_walks_preserve_support_and_projection(
        pick in any::<prop::sample::Index>(),
        walk in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 0..60),
    ) {
        let cases = hexagon_cases();
        let (s0, i) = &cases[pick.index(cases.len())];
        let collapsed: Vec<Vertex> = i.iter().copied().collect();
        let before = project(s0, i).unwrap().projected_c();
        let mut s = s0.clone();
        let mut steps = Vec::new();
        for (v, fwd) in walk {
            let step = Step { vertex: collapsed[v.index(collapsed.len())], direction: if fwd { Direction::Forward } else { Direction::Backward } };
            s = apply_step(&s, step).unwrap();
            steps.push(step);
            prop_assert!(supported(&s, i));
            prop_assert_eq!(project(&s, i).unwrap().projected_c(), before.clone());
        }
        prop_assert!(quotient_invariance_check(s0, i, &steps).unwrap());
    }
}
