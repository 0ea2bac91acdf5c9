#![allow(dead_code)]

use std::collections::BTreeMap;

use mixang::qp::{Arrow, ArrowId, Potential, Qp, Quiver, Term, Vertex};
use mixang::surface::{quiver_from_triangulation, triangulations, Triangulation};
use rand::seq::SliceRandom;
use rand::Rng;

/// Skew-symmetric exchange matrix `b[i][j] = #(i -> j) - #(j -> i)` over the
/// sorted vertex list.
pub fn exchange_matrix(qp: &Qp) -> (Vec<Vertex>, Vec<Vec<i64>>) {
    let vs: Vec<Vertex> = qp.vertices().iter().copied().collect();
    let pos: BTreeMap<Vertex, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut b = vec![vec![0i64; vs.len()]; vs.len()];
    for a in qp.arrows() {
        b[pos[&a.src]][pos[&a.tgt]] += 1;
        b[pos[&a.tgt]][pos[&a.src]] -= 1;
    }
    (vs, b)
}

/// Matrix mutation at index `k`.
pub fn matrix_mutation(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let n = b.len();
    let mut out = b.to_vec();
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    out
}

/// Arrow multiset of a 2-acyclic quiver read off an exchange matrix.
pub fn multiset_of(vs: &[Vertex], b: &[Vec<i64>]) -> BTreeMap<(Vertex, Vertex), usize> {
    let mut out = BTreeMap::new();
    for (i, row) in b.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x > 0 {
                out.insert((vs[i], vs[j]), x as usize);
            }
        }
    }
    out
}

/// Every triangulation of the `m`-gon with its quiver.
pub fn disc_qps(m: usize) -> Vec<(Triangulation, Qp)> {
    triangulations(m)
        .unwrap()
        .into_iter()
        .map(|t| {
            let q = quiver_from_triangulation(&t);
            (t, q)
        })
        .collect()
}

/// Random loop-free quiver without 2-cycles, with every oriented 3-cycle in
/// the potential at coefficient +-1.
pub fn random_qp(rng: &mut impl Rng, n: usize, max_mult: usize) -> Qp {
    let vertices: Vec<Vertex> = (1..=n as Vertex).collect();
    let mut arrows = Vec::new();
    let mut next = 0;
    for i in 0..n {
        for j in i + 1..n {
            let count = rng.gen_range(0..=max_mult);
            let (s, t) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            for _ in 0..count {
                arrows.push(Arrow::new(
                    ArrowId::new(format!("x{next}")),
                    vertices[s],
                    vertices[t],
                ));
                next += 1;
            }
        }
    }
    let mut terms = Vec::new();
    for a in &arrows {
        for b in arrows.iter().filter(|b| b.src == a.tgt) {
            for c in arrows.iter().filter(|c| c.src == b.tgt && c.tgt == a.src) {
                if a.id < b.id && a.id < c.id {
                    let coef = *[1, -1].choose(rng).unwrap();
                    terms.push(Term {
                        coef,
                        cycle: vec![a.id.clone(), b.id.clone(), c.id.clone()],
                    });
                }
            }
        }
    }
    Qp::new(Quiver::new(vertices, arrows), Potential::new(terms)).unwrap()
}
