use std::collections::BTreeMap;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::dissection::{Chord, DissectionError, PolygonDissection};
use crate::qp::{Arrow, ArrowId, Potential, Qp, Quiver, Term, Vertex};

/// A dissection all of whose cells are triangles.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolygonDissection", into = "PolygonDissection")]
pub struct Triangulation(PolygonDissection);

impl TryFrom<PolygonDissection> for Triangulation {
    type Error = DissectionError;

    fn try_from(d: PolygonDissection) -> Result<Self, Self::Error> {
        if d.is_triangulation() {
            Ok(Triangulation(d))
        } else {
            Err(DissectionError::NotATriangulation)
        }
    }
}

impl From<Triangulation> for PolygonDissection {
    fn from(t: Triangulation) -> Self {
        t.0
    }
}

impl Deref for Triangulation {
    type Target = PolygonDissection;

    fn deref(&self) -> &PolygonDissection {
        &self.0
    }
}

impl Triangulation {
    pub fn new(
        m: usize,
        diagonals: impl IntoIterator<Item = Chord>,
    ) -> Result<Self, DissectionError> {
        PolygonDissection::new(m, diagonals)?.try_into()
    }

    pub fn dissection(&self) -> &PolygonDissection {
        &self.0
    }

    /// The classical flip; forward and backward agree on triangulations.
    pub fn flip(&self, gamma: Chord) -> Result<Triangulation, DissectionError> {
        Ok(Triangulation(self.0.flip_forward(gamma)?))
    }

    /// Quiver vertex of `arc`: its position in the sorted diagonal list.
    pub fn vertex_of(&self, arc: &Chord) -> Option<Vertex> {
        self.diagonals()
            .iter()
            .position(|c| c == arc)
            .map(|i| i as Vertex)
    }

    pub fn arc_of(&self, v: Vertex) -> Option<Chord> {
        usize::try_from(v)
            .ok()
            .and_then(|i| self.diagonals().iter().nth(i).copied())
    }
}

/// Triangulations of the convex polygon with corners `vs` (in counterclockwise
/// order), as lists of internal chords.
pub(crate) fn triangulate_polygon(vs: &[usize]) -> Vec<Vec<Chord>> {
    let k = vs.len();
    if k <= 3 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for j in 1..k - 1 {
        let left = triangulate_polygon(&vs[..=j]);
        let right = triangulate_polygon(&vs[j..]);
        for l in &left {
            for r in &right {
                let mut chords = Vec::with_capacity(k - 3);
                if j > 1 {
                    chords.push(Chord::new(vs[0], vs[j]));
                }
                if j < k - 2 {
                    chords.push(Chord::new(vs[j], vs[k - 1]));
                }
                chords.extend(l);
                chords.extend(r);
                out.push(chords);
            }
        }
    }
    out
}

/// All triangulations of the `m`-gon, sorted.
pub fn triangulations(m: usize) -> Result<Vec<Triangulation>, DissectionError> {
    if m < 3 {
        return Err(DissectionError::TooFewVertices(m));
    }
    let vs: Vec<usize> = (0..m).collect();
    let mut out: Vec<Triangulation> = triangulate_polygon(&vs)
        .into_iter()
        .map(|chords| {
            Triangulation(PolygonDissection::from_parts_unchecked(
                m,
                chords.into_iter().collect(),
            ))
        })
        .collect();
    out.sort();
    Ok(out)
}

/// One vertex per diagonal, labelled by its position in the sorted diagonal
/// list. Each triangle `x < y < z` orders its sides `{x,y} -> {y,z} -> {x,z}
/// -> {x,y}`; every consecutive pair of diagonal sides gives an arrow, and a
/// triangle bounded by three diagonals contributes its 3-cycle to the
/// potential.
pub fn quiver_from_triangulation(t: &Triangulation) -> Qp {
    let index: BTreeMap<Chord, Vertex> = t
        .diagonals()
        .iter()
        .enumerate()
        .map(|(i, c)| (*c, i as Vertex))
        .collect();
    let mut arrows = Vec::new();
    let mut terms = Vec::new();
    for cell in t.cells() {
        let (x, y, z) = (cell[0], cell[1], cell[2]);
        let sides = [Chord::new(x, y), Chord::new(y, z), Chord::new(x, z)];
        let mut cycle = Vec::new();
        for i in 0..3 {
            let (from, to) = (sides[i], sides[(i + 1) % 3]);
            if let (Some(&s), Some(&d)) = (index.get(&from), index.get(&to)) {
                let id = ArrowId::new(format!("a{s}_{d}"));
                arrows.push(Arrow::new(id.clone(), s, d));
                cycle.push(id);
            }
        }
        if cycle.len() == 3 {
            terms.push(Term { coef: 1, cycle });
        }
    }
    let quiver = Quiver::new(index.values().copied(), arrows);
    Qp::from_parts_unchecked(quiver, Potential::new(terms))
}

/// Arrow multiset of a QP whose vertex `v` stands for the arc `labels[v]`.
pub fn arrows_by_arc(qp: &Qp, labels: &BTreeMap<Vertex, Chord>) -> BTreeMap<(Chord, Chord), usize> {
    let mut out = BTreeMap::new();
    for ((s, d), n) in qp.quiver().arrow_multiset() {
        *out.entry((labels[&s], labels[&d])).or_insert(0) += n;
    }
    out
}

/// `vertex -> arc` for the QP of `t`.
pub fn arc_labels(t: &Triangulation) -> BTreeMap<Vertex, Chord> {
    t.diagonals()
        .iter()
        .enumerate()
        .map(|(i, c)| (i as Vertex, *c))
        .collect()
}
