//! Mixed-angulations of a disc: dissections of a convex `m`-gon with
//! vertices `0..m` labelled counterclockwise.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DissectionError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("chord {0} is not a diagonal of the {1}-gon")]
    BadChord(Chord, usize),
    #[error("diagonals {0} and {1} cross")]
    Crossing(Chord, Chord),
    #[error("no dissection of the {m}-gon has cell weights {weights:?}")]
    InfeasibleWeights { m: usize, weights: Vec<usize> },
    #[error("{0} is not a diagonal of the dissection")]
    NotADiagonal(Chord),
    #[error("flip of {gamma} produced the degenerate chord {produced}")]
    DegenerateFlip { gamma: Chord, produced: Chord },
    #[error("not every cell is a triangle")]
    NotATriangulation,
    #[error("triangulation does not refine the dissection")]
    NotARefinement,
    #[error("no refinement realises the flip of {0}")]
    NoWitness(Chord),
}

/// Unordered pair of polygon vertices, stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Chord {
    lo: usize,
    hi: usize,
}

impl Chord {
    pub fn new(p: usize, q: usize) -> Self {
        Self {
            lo: p.min(q),
            hi: p.max(q),
        }
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn ends(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    pub fn crosses(&self, other: &Chord) -> bool {
        let (a, b) = self.ends();
        let (c, d) = other.ends();
        (a < c && c < b && b < d) || (c < a && a < d && d < b)
    }

    pub fn is_boundary_edge(&self, m: usize) -> bool {
        self.hi - self.lo == 1 || (self.lo == 0 && self.hi == m - 1)
    }

    pub fn rotated(&self, k: usize, m: usize) -> Chord {
        Chord::new((self.lo + k) % m, (self.hi + k) % m)
    }
}

impl From<[usize; 2]> for Chord {
    fn from([p, q]: [usize; 2]) -> Self {
        Chord::new(p, q)
    }
}

impl From<Chord> for [usize; 2] {
    fn from(c: Chord) -> Self {
        [c.lo, c.hi]
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

/// A set of pairwise noncrossing diagonals of a labelled `m`-gon. Each cell
/// with `k` corners carries the weight `k - 2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "DissectionDoc", into = "DissectionDoc")]
pub struct PolygonDissection {
    m: usize,
    diagonals: BTreeSet<Chord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DissectionDoc {
    pub m: usize,
    pub diagonals: Vec<Chord>,
}

impl TryFrom<DissectionDoc> for PolygonDissection {
    type Error = DissectionError;

    fn try_from(doc: DissectionDoc) -> Result<Self, Self::Error> {
        PolygonDissection::new(doc.m, doc.diagonals)
    }
}

impl From<PolygonDissection> for DissectionDoc {
    fn from(d: PolygonDissection) -> Self {
        DissectionDoc {
            m: d.m,
            diagonals: d.diagonals.into_iter().collect(),
        }
    }
}

impl PolygonDissection {
    pub fn new(
        m: usize,
        diagonals: impl IntoIterator<Item = Chord>,
    ) -> Result<Self, DissectionError> {
        if m < 3 {
            return Err(DissectionError::TooFewVertices(m));
        }
        let diagonals: BTreeSet<Chord> = diagonals.into_iter().collect();
        for c in &diagonals {
            if c.hi >= m || c.lo == c.hi || c.is_boundary_edge(m) {
                return Err(DissectionError::BadChord(*c, m));
            }
        }
        let list: Vec<&Chord> = diagonals.iter().collect();
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                if a.crosses(b) {
                    return Err(DissectionError::Crossing(**a, **b));
                }
            }
        }
        Ok(Self { m, diagonals })
    }

    pub(crate) fn from_parts_unchecked(m: usize, diagonals: BTreeSet<Chord>) -> Self {
        Self { m, diagonals }
    }

    /// The undissected polygon.
    pub fn whole(m: usize) -> Result<Self, DissectionError> {
        Self::new(m, [])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn diagonals(&self) -> &BTreeSet<Chord> {
        &self.diagonals
    }

    /// Diagonals in sorted order; operator and quiver-vertex indices refer
    /// to positions in this list.
    pub fn diagonal_list(&self) -> Vec<Chord> {
        self.diagonals.iter().copied().collect()
    }

    pub fn contains(&self, c: &Chord) -> bool {
        self.diagonals.contains(c)
    }

    /// Cells as ascending (hence counterclockwise) corner lists, sorted.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells: Vec<Vec<usize>> = vec![(0..self.m).collect()];
        for c in &self.diagonals {
            let idx = cells
                .iter()
                .position(|cell| cell.contains(&c.lo) && cell.contains(&c.hi))
                .expect("noncrossing diagonal lies in a single cell");
            let cell = cells.swap_remove(idx);
            let i = cell.iter().position(|&v| v == c.lo).unwrap();
            let j = cell.iter().position(|&v| v == c.hi).unwrap();
            let inner = cell[i..=j].to_vec();
            let mut outer: Vec<usize> = cell[j..].iter().chain(&cell[..=i]).copied().collect();
            outer.sort_unstable();
            cells.push(inner);
            cells.push(outer);
        }
        cells.sort();
        cells
    }

    /// Sorted multiset of cell weights.
    pub fn cell_weights(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.cells().iter().map(|c| c.len() - 2).collect();
        w.sort_unstable();
        w
    }

    pub fn is_triangulation(&self) -> bool {
        self.diagonals.len() + 3 == self.m
    }

    /// Polygon sides and diagonals at `p`.
    fn neighbours(&self, p: usize) -> Vec<usize> {
        let m = self.m;
        let mut n = vec![(p + 1) % m, (p + m - 1) % m];
        for c in &self.diagonals {
            if c.lo == p {
                n.push(c.hi);
            } else if c.hi == p {
                n.push(c.lo);
            }
        }
        n
    }

    fn offset(&self, from: usize, to: usize) -> usize {
        (to + self.m - from) % self.m
    }

    /// The end of the side adjacent to `p -> q` on the side of smaller
    /// (`forward`) or larger counterclockwise offset from `p`.
    fn slide(&self, p: usize, q: usize, forward: bool) -> usize {
        let oq = self.offset(p, q);
        let candidates = self
            .neighbours(p)
            .into_iter()
            .map(|x| (self.offset(p, x), x));
        if forward {
            candidates.filter(|(o, _)| *o < oq).max().unwrap().1
        } else {
            candidates.filter(|(o, _)| *o > oq).min().unwrap().1
        }
    }

    fn flip(&self, gamma: Chord, forward: bool) -> Result<PolygonDissection, DissectionError> {
        if !self.diagonals.contains(&gamma) {
            return Err(DissectionError::NotADiagonal(gamma));
        }
        let (p, q) = gamma.ends();
        let produced = Chord::new(self.slide(p, q, forward), self.slide(q, p, forward));
        if produced.is_boundary_edge(self.m) || self.diagonals.contains(&produced) {
            return Err(DissectionError::DegenerateFlip { gamma, produced });
        }
        let mut diagonals = self.diagonals.clone();
        diagonals.remove(&gamma);
        diagonals.insert(produced);
        Ok(PolygonDissection {
            m: self.m,
            diagonals,
        })
    }

    /// Forward flip: each endpoint of `gamma` slides counterclockwise along
    /// the boundary to the far end of the next side of the cell it bounds.
    pub fn flip_forward(&self, gamma: Chord) -> Result<PolygonDissection, DissectionError> {
        self.flip(gamma, true)
    }

    /// Backward flip: the clockwise mirror, inverse to [`Self::flip_forward`].
    pub fn flip_backward(&self, gamma: Chord) -> Result<PolygonDissection, DissectionError> {
        self.flip(gamma, false)
    }

    /// The chord that replaces `gamma` in `flipped`, given that `flipped`
    /// came from `self` by flipping `gamma`.
    pub fn replacement_in(&self, flipped: &PolygonDissection) -> Option<Chord> {
        flipped
            .diagonals
            .difference(&self.diagonals)
            .next()
            .copied()
    }

    /// Relabels vertices by `i -> i + k mod m`.
    pub fn rotated(&self, k: usize) -> PolygonDissection {
        PolygonDissection {
            m: self.m,
            diagonals: self
                .diagonals
                .iter()
                .map(|c| c.rotated(k, self.m))
                .collect(),
        }
    }
}

impl fmt::Display for PolygonDissection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-gon[", self.m)?;
        for (i, c) in self.diagonals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// All dissections of the `m`-gon whose cell weights form `weights` (as a
/// multiset), sorted by diagonal list.
pub fn enumerate_dissections(
    m: usize,
    weights: &[usize],
) -> Result<Vec<PolygonDissection>, DissectionError> {
    let mut target = weights.to_vec();
    target.sort_unstable();
    let infeasible = || DissectionError::InfeasibleWeights {
        m,
        weights: target.clone(),
    };
    if m < 3 {
        return Err(DissectionError::TooFewVertices(m));
    }
    if target.is_empty() || target.contains(&0) || target.iter().sum::<usize>() + 2 != m {
        return Err(infeasible());
    }
    let k = target.len() - 1;
    let all: Vec<Chord> = all_diagonals(m);
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    noncrossing_subsets(&all, 0, k, &mut chosen, &mut |set| {
        let d = PolygonDissection::from_parts_unchecked(m, set.iter().copied().collect());
        if d.cell_weights() == target {
            out.push(d);
        }
    });
    if out.is_empty() {
        return Err(infeasible());
    }
    Ok(out)
}

pub(crate) fn all_diagonals(m: usize) -> Vec<Chord> {
    let mut v = Vec::new();
    for p in 0..m {
        for q in p + 2..m {
            if !(p == 0 && q == m - 1) {
                v.push(Chord::new(p, q));
            }
        }
    }
    v
}

fn noncrossing_subsets(
    all: &[Chord],
    from: usize,
    k: usize,
    chosen: &mut Vec<Chord>,
    visit: &mut impl FnMut(&[Chord]),
) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    for i in from..all.len() {
        if all.len() - i < k - chosen.len() {
            break;
        }
        let c = all[i];
        if chosen.iter().all(|d| !d.crosses(&c)) {
            chosen.push(c);
            noncrossing_subsets(all, i + 1, k, chosen, visit);
            chosen.pop();
        }
    }
}
