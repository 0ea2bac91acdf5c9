//! Quivers with potential.
//!
//! A [`Qp`] is a finite quiver without loops or 2-cycles together with a
//! finite integer [`Potential`]. Paths are written in traversal order: the
//! word `ab` means "first `a`, then `b`", so it is composable when
//! `target(a) == source(b)`.
//!
//! Mutation follows the usual three steps (composites through the vertex,
//! reversal of incident arrows, new potential `W' + W''`) followed by a
//! deterministic 2-cycle reduction; see [`mutate`].

mod ginzburg;
mod mutation;
mod potential;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use compact_str::CompactString;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ginzburg::{ginzburg, Generator, GinzburgPresentation};
pub use mutation::{mures_check, mutate, premutate, reduce, MuresReport, UnreducedQp};
pub use potential::{canonical_rotation, cyclic_derivative, PathSum, Potential, Term};

pub type Vertex = i64;

/// Arrow identifier. Reversal toggles a trailing `*`, so reversing twice
/// gives back the original id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArrowId(CompactString);

impl ArrowId {
    pub fn new(s: impl AsRef<str>) -> Self {
        Self(CompactString::new(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn reversed(&self) -> ArrowId {
        match self.0.strip_suffix('*') {
            Some(base) => ArrowId(CompactString::new(base)),
            None => {
                let mut s = self.0.clone();
                s.push('*');
                ArrowId(s)
            }
        }
    }

    /// Id of the composite `[ab]` created by mutation.
    pub fn composite(a: &ArrowId, b: &ArrowId) -> ArrowId {
        let mut s = CompactString::with_capacity(a.0.len() + b.0.len() + 3);
        s.push('[');
        s.push_str(&a.0);
        s.push('|');
        s.push_str(&b.0);
        s.push(']');
        ArrowId(s)
    }
}

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ArrowId {
    fn from(s: &str) -> Self {
        ArrowId::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub id: ArrowId,
    pub src: Vertex,
    pub tgt: Vertex,
}

impl Arrow {
    pub fn new(id: impl Into<ArrowId>, src: Vertex, tgt: Vertex) -> Self {
        Self {
            id: id.into(),
            src,
            tgt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QpError {
    #[error("arrow {0} is a loop")]
    LoopArrow(ArrowId),
    #[error("arrows {0} and {1} form a 2-cycle")]
    TwoCycleArrows(ArrowId, ArrowId),
    #[error("cycle {cycle:?} is not composable and closed at arrow {at}")]
    NonComposableCycle { cycle: Vec<ArrowId>, at: ArrowId },
    #[error("potential mentions unknown arrow {0}")]
    UnknownArrowInPotential(ArrowId),
    #[error("duplicate arrow id {0}")]
    DuplicateArrow(ArrowId),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("bad vertex subset {0:?}: must be a proper nonempty subset of the vertices")]
    BadSubset(Vec<Vertex>),
    #[error("unsupported 2-cycle reduction: {0}")]
    UnsupportedReduction(String),
}

/// A finite quiver. Arrows are kept sorted by id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Quiver {
    vertices: BTreeSet<Vertex>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    /// Builds a quiver without checking the no-loop / no-2-cycle
    /// invariants; see [`Quiver::validate`].
    pub fn new(
        vertices: impl IntoIterator<Item = Vertex>,
        arrows: impl IntoIterator<Item = Arrow>,
    ) -> Self {
        let mut arrows: Vec<Arrow> = arrows.into_iter().collect();
        arrows.sort();
        Self {
            vertices: vertices.into_iter().collect(),
            arrows,
        }
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: &ArrowId) -> Option<&Arrow> {
        self.arrows
            .binary_search_by(|a| a.id.cmp(id))
            .ok()
            .map(|i| &self.arrows[i])
    }

    pub fn arrow_count(&self, from: Vertex, to: Vertex) -> usize {
        self.arrows
            .iter()
            .filter(|a| a.src == from && a.tgt == to)
            .count()
    }

    /// Arrows as a multiset of `(source, target)` pairs.
    pub fn arrow_multiset(&self) -> BTreeMap<(Vertex, Vertex), usize> {
        let mut m = BTreeMap::new();
        for a in &self.arrows {
            *m.entry((a.src, a.tgt)).or_insert(0) += 1;
        }
        m
    }

    /// Checks vertex membership, unique ids, no loops and no 2-cycles.
    pub fn validate(&self) -> Result<(), QpError> {
        for w in self.arrows.windows(2) {
            if w[0].id == w[1].id {
                return Err(QpError::DuplicateArrow(w[0].id.clone()));
            }
        }
        let mut seen: BTreeMap<(Vertex, Vertex), &ArrowId> = BTreeMap::new();
        for a in &self.arrows {
            for v in [a.src, a.tgt] {
                if !self.vertices.contains(&v) {
                    return Err(QpError::UnknownVertex(v));
                }
            }
            if a.src == a.tgt {
                return Err(QpError::LoopArrow(a.id.clone()));
            }
            seen.entry((a.src, a.tgt)).or_insert(&a.id);
        }
        for a in &self.arrows {
            if let Some(b) = seen.get(&(a.tgt, a.src)) {
                let (x, y) = if a.id < **b { (&a.id, *b) } else { (*b, &a.id) };
                return Err(QpError::TwoCycleArrows(x.clone(), y.clone()));
            }
        }
        Ok(())
    }
}

/// A quiver with potential satisfying every invariant: no loops, no
/// 2-cycles, unique arrow ids, and a potential made of closed composable
/// cycles over existing arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QpDoc", into = "QpDoc")]
pub struct Qp {
    quiver: Quiver,
    potential: Potential,
}

impl Qp {
    pub fn new(quiver: Quiver, potential: Potential) -> Result<Self, QpError> {
        let qp = Self { quiver, potential };
        validate_qp(&qp)?;
        Ok(qp)
    }

    pub(crate) fn from_parts_unchecked(quiver: Quiver, potential: Potential) -> Self {
        Self { quiver, potential }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.quiver.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.quiver.arrows
    }

    /// Renames arrows to `a0, a1, ...` ordered by `(source, target, old id)`.
    /// Mutation nests composite names, so long mutation walks use this to
    /// keep ids short.
    pub fn with_canonical_arrow_names(&self) -> Qp {
        let arrows = &self.quiver.arrows;
        let mut order: Vec<usize> = (0..arrows.len()).collect();
        order.sort_by(|&i, &j| {
            let (a, b) = (&arrows[i], &arrows[j]);
            (a.src, a.tgt, &a.id).cmp(&(b.src, b.tgt, &b.id))
        });
        // arrows are sorted by id, so positions double as an id index
        let mut names = vec![ArrowId(CompactString::default()); arrows.len()];
        for (rank, &i) in order.iter().enumerate() {
            names[i] = canonical_name(rank);
        }
        let rename = |id: &ArrowId| {
            let i = arrows
                .binary_search_by(|a| a.id.cmp(id))
                .expect("potential uses quiver arrows");
            names[i].clone()
        };
        let renamed = arrows.iter().zip(&names).map(|(a, id)| Arrow {
            id: id.clone(),
            src: a.src,
            tgt: a.tgt,
        });
        let quiver = Quiver::new(self.quiver.vertices.iter().copied(), renamed);
        let potential = self.potential.rename(rename);
        Qp { quiver, potential }
    }
}

/// `a{i}`, built without the formatting machinery.
fn canonical_name(i: usize) -> ArrowId {
    let mut digits = [0u8; 20];
    let mut pos = digits.len();
    let mut x = i;
    loop {
        pos -= 1;
        digits[pos] = b'0' + (x % 10) as u8;
        x /= 10;
        if x == 0 {
            break;
        }
    }
    let mut s = CompactString::const_new("a");
    s.push_str(std::str::from_utf8(&digits[pos..]).expect("ascii digits"));
    ArrowId(s)
}

/// Returns successfully iff every quiver, potential and QP invariant holds.
pub fn validate_qp(qp: &Qp) -> Result<(), QpError> {
    qp.quiver.validate()?;
    validate_potential(&qp.quiver, &qp.potential)
}

pub(crate) fn validate_potential(quiver: &Quiver, w: &Potential) -> Result<(), QpError> {
    for t in w.terms() {
        let n = t.cycle.len();
        let mut ends = Vec::with_capacity(n);
        for id in &t.cycle {
            let a = quiver
                .arrow(id)
                .ok_or_else(|| QpError::UnknownArrowInPotential(id.clone()))?;
            ends.push((a.src, a.tgt));
        }
        for i in 0..n {
            if ends[i].1 != ends[(i + 1) % n].0 {
                return Err(QpError::NonComposableCycle {
                    cycle: t.cycle.clone(),
                    at: t.cycle[i].clone(),
                });
            }
        }
    }
    Ok(())
}

/// Full sub-QP on the vertex subset `keep`.
pub fn restrict(qp: &Qp, keep: &BTreeSet<Vertex>) -> Result<Qp, QpError> {
    if keep.is_empty() || !keep.is_subset(qp.vertices()) || keep.len() == qp.vertices().len() {
        return Err(QpError::BadSubset(keep.iter().copied().collect()));
    }
    let arrows: Vec<Arrow> = qp
        .arrows()
        .iter()
        .filter(|a| keep.contains(&a.src) && keep.contains(&a.tgt))
        .cloned()
        .collect();
    let quiver = Quiver::new(keep.iter().copied(), arrows);
    let potential = qp
        .potential()
        .filter(|t| t.cycle.iter().all(|id| quiver.arrow(id).is_some()));
    Ok(Qp::from_parts_unchecked(quiver, potential))
}

/// Wire form: `{"vertices": [...], "arrows": [{"id","src","tgt"}], "potential": [{"coef","cycle"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QpDoc {
    pub vertices: Vec<Vertex>,
    pub arrows: Vec<Arrow>,
    #[serde(default)]
    pub potential: Vec<Term>,
}

impl TryFrom<QpDoc> for Qp {
    type Error = QpError;

    fn try_from(doc: QpDoc) -> Result<Self, Self::Error> {
        let quiver = Quiver::new(doc.vertices, doc.arrows);
        Qp::new(quiver, Potential::new(doc.potential))
    }
}

impl From<Qp> for QpDoc {
    fn from(qp: Qp) -> Self {
        QpDoc {
            vertices: qp.quiver.vertices.into_iter().collect(),
            arrows: qp.quiver.arrows,
            potential: qp.potential.terms().to_vec(),
        }
    }
}
