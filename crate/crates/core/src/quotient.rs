//! Quotient-heart seeds: class data projected away from a collapsed vertex
//! set, tilts induced by flips of mixed-angulations, and the quotient-heart
//! exchange graph of a polygon system.
//!
//! For a dissection `a` and a refinement `t`, the quiver vertices of `t` split
//! into the arcs of `a` (the complement `I^c`) and the complementary arcs
//! (the collapsed set `I`).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exchange::{
    build, content_key, BuildOptions, Edge, ExchangeError, ExchangeGraph, GraphVertex, PolygonFlips,
};
use crate::qp::Vertex;
use crate::seeds::{apply_step, init_seed, tilt_forward, Seed, SeedError, Step};
use crate::surface::{
    arc_labels, arrows_by_arc, complementary_arcs, enumerate_dissections,
    quiver_from_triangulation, refinements, Chord, DissectionError, PolygonDissection,
    Triangulation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Dissection(#[from] DissectionError),
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
    #[error("collapsed set {0:?} must be a proper nonempty subset of the vertices")]
    BadSubset(Vec<Vertex>),
    #[error("column {column} of C has support outside the collapsed set")]
    SupportViolation { column: Vertex },
    #[error("walk step {0} is not at a collapsed vertex")]
    StepOutsideCollapsed(Step),
    #[error("no refinement of {dissection} lacks arrows from {arc} to the complementary arcs")]
    NoAdmissibleRefinement { dissection: String, arc: Chord },
}

/// A seed together with a collapsed vertex set `I` whose simples have classes
/// supported on `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSeed {
    base: Seed,
    collapsed: BTreeSet<Vertex>,
}

impl QuotientSeed {
    pub fn base(&self) -> &Seed {
        &self.base
    }

    pub fn collapsed(&self) -> &BTreeSet<Vertex> {
        &self.collapsed
    }

    /// Vertices outside `I`, ascending.
    pub fn complement(&self) -> Vec<Vertex> {
        self.base
            .qp()
            .vertices()
            .iter()
            .copied()
            .filter(|v| !self.collapsed.contains(v))
            .collect()
    }

    fn complement_indices(&self) -> Vec<usize> {
        self.base
            .qp()
            .vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| !self.collapsed.contains(v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Columns `j` of `C` for `j` outside `I`, restricted to the rows outside `I`.
    pub fn projected_c(&self) -> Vec<Vec<i128>> {
        let idx = self.complement_indices();
        idx.iter()
            .map(|&j| {
                let col = self.base.c_column(j);
                idx.iter().map(|&i| col[i]).collect()
            })
            .collect()
    }
}

fn check_support(s: &Seed, collapsed: &BTreeSet<Vertex>) -> Result<(), QuotientError> {
    let outside: Vec<usize> = (0..s.rank())
        .filter(|&i| !collapsed.contains(&s.vertex_at(i)))
        .collect();
    for &v in collapsed {
        let col = s.c_column(s.index_of(v)?);
        if outside.iter().any(|&r| col[r] != 0) {
            return Err(QuotientError::SupportViolation { column: v });
        }
    }
    Ok(())
}

/// Projection that also accepts an empty or full collapsed set.
fn project_any(s: &Seed, collapsed: &BTreeSet<Vertex>) -> Result<QuotientSeed, QuotientError> {
    if collapsed.iter().any(|v| !s.qp().vertices().contains(v)) {
        return Err(QuotientError::BadSubset(
            collapsed.iter().copied().collect(),
        ));
    }
    check_support(s, collapsed)?;
    Ok(QuotientSeed {
        base: s.clone(),
        collapsed: collapsed.clone(),
    })
}

/// Projects `s` away from the proper nonempty vertex set `collapsed`.
pub fn project(s: &Seed, collapsed: &BTreeSet<Vertex>) -> Result<QuotientSeed, QuotientError> {
    if collapsed.is_empty() || collapsed.len() >= s.rank() {
        return Err(QuotientError::BadSubset(
            collapsed.iter().copied().collect(),
        ));
    }
    project_any(s, collapsed)
}

/// Whether the projected classes after `walk` equal those before. Every step
/// must be at a collapsed vertex.
pub fn quotient_invariance_check(
    s: &Seed,
    collapsed: &BTreeSet<Vertex>,
    walk: &[Step],
) -> Result<bool, QuotientError> {
    if let Some(step) = walk.iter().find(|st| !collapsed.contains(&st.vertex)) {
        return Err(QuotientError::StepOutsideCollapsed(*step));
    }
    let before = project(s, collapsed)?.projected_c();
    let mut cur = s.clone();
    for &step in walk {
        cur = apply_step(&cur, step)?;
    }
    Ok(project(&cur, collapsed)?.projected_c() == before)
}

/// A tilt of quotient hearts induced by the forward flip of `gamma`, realised
/// on one refinement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedTilt {
    pub refinement: Triangulation,
    /// Quiver vertex of `gamma` in the refinement.
    pub vertex: Vertex,
    pub gamma: Chord,
    /// The arc replacing `gamma` when the refinement is flipped.
    pub new_arc: Chord,
    pub before: QuotientSeed,
    pub after: QuotientSeed,
}

impl InducedTilt {
    /// Arcs labelling the complement vertices before the tilt.
    pub fn labels_before(&self) -> Vec<Chord> {
        self.before
            .complement()
            .iter()
            .map(|&v| self.refinement.arc_of(v).expect("refinement vertex"))
            .collect()
    }

    /// Arcs labelling the complement vertices after the tilt.
    pub fn labels_after(&self) -> Vec<Chord> {
        self.before
            .complement()
            .iter()
            .map(|&v| {
                if v == self.vertex {
                    self.new_arc
                } else {
                    self.refinement.arc_of(v).expect("refinement vertex")
                }
            })
            .collect()
    }

    /// Projected classes after the tilt, keyed by (row arc, column arc).
    pub fn labelled_after(&self) -> LabelledClasses {
        labelled(&self.after.projected_c(), &self.labels_after())
    }
}

fn labelled(m: &[Vec<i128>], labels: &[Chord]) -> LabelledClasses {
    let mut out = BTreeMap::new();
    for (j, col) in m.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            out.insert((labels[i], labels[j]), x);
        }
    }
    out
}

fn collapsed_vertices(
    t: &Triangulation,
    a: &PolygonDissection,
) -> Result<BTreeSet<Vertex>, QuotientError> {
    Ok(complementary_arcs(t, a)?
        .into_iter()
        .map(|i| i as Vertex)
        .collect())
}

/// Whether the quiver of `t` has no arrow from the vertex of `gamma` to a
/// complementary arc of `a`.
pub fn is_admissible(
    t: &Triangulation,
    a: &PolygonDissection,
    gamma: Chord,
) -> Result<bool, QuotientError> {
    if !a.contains(&gamma) {
        return Err(DissectionError::NotADiagonal(gamma).into());
    }
    let collapsed = collapsed_vertices(t, a)?;
    let v = t.vertex_of(&gamma).expect("refinement contains gamma");
    let qp = quiver_from_triangulation(t);
    Ok(!qp
        .arrows()
        .iter()
        .any(|x| x.src == v && collapsed.contains(&x.tgt)))
}

/// Refinements of `a` admissible for `gamma`, sorted.
pub fn admissible_refinements(
    a: &PolygonDissection,
    gamma: Chord,
) -> Result<Vec<Triangulation>, QuotientError> {
    let mut out = Vec::new();
    for t in refinements(a) {
        if is_admissible(&t, a, gamma)? {
            out.push(t);
        }
    }
    Ok(out)
}

/// The induced tilt realised on the refinement `t`; the projection after
/// the tilt fails with `SupportViolation` when `t` is not admissible.
pub fn induced_tilt_via(
    t: &Triangulation,
    a: &PolygonDissection,
    gamma: Chord,
) -> Result<InducedTilt, QuotientError> {
    if !a.contains(&gamma) {
        return Err(DissectionError::NotADiagonal(gamma).into());
    }
    let collapsed = collapsed_vertices(t, a)?;
    let vertex = t.vertex_of(&gamma).expect("refinement contains gamma");
    let flipped = t.flip(gamma)?;
    let new_arc = t.replacement_in(&flipped).expect("a flip replaces one arc");
    let init = init_seed(quiver_from_triangulation(t));
    let after = tilt_forward(&init, vertex)?;
    Ok(InducedTilt {
        refinement: t.clone(),
        vertex,
        gamma,
        new_arc,
        before: project_any(&init, &collapsed)?,
        after: project_any(&after, &collapsed)?,
    })
}

/// The induced tilt on the first admissible refinement of `a`.
pub fn induced_tilt(a: &PolygonDissection, gamma: Chord) -> Result<InducedTilt, QuotientError> {
    let t = admissible_refinements(a, gamma)?
        .into_iter()
        .next()
        .ok_or_else(|| QuotientError::NoAdmissibleRefinement {
            dissection: a.to_string(),
            arc: gamma,
        })?;
    induced_tilt_via(&t, a, gamma)
}

/// Vertex state of the quotient-heart graph: the arcs labelling the
/// complement, and the projected classes in the frame of the heart's own
/// simples.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuotientState {
    pub arcs: Vec<Chord>,
    pub projected_c: Vec<Vec<i128>>,
}

impl QuotientState {
    fn local(mut arcs: Vec<Chord>) -> Self {
        arcs.sort();
        let n = arcs.len();
        let projected_c = (0..n)
            .map(|j| (0..n).map(|i| i128::from(i == j)).collect())
            .collect();
        QuotientState { arcs, projected_c }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyCollision {
    pub key: String,
    pub dissections: Vec<PolygonDissection>,
}

/// Classes carried along flips from the start dissection in one fixed frame,
/// compared whenever a flip reaches an already visited dissection.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalFrameReport {
    /// Flip edges followed.
    pub edges: usize,
    /// Edges reaching a visited dissection with identical labelled classes.
    pub consistent: usize,
    /// Edges reaching a visited dissection with classes equal up to column signs.
    pub consistent_up_to_sign: usize,
    /// Steps where the mutated quiver differs from the flipped refinement's quiver.
    pub quiver_mismatches: usize,
    /// Steps where a collapsed column left the collapsed support.
    pub support_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub vertices_left: usize,
    pub vertices_right: usize,
    pub bijection_ok: bool,
    pub edge_commute_ok: bool,
    pub collisions: Vec<KeyCollision>,
    /// Every admissible refinement gives the same labelled classes after each induced tilt.
    pub witness_independent: bool,
    /// Number of (dissection, arc) pairs, and of admissible refinements over all of them.
    pub induced_tilts: usize,
    pub admissible_witnesses: usize,
    pub global_frame: GlobalFrameReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientGraphs {
    pub dissections: ExchangeGraph<PolygonDissection>,
    pub quotient: ExchangeGraph<QuotientState>,
    pub report: QuotientReport,
}

/// Flip graph of the `m`-gon system with cell weights `weights`, the graph
/// of quotient hearts under induced tilts, and their comparison.
pub fn quotient_graph(
    m: usize,
    weights: &[usize],
    opts: BuildOptions,
) -> Result<QuotientGraphs, QuotientError> {
    let start = enumerate_dissections(m, weights)?
        .into_iter()
        .next()
        .expect("feasible systems have a dissection");
    let left = build(&PolygonFlips::forward(), start.clone(), opts)?;

    let local_key = |a: &PolygonDissection| content_key(&QuotientState::local(a.diagonal_list()));
    let mut by_key: BTreeMap<String, Vec<&GraphVertex<PolygonDissection>>> = BTreeMap::new();
    for v in &left.vertices {
        by_key.entry(local_key(&v.state)).or_default().push(v);
    }
    let collisions: Vec<KeyCollision> = by_key
        .iter()
        .filter(|(_, vs)| vs.len() > 1)
        .map(|(k, vs)| KeyCollision {
            key: k.clone(),
            dissections: vs.iter().map(|v| v.state.clone()).collect(),
        })
        .collect();
    // with collisions, fall back to the dissection keys
    let right_key = |a: &PolygonDissection, key: &str| -> String {
        if collisions.is_empty() {
            local_key(a)
        } else {
            key.to_string()
        }
    };
    let to_right: BTreeMap<&str, String> = left
        .vertices
        .iter()
        .map(|v| (v.key.as_str(), right_key(&v.state, &v.key)))
        .collect();
    let right_vertices: Vec<GraphVertex<QuotientState>> = left
        .vertices
        .iter()
        .map(|v| GraphVertex {
            key: to_right[v.key.as_str()].clone(),
            state: QuotientState::local(v.state.diagonal_list()),
        })
        .collect();
    let by_arcs: BTreeMap<Vec<Chord>, &GraphVertex<PolygonDissection>> = left
        .vertices
        .iter()
        .map(|v| (v.state.diagonal_list(), v))
        .collect();

    let mut right_edges = BTreeSet::new();
    let mut witness_independent = true;
    let mut induced_tilts = 0;
    let mut admissible_witnesses = 0;
    let mut unmatched = false;
    for v in &left.vertices {
        for (op, gamma) in v.state.diagonal_list().into_iter().enumerate() {
            let witnesses = admissible_refinements(&v.state, gamma)?;
            let Some(first) = witnesses.first() else {
                return Err(QuotientError::NoAdmissibleRefinement {
                    dissection: v.state.to_string(),
                    arc: gamma,
                });
            };
            induced_tilts += 1;
            admissible_witnesses += witnesses.len();
            let tilt = induced_tilt_via(first, &v.state, gamma)?;
            let reference = tilt.labelled_after();
            for t in &witnesses[1..] {
                if induced_tilt_via(t, &v.state, gamma)?.labelled_after() != reference {
                    witness_independent = false;
                }
            }
            let mut arcs = tilt.labels_after();
            arcs.sort();
            match by_arcs.get(&arcs) {
                Some(target) => {
                    right_edges.insert(Edge {
                        source: to_right[v.key.as_str()].clone(),
                        target: to_right[target.key.as_str()].clone(),
                        op,
                    });
                }
                None => unmatched = true,
            }
        }
    }

    let mapped_left: BTreeSet<Edge> = left
        .edges
        .iter()
        .map(|e| Edge {
            source: to_right[e.source.as_str()].clone(),
            target: to_right[e.target.as_str()].clone(),
            op: e.op,
        })
        .collect();
    let right_keys: BTreeSet<&str> = right_vertices.iter().map(|v| v.key.as_str()).collect();
    let report = QuotientReport {
        vertices_left: left.vertex_count(),
        vertices_right: right_keys.len(),
        bijection_ok: collisions.is_empty() && right_keys.len() == left.vertex_count(),
        edge_commute_ok: !unmatched && mapped_left == right_edges,
        collisions,
        witness_independent,
        induced_tilts,
        admissible_witnesses,
        global_frame: global_frame(&left, &start)?,
    };
    let quotient = ExchangeGraph {
        generator: "quotient hearts under induced tilts".to_string(),
        start: to_right[left.start.as_str()].clone(),
        truncated: left.truncated,
        vertices: right_vertices,
        edges: right_edges,
    };
    Ok(QuotientGraphs {
        dissections: left,
        quotient,
        report,
    })
}

/// Projected class entries keyed by (row arc, column arc).
pub type LabelledClasses = BTreeMap<(Chord, Chord), i128>;

/// A seed on a refinement of the current dissection, with the arc carried by
/// each quiver vertex.
#[derive(Clone, Debug)]
struct FramedSeed {
    seed: Seed,
    t: Triangulation,
    labels: BTreeMap<Vertex, Chord>,
}

impl FramedSeed {
    fn vertex_of(&self, arc: Chord) -> Vertex {
        *self
            .labels
            .iter()
            .find(|(_, c)| **c == arc)
            .expect("arc is carried by a vertex")
            .0
    }

    /// Tilts forward at the vertex of `arc` and flips the refinement to match.
    fn flip(&mut self, arc: Chord, report: &mut GlobalFrameReport) -> Result<(), QuotientError> {
        let v = self.vertex_of(arc);
        let flipped = self.t.flip(arc)?;
        let new_arc = self
            .t
            .replacement_in(&flipped)
            .expect("a flip replaces one arc");
        self.seed = tilt_forward(&self.seed, v)?;
        self.labels.insert(v, new_arc);
        self.t = flipped;
        let expected = arrows_by_arc(&quiver_from_triangulation(&self.t), &arc_labels(&self.t));
        if arrows_by_arc(self.seed.qp(), &self.labels) != expected {
            report.quiver_mismatches += 1;
        }
        Ok(())
    }

    /// Projected classes keyed by (row arc, column arc).
    fn labelled_classes(&self, collapsed: &BTreeSet<Vertex>) -> Option<LabelledClasses> {
        let q = project_any(&self.seed, collapsed).ok()?;
        let labels: Vec<Chord> = q.complement().iter().map(|v| self.labels[v]).collect();
        Some(labelled(&q.projected_c(), &labels))
    }
}

fn equal_up_to_column_sign(x: &LabelledClasses, y: &LabelledClasses) -> bool {
    if x.keys().ne(y.keys()) {
        return false;
    }
    let columns: BTreeSet<Chord> = x.keys().map(|k| k.1).collect();
    columns.iter().all(|&col| {
        let entries = || {
            x.iter()
                .filter(move |(k, _)| k.1 == col)
                .map(|(k, v)| (*v, y[k]))
        };
        entries().all(|(a, b)| a == b) || entries().all(|(a, b)| a == -b)
    })
}

/// Shortest walk of flips at complementary arcs from `t` to a refinement
/// admissible for `gamma`.
fn path_to_admissible(
    t: &Triangulation,
    a: &PolygonDissection,
    gamma: Chord,
) -> Result<Vec<Chord>, QuotientError> {
    let mut prev: BTreeMap<Triangulation, Option<(Triangulation, Chord)>> =
        BTreeMap::from([(t.clone(), None)]);
    let mut queue = VecDeque::from([t.clone()]);
    while let Some(cur) = queue.pop_front() {
        if is_admissible(&cur, a, gamma)? {
            let mut path = Vec::new();
            let mut at = cur;
            while let Some(Some((from, arc))) = prev.get(&at).cloned() {
                path.push(arc);
                at = from;
            }
            path.reverse();
            return Ok(path);
        }
        for c in cur.diagonals().difference(a.diagonals()) {
            let next = cur.flip(*c)?;
            if !prev.contains_key(&next) {
                prev.insert(next.clone(), Some((cur.clone(), *c)));
                queue.push_back(next);
            }
        }
    }
    Err(QuotientError::NoAdmissibleRefinement {
        dissection: a.to_string(),
        arc: gamma,
    })
}

fn global_frame(
    left: &ExchangeGraph<PolygonDissection>,
    start: &PolygonDissection,
) -> Result<GlobalFrameReport, QuotientError> {
    let mut report = GlobalFrameReport::default();
    let t0 = refinements(start)
        .into_iter()
        .next()
        .expect("every dissection has a refinement");
    let collapsed = collapsed_vertices(&t0, start)?;
    let first = FramedSeed {
        seed: init_seed(quiver_from_triangulation(&t0)),
        labels: arc_labels(&t0),
        t: t0,
    };
    let mut states: BTreeMap<&str, (FramedSeed, LabelledClasses)> = BTreeMap::new();
    let start_classes = first
        .labelled_classes(&collapsed)
        .expect("initial seed projects");
    states.insert(left.start.as_str(), (first, start_classes));
    let mut out_edges: BTreeMap<&str, Vec<&Edge>> = BTreeMap::new();
    for e in &left.edges {
        out_edges.entry(e.source.as_str()).or_default().push(e);
    }
    let mut queue = VecDeque::from([left.start.as_str()]);
    while let Some(key) = queue.pop_front() {
        let a = left.state(key).expect("visited vertex");
        let here = states[key].0.clone();
        for e in out_edges.get(key).into_iter().flatten() {
            let gamma = a.diagonal_list()[e.op];
            let mut s = here.clone();
            for arc in path_to_admissible(&s.t, a, gamma)? {
                s.flip(arc, &mut report)?;
            }
            s.flip(gamma, &mut report)?;
            report.edges += 1;
            let Some(classes) = s.labelled_classes(&collapsed) else {
                report.support_violations += 1;
                continue;
            };
            match states.get(e.target.as_str()) {
                Some((_, seen)) => {
                    if *seen == classes {
                        report.consistent += 1;
                    } else if equal_up_to_column_sign(seen, &classes) {
                        report.consistent_up_to_sign += 1;
                    }
                }
                None => {
                    states.insert(e.target.as_str(), (s, classes));
                    queue.push_back(e.target.as_str());
                }
            }
        }
    }
    Ok(report)
}
