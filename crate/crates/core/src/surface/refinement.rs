use std::collections::{BTreeSet, VecDeque};

use super::dissection::{Chord, DissectionError, PolygonDissection};
use super::triangulation::{triangulate_polygon, Triangulation};

/// Triangulations containing `a`: each cell triangulated independently.
pub fn refinements(a: &PolygonDissection) -> Vec<Triangulation> {
    let mut partial: Vec<BTreeSet<Chord>> = vec![a.diagonals().clone()];
    for cell in a.cells() {
        let options = triangulate_polygon(&cell);
        partial = partial
            .iter()
            .flat_map(|base| {
                options.iter().map(move |extra| {
                    let mut d = base.clone();
                    d.extend(extra.iter().copied());
                    d
                })
            })
            .collect();
    }
    let mut out: Vec<Triangulation> = partial
        .into_iter()
        .map(|d| {
            PolygonDissection::from_parts_unchecked(a.m(), d)
                .try_into()
                .expect("triangulated cells give a triangulation")
        })
        .collect();
    out.sort();
    out
}

/// Positions (in `t`'s sorted diagonal list, i.e. quiver vertices) of the
/// diagonals of `t` that are not in `a`.
pub fn complementary_arcs(
    t: &Triangulation,
    a: &PolygonDissection,
) -> Result<BTreeSet<usize>, DissectionError> {
    if t.m() != a.m() || !a.diagonals().is_subset(t.diagonals()) {
        return Err(DissectionError::NotARefinement);
    }
    Ok(t.diagonals()
        .iter()
        .enumerate()
        .filter(|(_, c)| !a.contains(c))
        .map(|(i, _)| i)
        .collect())
}

/// Whether flipping `gamma` in `t` and forgetting the complementary arcs
/// reproduces the forward flip of `a` at `gamma`.
pub fn realises_flip(
    t: &Triangulation,
    a: &PolygonDissection,
    gamma: Chord,
) -> Result<bool, DissectionError> {
    let target = a.flip_forward(gamma)?;
    let flipped = t.flip(gamma)?;
    let extra: BTreeSet<Chord> = t.diagonals().difference(a.diagonals()).copied().collect();
    let forgotten: BTreeSet<Chord> = flipped.diagonals().difference(&extra).copied().collect();
    Ok(&forgotten == target.diagonals())
}

/// First refinement of `a` whose classical flip at `gamma` refines the forward
/// flip of `a` at `gamma`.
pub fn refine_flip_witness(
    a: &PolygonDissection,
    gamma: Chord,
) -> Result<Triangulation, DissectionError> {
    if !a.contains(&gamma) {
        return Err(DissectionError::NotADiagonal(gamma));
    }
    for t in refinements(a) {
        if realises_flip(&t, a, gamma)? {
            return Ok(t);
        }
    }
    Err(DissectionError::NoWitness(gamma))
}

/// Number of connected components of the graph on `refinements(a)` whose
/// edges are flips at complementary arcs.
pub fn refinement_graph_components(a: &PolygonDissection) -> usize {
    let all = refinements(a);
    let members: BTreeSet<&Triangulation> = all.iter().collect();
    let mut seen: BTreeSet<Triangulation> = BTreeSet::new();
    let mut components = 0;
    for start in &all {
        if seen.contains(start) {
            continue;
        }
        components += 1;
        seen.insert(start.clone());
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(t) = queue.pop_front() {
            for c in t.diagonals().difference(a.diagonals()) {
                let next = t.flip(*c).expect("complementary arc is a diagonal");
                debug_assert!(members.contains(&next));
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    components
}
