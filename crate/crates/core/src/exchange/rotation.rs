use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{content_key, Edge, ExchangeGraph, GraphVertex};
use crate::surface::PolygonDissection;

/// Quotient of a polygon flip graph by the rotations `i -> i + 1 mod m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationQuotient {
    pub graph: ExchangeGraph<PolygonDissection>,
    /// Orbit size of each representative vertex.
    pub vertex_orbits: BTreeMap<String, usize>,
    /// Each quotient edge with the size of the edge orbit it stands for.
    pub edge_orbits: Vec<(Edge, usize)>,
}

impl RotationQuotient {
    pub fn orbit_sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.vertex_orbits.values().copied().collect();
        v.sort_unstable();
        v
    }
}

/// Each orbit is represented by its member with the smallest key; a quotient
/// edge keeps the operator index it has at that representative.
pub fn rotation_quotient(g: &ExchangeGraph<PolygonDissection>) -> RotationQuotient {
    let Some(first) = g.vertices.first() else {
        return RotationQuotient {
            graph: g.clone(),
            vertex_orbits: BTreeMap::new(),
            edge_orbits: vec![],
        };
    };
    let m = first.state.m();
    let key_of: BTreeMap<PolygonDissection, &str> = g
        .vertices
        .iter()
        .map(|v| (v.state.clone(), v.key.as_str()))
        .collect();
    let rotate_key = |key: &str, k: usize| -> String {
        let s = g.state(key).expect("edge endpoint is a vertex").rotated(k);
        key_of
            .get(&s)
            .map(|k| k.to_string())
            .unwrap_or_else(|| content_key(&s))
    };

    let mut rep: BTreeMap<String, String> = BTreeMap::new();
    let mut vertex_orbits = BTreeMap::new();
    for v in &g.vertices {
        if rep.contains_key(&v.key) {
            continue;
        }
        let orbit: BTreeSet<String> = (0..m).map(|k| rotate_key(&v.key, k)).collect();
        let r = orbit.first().unwrap().clone();
        for k in &orbit {
            rep.insert(k.clone(), r.clone());
        }
        vertex_orbits.insert(r, orbit.len());
    }

    let by_ends: BTreeMap<(&str, &str), &Edge> = g
        .edges
        .iter()
        .map(|e| ((e.source.as_str(), e.target.as_str()), e))
        .collect();
    let mut seen: BTreeSet<&Edge> = BTreeSet::new();
    let mut edge_orbits = Vec::new();
    for e in &g.edges {
        if seen.contains(e) {
            continue;
        }
        let mut orbit: BTreeSet<&Edge> = BTreeSet::new();
        for k in 0..m {
            let (s, t) = (rotate_key(&e.source, k), rotate_key(&e.target, k));
            if let Some(&img) = by_ends.get(&(s.as_str(), t.as_str())) {
                orbit.insert(img);
            }
        }
        let src_rep = &rep[&e.source];
        let label = orbit
            .iter()
            .find(|x| &x.source == src_rep)
            .copied()
            .unwrap_or(e);
        edge_orbits.push((
            Edge {
                source: src_rep.clone(),
                target: rep[&label.target].clone(),
                op: label.op,
            },
            orbit.len(),
        ));
        seen.extend(orbit);
    }
    edge_orbits.sort();

    let vertices = g
        .vertices
        .iter()
        .filter(|v| vertex_orbits.contains_key(&v.key))
        .map(|v| GraphVertex {
            key: v.key.clone(),
            state: v.state.clone(),
        })
        .collect();
    let graph = ExchangeGraph {
        generator: format!("{} modulo rotation", g.generator),
        start: rep
            .get(&g.start)
            .cloned()
            .unwrap_or_else(|| g.start.clone()),
        truncated: g.truncated,
        vertices,
        edges: edge_orbits.iter().map(|(e, _)| e.clone()).collect(),
    };
    RotationQuotient {
        graph,
        vertex_orbits,
        edge_orbits,
    }
}
