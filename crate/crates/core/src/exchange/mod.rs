//! Exchange graphs: BFS closure of a state under an indexed family of
//! operators, with analysis and export.

mod rotation;
mod systems;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use rotation::{rotation_quotient, RotationQuotient};
pub use systems::{PolygonFlips, TorusFlips};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExchangeError {
    #[error("operator {op} failed at state {key}: {message}")]
    OperatorFailure {
        key: String,
        op: usize,
        message: String,
    },
    #[error("graph is truncated")]
    Truncated,
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// A state space with indexed operators. Operator `i` must be defined for
/// every `i < operator_count(state)`.
pub trait FlipSystem: Sync {
    type State: Clone + Send + Sync;
    type Error: fmt::Display;

    fn operator_count(&self, s: &Self::State) -> usize;
    fn apply(&self, s: &Self::State, op: usize) -> Result<Self::State, Self::Error>;
    fn key(&self, s: &Self::State) -> String;
    fn describe(&self) -> String;
}

/// First 16 hex digits of the SHA-256 of the compact JSON form of `value`.
pub fn content_key<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("state serializes");
    let digest = Sha256::digest(&bytes);
    hex::encode(&digest[..8])
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub op: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphVertex<S> {
    pub key: String,
    pub state: S,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeGraph<S> {
    pub generator: String,
    pub start: String,
    pub truncated: bool,
    /// In discovery order: BFS layer by layer, each layer sorted by key.
    pub vertices: Vec<GraphVertex<S>>,
    pub edges: BTreeSet<Edge>,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub limit: usize,
    pub max_depth: Option<usize>,
    pub jobs: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            limit: 1_000_000,
            max_depth: None,
            jobs: 1,
        }
    }
}

impl<S> ExchangeGraph<S> {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn keys(&self) -> BTreeSet<&str> {
        self.vertices.iter().map(|v| v.key.as_str()).collect()
    }

    pub fn state(&self, key: &str) -> Option<&S> {
        self.vertices
            .iter()
            .find(|v| v.key == key)
            .map(|v| &v.state)
    }

    pub fn out_degrees(&self) -> BTreeMap<&str, usize> {
        let mut d: BTreeMap<&str, usize> =
            self.vertices.iter().map(|v| (v.key.as_str(), 0)).collect();
        for e in &self.edges {
            *d.get_mut(e.source.as_str())
                .expect("edge source is a vertex") += 1;
        }
        d
    }

    pub fn in_degrees(&self) -> BTreeMap<&str, usize> {
        let mut d: BTreeMap<&str, usize> =
            self.vertices.iter().map(|v| (v.key.as_str(), 0)).collect();
        for e in &self.edges {
            *d.get_mut(e.target.as_str())
                .expect("edge target is a vertex") += 1;
        }
        d
    }
}

type Expansion<S> = Vec<(usize, String, S)>;

fn expand<F: FlipSystem>(
    sys: &F,
    s: &F::State,
    key: &str,
) -> Result<Expansion<F::State>, ExchangeError> {
    (0..sys.operator_count(s))
        .map(|op| {
            let t = sys
                .apply(s, op)
                .map_err(|e| ExchangeError::OperatorFailure {
                    key: key.to_string(),
                    op,
                    message: e.to_string(),
                })?;
            Ok((op, sys.key(&t), t))
        })
        .collect()
}

/// BFS closure of `start`. The result does not depend on `opts.jobs`.
pub fn build<F: FlipSystem>(
    sys: &F,
    start: F::State,
    opts: BuildOptions,
) -> Result<ExchangeGraph<F::State>, ExchangeError> {
    let pool = match opts.jobs {
        0 | 1 => None,
        n => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ExchangeError::Pool(e.to_string()))?,
        ),
    };
    let start_key = sys.key(&start);
    let mut known: BTreeSet<String> = BTreeSet::from([start_key.clone()]);
    let mut vertices = vec![GraphVertex {
        key: start_key.clone(),
        state: start,
    }];
    let mut edges = BTreeSet::new();
    let mut truncated = false;
    let mut layer = 0..1;
    let mut depth = 0;
    while !layer.is_empty() {
        if opts.max_depth.is_some_and(|d| depth >= d) {
            truncated = true;
            break;
        }
        let frontier = &vertices[layer.clone()];
        let expansions: Vec<Expansion<F::State>> = if let Some(pool) = &pool {
            pool.install(|| {
                frontier
                    .par_iter()
                    .map(|v| expand(sys, &v.state, &v.key))
                    .collect::<Result<_, _>>()
            })?
        } else {
            frontier
                .iter()
                .map(|v| expand(sys, &v.state, &v.key))
                .collect::<Result<_, _>>()?
        };
        let mut next: BTreeMap<String, F::State> = BTreeMap::new();
        for (v, exp) in frontier.iter().zip(expansions) {
            for (op, key, state) in exp {
                let admitted = known.contains(&key)
                    || next.contains_key(&key)
                    || if vertices.len() + next.len() < opts.limit {
                        next.insert(key.clone(), state);
                        true
                    } else {
                        false
                    };
                if admitted {
                    edges.insert(Edge {
                        source: v.key.clone(),
                        target: key,
                        op,
                    });
                } else {
                    truncated = true;
                }
            }
        }
        let begin = vertices.len();
        for (key, state) in next {
            known.insert(key.clone());
            vertices.push(GraphVertex { key, state });
        }
        layer = begin..vertices.len();
        depth += 1;
    }
    Ok(ExchangeGraph {
        generator: sys.describe(),
        start: start_key,
        truncated,
        vertices,
        edges,
    })
}

/// Weakly connected components, each sorted, listed by smallest key.
pub fn components<S>(g: &ExchangeGraph<S>) -> Result<Vec<Vec<String>>, ExchangeError> {
    if g.truncated {
        return Err(ExchangeError::Truncated);
    }
    let mut adj: BTreeMap<&str, Vec<&str>> = g
        .vertices
        .iter()
        .map(|v| (v.key.as_str(), vec![]))
        .collect();
    for e in &g.edges {
        adj.get_mut(e.source.as_str()).unwrap().push(&e.target);
        adj.get_mut(e.target.as_str()).unwrap().push(&e.source);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &k in adj.keys() {
        if !seen.insert(k) {
            continue;
        }
        let mut comp = vec![k.to_string()];
        let mut queue = VecDeque::from([k]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if seen.insert(y) {
                    comp.push(y.to_string());
                    queue.push_back(y);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    Ok(out)
}

/// Whether every vertex has in- and out-degree `m`.
pub fn regularity<S>(g: &ExchangeGraph<S>, m: usize) -> Result<bool, ExchangeError> {
    if g.truncated {
        return Err(ExchangeError::Truncated);
    }
    Ok(g.out_degrees().values().all(|&d| d == m) && g.in_degrees().values().all(|&d| d == m))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz digraph; nodes are keys labelled by `label(state)`, edges by
/// operator index.
pub fn export_dot<S>(g: &ExchangeGraph<S>, label: impl Fn(&S) -> String) -> String {
    let mut out = String::from("digraph {\n");
    for v in &g.vertices {
        writeln!(
            out,
            "  \"{}\" [label=\"{}\"];",
            v.key,
            dot_escape(&label(&v.state))
        )
        .unwrap();
    }
    for e in &g.edges {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            e.source, e.target, e.op
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn export_json<S: Serialize>(g: &ExchangeGraph<S>) -> String {
    let mut s = serde_json::to_string_pretty(g).expect("graph serializes");
    s.push('\n');
    s
}

pub fn parse_json<S: for<'de> Deserialize<'de>>(
    text: &str,
) -> Result<ExchangeGraph<S>, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{enumerate_dissections, PolygonDissection};

    fn polygon(m: usize, w: &[usize]) -> ExchangeGraph<PolygonDissection> {
        let start = enumerate_dissections(m, w).unwrap().remove(0);
        build(&PolygonFlips::forward(), start, BuildOptions::default()).unwrap()
    }

    #[test]
    fn hexagon_graph() {
        let g = polygon(6, &[1, 1, 2]);
        assert_eq!(g.vertex_count(), 21);
        assert_eq!(g.edge_count(), 42);
        assert!(!g.truncated);
        assert!(regularity(&g, 2).unwrap());
        assert!(!regularity(&g, 3).unwrap());
    }

    #[test]
    fn pentagon_graph_is_a_cycle() {
        let g = polygon(5, &[1, 2]);
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 5);
        assert!(regularity(&g, 1).unwrap());
        assert_eq!(components(&g).unwrap().len(), 1);
    }

    #[test]
    fn limit_truncates() {
        let start = enumerate_dissections(6, &[1, 1, 2]).unwrap().remove(0);
        let g = build(
            &PolygonFlips::forward(),
            start,
            BuildOptions {
                limit: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert!(g.edges.is_empty());
        assert!(g.truncated);
        assert_eq!(components(&g), Err(ExchangeError::Truncated));
    }

    #[test]
    fn single_cell_is_isolated() {
        let g = polygon(6, &[4]);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(components(&g).unwrap().len(), 1);
        let dot = export_dot(&g, |_| String::new());
        assert_eq!(
            dot,
            format!("digraph {{\n  \"{}\" [label=\"\"];\n}}\n", g.start)
        );
    }

    #[test]
    fn parallel_build_is_identical() {
        let start = enumerate_dissections(7, &[1, 1, 1, 2]).unwrap().remove(0);
        let one = build(
            &PolygonFlips::forward(),
            start.clone(),
            BuildOptions::default(),
        )
        .unwrap();
        let four = build(
            &PolygonFlips::forward(),
            start,
            BuildOptions {
                jobs: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(export_json(&one), export_json(&four));
    }

    #[test]
    fn json_round_trip() {
        let g = polygon(5, &[1, 2]);
        let back: ExchangeGraph<PolygonDissection> = parse_json(&export_json(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn depth_bound() {
        let start = enumerate_dissections(5, &[1, 2]).unwrap().remove(0);
        let g = build(
            &PolygonFlips::forward(),
            start,
            BuildOptions {
                max_depth: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert!(g.truncated);
    }
}
