//! Class-level heart seeds: a QP with the classes of the simples (`C`) and of
//! the dual silting summands (`G`), and their simple tilts.
//!
//! `Ext^1(S_i, S_j)` has dimension `#arrows(j -> i)`. Matrices are stored as
//! lists of columns.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qp::{mutate, Arrow, Qp, QpError, Term, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error(transparent)]
    Qp(#[from] QpError),
    #[error("vertex {0} is not in the seed")]
    UnknownVertex(Vertex),
    #[error("matrix {name} must be {n}x{n}")]
    BadShape { name: &'static str, n: usize },
    #[error("class arithmetic left the 128-bit range")]
    Overflow,
    #[error("bad tilt step {0:?}; expected e.g. \"3+\" or \"2-\"")]
    BadStep(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// One step of a tilt walk, written `k+` or `k-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub vertex: Vertex,
    pub direction: Direction,
}

impl FromStr for Step {
    type Err = SeedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || SeedError::BadStep(s.to_string());
        let (num, direction) = if let Some(n) = t.strip_suffix('+') {
            (n, Direction::Forward)
        } else if let Some(n) = t.strip_suffix('-').or_else(|| t.strip_suffix('\u{2212}')) {
            (n, Direction::Backward)
        } else {
            return Err(bad());
        };
        let vertex = num.trim().parse().map_err(|_| bad())?;
        Ok(Step { vertex, direction })
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.direction {
            Direction::Forward => '+',
            Direction::Backward => '-',
        };
        write!(f, "{}{sign}", self.vertex)
    }
}

/// Parses `"1+,2-,..."`; blank input is the empty walk.
pub fn parse_script(script: &str) -> Result<Vec<Step>, SeedError> {
    script
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Matrices are stored column-major in flat vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SeedDoc", into = "SeedDoc")]
pub struct Seed {
    qp: Arc<Qp>,
    c: Vec<i128>,
    g: Vec<i128>,
}

/// Wire form: the QP fields plus `"C"` and `"G"` as lists of columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedDoc {
    pub vertices: Vec<Vertex>,
    pub arrows: Vec<Arrow>,
    #[serde(default)]
    pub potential: Vec<Term>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<i128>>,
    #[serde(rename = "G")]
    pub g: Vec<Vec<i128>>,
}

impl TryFrom<SeedDoc> for Seed {
    type Error = SeedError;

    fn try_from(doc: SeedDoc) -> Result<Self, Self::Error> {
        let qp = Qp::try_from(crate::qp::QpDoc {
            vertices: doc.vertices,
            arrows: doc.arrows,
            potential: doc.potential,
        })?;
        Seed::new(qp, doc.c, doc.g)
    }
}

impl From<Seed> for SeedDoc {
    fn from(s: Seed) -> Self {
        let (c, g) = (s.c_columns(), s.g_columns());
        let doc = crate::qp::QpDoc::from(Arc::unwrap_or_clone(s.qp));
        SeedDoc {
            vertices: doc.vertices,
            arrows: doc.arrows,
            potential: doc.potential,
            c,
            g,
        }
    }
}

fn flatten(name: &'static str, m: Vec<Vec<i128>>, n: usize) -> Result<Vec<i128>, SeedError> {
    if m.len() != n || m.iter().any(|col| col.len() != n) {
        return Err(SeedError::BadShape { name, n });
    }
    Ok(m.into_iter().flatten().collect())
}

fn identity(n: usize) -> Vec<i128> {
    (0..n * n).map(|i| i128::from(i % (n + 1) == 0)).collect()
}

/// `col += k * other`, checked.
fn add_multiple(col: &mut [i128], k: i128, other: &[i128]) -> Result<(), SeedError> {
    if k == 0 {
        return Ok(());
    }
    let narrow_k = i64::try_from(k).ok();
    for (x, &y) in col.iter_mut().zip(other) {
        // a product of two i64 values cannot overflow i128
        let ky = match (narrow_k, i64::try_from(y)) {
            (Some(a), Ok(b)) => Some(i128::from(a) * i128::from(b)),
            _ => k.checked_mul(y),
        };
        let Some(v) = ky.and_then(|ky| x.checked_add(ky)) else {
            return Err(SeedError::Overflow);
        };
        *x = v;
    }
    Ok(())
}

fn negate(col: &mut [i128]) -> Result<(), SeedError> {
    for x in col {
        let Some(v) = x.checked_neg() else {
            return Err(SeedError::Overflow);
        };
        *x = v;
    }
    Ok(())
}

fn columns(m: &[i128], n: usize) -> std::slice::ChunksExact<'_, i128> {
    m.chunks_exact(n.max(1))
}

impl Seed {
    /// Takes `C` and `G` as lists of columns and checks shapes only; the
    /// duality pairing is reported by [`duality_check`].
    pub fn new(qp: Qp, c: Vec<Vec<i128>>, g: Vec<Vec<i128>>) -> Result<Self, SeedError> {
        let n = qp.vertices().len();
        let c = flatten("C", c, n)?;
        let g = flatten("G", g, n)?;
        Ok(Self {
            qp: Arc::new(qp),
            c,
            g,
        })
    }

    pub fn qp(&self) -> &Qp {
        &self.qp
    }

    /// Columns of `C`: the classes of the simples.
    pub fn c(&self) -> std::slice::ChunksExact<'_, i128> {
        columns(&self.c, self.rank())
    }

    /// Columns of `G`: the classes of the silting summands.
    pub fn g(&self) -> std::slice::ChunksExact<'_, i128> {
        columns(&self.g, self.rank())
    }

    pub fn c_column(&self, j: usize) -> &[i128] {
        let n = self.rank();
        &self.c[j * n..(j + 1) * n]
    }

    pub fn g_column(&self, j: usize) -> &[i128] {
        let n = self.rank();
        &self.g[j * n..(j + 1) * n]
    }

    pub fn c_columns(&self) -> Vec<Vec<i128>> {
        self.c().map(<[i128]>::to_vec).collect()
    }

    pub fn g_columns(&self) -> Vec<Vec<i128>> {
        self.g().map(<[i128]>::to_vec).collect()
    }

    pub fn rank(&self) -> usize {
        self.qp.vertices().len()
    }

    /// Matrix index of vertex `v`: its position in the sorted vertex set.
    pub fn index_of(&self, v: Vertex) -> Result<usize, SeedError> {
        self.qp
            .vertices()
            .iter()
            .position(|&x| x == v)
            .ok_or(SeedError::UnknownVertex(v))
    }

    pub fn vertex_at(&self, i: usize) -> Vertex {
        *self.qp.vertices().iter().nth(i).expect("index below rank")
    }

    /// Whether every column of `C` is entrywise `>= 0` or entrywise `<= 0`.
    pub fn sign_coherent(&self) -> bool {
        self.c()
            .all(|col| col.iter().all(|&x| x >= 0) || col.iter().all(|&x| x <= 0))
    }

    /// `det C`, computed exactly.
    pub fn det_c(&self) -> BigInt {
        determinant(&self.c_columns())
    }

    /// Same QP arrow multiset and class data.
    pub fn same_classes(&self, other: &Seed) -> bool {
        self.c == other.c
            && self.g == other.g
            && (Arc::ptr_eq(&self.qp, &other.qp)
                || (self.qp.vertices() == other.qp.vertices()
                    && self.qp.quiver().arrow_multiset() == other.qp.quiver().arrow_multiset()))
    }
}

pub fn init_seed(qp: Qp) -> Seed {
    let n = qp.vertices().len();
    Seed {
        qp: Arc::new(qp),
        c: identity(n),
        g: identity(n),
    }
}

type Classes = (Vec<i128>, Vec<i128>);

/// Class update at matrix index `ki`, where `ext(j)` counts the extensions
/// between `k` and `j` in the direction of the tilt.
fn tilt_classes(s: &Seed, ki: usize, ext: impl Fn(usize) -> i128) -> Result<Classes, SeedError> {
    let (mut c, mut g) = (Vec::new(), Vec::new());
    tilt_classes_into(s, ki, ext, &mut c, &mut g)?;
    Ok((c, g))
}

fn tilt_classes_into(
    s: &Seed,
    ki: usize,
    ext: impl Fn(usize) -> i128,
    c: &mut Vec<i128>,
    g: &mut Vec<i128>,
) -> Result<(), SeedError> {
    let n = s.rank();
    let old_ck = s.c_column(ki);
    c.clear();
    c.extend_from_slice(&s.c);
    for (j, col) in c.chunks_exact_mut(n).enumerate() {
        if j == ki {
            negate(col)?;
        } else {
            add_multiple(col, ext(j), old_ck)?;
        }
    }
    g.clear();
    g.extend_from_slice(&s.g);
    let gk = &mut g[ki * n..(ki + 1) * n];
    negate(gk)?;
    for i in (0..n).filter(|&i| i != ki) {
        add_multiple(gk, ext(i), s.g_column(i))?;
    }
    Ok(())
}

fn tilt(s: &Seed, k: Vertex, direction: Direction) -> Result<Seed, SeedError> {
    let ki = s.index_of(k)?;
    let mut ext = vec![0i128; s.rank()];
    for a in s.qp.arrows() {
        let other = match direction {
            Direction::Forward if a.src == k => a.tgt,
            Direction::Backward if a.tgt == k => a.src,
            _ => continue,
        };
        ext[s.index_of(other)?] += 1;
    }
    let (c, g) = tilt_classes(s, ki, |j| ext[j])?;
    let qp = Arc::new(mutate(&s.qp, k)?.with_canonical_arrow_names());
    Ok(Seed { qp, c, g })
}

/// Simple forward tilt at `k`: `c_k -> -c_k`, `c_j -> c_j + #(k->j) c_k`,
/// `g_k -> -g_k + sum_i #(k->i) g_i`, and the QP mutates at `k`.
pub fn tilt_forward(s: &Seed, k: Vertex) -> Result<Seed, SeedError> {
    tilt(s, k, Direction::Forward)
}

/// Inverse of [`tilt_forward`]: the same rule with arrows into `k`.
pub fn tilt_backward(s: &Seed, k: Vertex) -> Result<Seed, SeedError> {
    tilt(s, k, Direction::Backward)
}

pub fn apply_step(s: &Seed, step: Step) -> Result<Seed, SeedError> {
    tilt(s, step.vertex, step.direction)
}

/// Memoized QP mutation for long tilt walks. QPs are interned, so a walk
/// that revisits a QP reuses its arrow counts and stored mutations.
#[derive(Debug, Default)]
pub struct MutationCache {
    interned: FxHashMap<Qp, Arc<Qp>>,
    // keyed by the address of an interned QP, which the node keeps alive
    nodes: FxHashMap<usize, CacheNode>,
    scratch: (Vec<i128>, Vec<i128>),
}

#[derive(Debug)]
struct CacheNode {
    qp: Arc<Qp>,
    vertices: Vec<Vertex>,
    /// `counts[i * n + j]` is the number of arrows `i -> j`.
    counts: Vec<i128>,
    mutations: Vec<Option<Arc<Qp>>>,
}

impl CacheNode {
    fn new(qp: Arc<Qp>) -> Self {
        let vertices: Vec<Vertex> = qp.vertices().iter().copied().collect();
        let n = vertices.len();
        let mut counts = vec![0; n * n];
        for a in qp.arrows() {
            let i = vertices
                .binary_search(&a.src)
                .expect("arrow source is a vertex");
            let j = vertices
                .binary_search(&a.tgt)
                .expect("arrow target is a vertex");
            counts[i * n + j] += 1;
        }
        CacheNode {
            qp,
            vertices,
            counts,
            mutations: vec![None; n],
        }
    }
}

impl MutationCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct QPs seen.
    pub fn len(&self) -> usize {
        self.interned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interned.is_empty()
    }

    fn intern(&mut self, qp: &Arc<Qp>) -> Arc<Qp> {
        if let Some(q) = self.interned.get(&**qp) {
            return q.clone();
        }
        self.interned.insert((**qp).clone(), qp.clone());
        qp.clone()
    }

    /// Node of an interned QP equal to `qp`.
    fn node_key(&mut self, qp: &Arc<Qp>) -> usize {
        let key = Arc::as_ptr(qp) as usize;
        if self
            .nodes
            .get(&key)
            .is_some_and(|node| Arc::ptr_eq(&node.qp, qp))
        {
            return key;
        }
        let qp = self.intern(qp);
        let key = Arc::as_ptr(&qp) as usize;
        self.nodes.entry(key).or_insert_with(|| CacheNode::new(qp));
        key
    }

    /// Same result as [`apply_step`].
    pub fn apply_step(&mut self, s: &Seed, step: Step) -> Result<Seed, SeedError> {
        let mut next = s.clone();
        self.step_in_place(&mut next, step)?;
        Ok(next)
    }

    /// Replaces `s` by [`apply_step`]`(s, step)`. On error `s` is unchanged.
    pub fn step_in_place(&mut self, s: &mut Seed, step: Step) -> Result<(), SeedError> {
        let key = self.node_key(&s.qp);
        let node = &self.nodes[&key];
        let k = step.vertex;
        let ki = node
            .vertices
            .binary_search(&k)
            .map_err(|_| SeedError::UnknownVertex(k))?;
        let n = node.vertices.len();
        let counts = &node.counts;
        let (c, g) = &mut self.scratch;
        match step.direction {
            Direction::Forward => tilt_classes_into(s, ki, |j| counts[ki * n + j], c, g)?,
            Direction::Backward => tilt_classes_into(s, ki, |j| counts[j * n + ki], c, g)?,
        }
        let qp = match &node.mutations[ki] {
            Some(q) => q.clone(),
            None => {
                let fresh = Arc::new(mutate(&node.qp, k)?.with_canonical_arrow_names());
                let q = self.intern(&fresh);
                self.nodes.get_mut(&key).expect("node exists").mutations[ki] = Some(q.clone());
                q
            }
        };
        std::mem::swap(&mut s.c, &mut self.scratch.0);
        std::mem::swap(&mut s.g, &mut self.scratch.1);
        s.qp = qp;
        Ok(())
    }
}

/// `G^T C = I`, exactly. Dot products that leave the 128-bit range are
/// recomputed with big integers.
pub fn duality_check(s: &Seed) -> bool {
    let n = s.rank();
    let bits = |m: &[i128]| {
        128 - m
            .iter()
            .fold(0u128, |acc, x| acc | x.unsigned_abs())
            .leading_zeros()
    };
    let (bg, bc) = (bits(&s.g), bits(&s.c));
    let log_n = usize::BITS - n.leading_zeros();
    // entries and dot products fit in i64
    if bg + bc + log_n < 63 {
        for (i, gi) in s.g().enumerate() {
            for (j, cj) in s.c().enumerate() {
                let d = gi.iter().zip(cj).fold(0i64, |acc, (&a, &b)| {
                    acc.wrapping_add((a as i64).wrapping_mul(b as i64))
                });
                if d != i64::from(i == j) {
                    return false;
                }
            }
        }
        return true;
    }
    // entries fit in i64 and no dot product can overflow
    if bg < 64 && bc < 64 && bg + bc + log_n < 127 {
        let wide = |x: i128| i128::from(x as i64);
        for (i, gi) in s.g().enumerate() {
            for (j, cj) in s.c().enumerate() {
                let d = gi.iter().zip(cj).fold(0i128, |acc, (&a, &b)| {
                    acc.wrapping_add(wide(a).wrapping_mul(wide(b)))
                });
                if d != i128::from(i == j) {
                    return false;
                }
            }
        }
        return true;
    }
    s.g().enumerate().all(|(i, gi)| {
        s.c()
            .enumerate()
            .all(|(j, cj)| dot_is(gi, cj, i128::from(i == j)))
    })
}

fn dot_is(x: &[i128], y: &[i128], expected: i128) -> bool {
    let fast = x.iter().zip(y).try_fold(0i128, |acc, (&a, &b)| {
        a.checked_mul(b).and_then(|p| acc.checked_add(p))
    });
    match fast {
        Some(d) => d == expected,
        None => {
            let exact: BigInt = x.iter().zip(y).map(|(&a, &b)| BigInt::from(a) * b).sum();
            exact == BigInt::from(expected)
        }
    }
}

/// Fraction-free Gaussian elimination over the integers.
fn determinant(cols: &[Vec<i128>]) -> BigInt {
    let n = cols.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(cols[j][i])).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn is_unimodular(s: &Seed) -> bool {
    s.det_c().abs().is_one()
}
