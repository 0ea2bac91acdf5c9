//! Potentials as finite integer combinations of cyclic words, and formal
//! path sums used for cyclic derivatives.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ArrowId;

/// A single summand `coef * cycle` of a potential.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub coef: i64,
    pub cycle: Vec<ArrowId>,
}

/// A finite integer combination of cycles, always held in canonical form:
/// every cycle is rotated to its lexicographically least rotation, equal
/// cycles are merged, zero coefficients are dropped and terms are sorted by
/// cycle.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Potential {
    terms: Vec<Term>,
}

/// Rotation of `cycle` that is lexicographically smallest. Its first entry
/// is the smallest arrow id of the cycle.
pub fn canonical_rotation(cycle: &[ArrowId]) -> Vec<ArrowId> {
    let n = cycle.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best = 0;
    for r in 1..n {
        let better = (0..n)
            .map(|i| (&cycle[(r + i) % n], &cycle[(best + i) % n]))
            .find(|(a, b)| a != b)
            .is_some_and(|(a, b)| a < b);
        if better {
            best = r;
        }
    }
    cycle[best..]
        .iter()
        .chain(&cycle[..best])
        .cloned()
        .collect()
}

impl Potential {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Canonicalizes an arbitrary list of terms. Empty cycles are dropped.
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut acc: BTreeMap<Vec<ArrowId>, i64> = BTreeMap::new();
        for t in terms {
            if t.cycle.is_empty() || t.coef == 0 {
                continue;
            }
            *acc.entry(canonical_rotation(&t.cycle)).or_insert(0) += t.coef;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(cycle, coef)| Term { coef, cycle })
            .collect();
        Self { terms }
    }

    pub fn single(coef: i64, cycle: Vec<ArrowId>) -> Self {
        Self::new([Term { coef, cycle }])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Potential) -> Potential {
        Potential::new(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn scale(&self, k: i64) -> Potential {
        Potential::new(self.terms.iter().map(|t| Term {
            coef: t.coef * k,
            cycle: t.cycle.clone(),
        }))
    }

    /// Whether `arrow` occurs in any cycle.
    pub fn mentions(&self, arrow: &ArrowId) -> bool {
        self.terms.iter().any(|t| t.cycle.contains(arrow))
    }

    /// Re-canonicalizes after renaming arrows.
    pub fn rename(&self, f: impl Fn(&ArrowId) -> ArrowId) -> Potential {
        Potential::new(self.terms.iter().map(|t| Term {
            coef: t.coef,
            cycle: t.cycle.iter().map(&f).collect(),
        }))
    }

    /// Keeps only terms satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Term) -> bool) -> Potential {
        Potential {
            terms: self.terms.iter().filter(|t| keep(t)).cloned().collect(),
        }
    }
}

/// A formal integer combination of paths (not considered up to rotation).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathSum<G: Ord = ArrowId> {
    terms: BTreeMap<Vec<G>, i64>,
}

impl<G: Ord + Clone> PathSum<G> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Vec<G>)>) -> Self {
        let mut s = Self::zero();
        for (c, p) in terms {
            s.add_term(c, p);
        }
        s
    }

    pub fn add_term(&mut self, coef: i64, path: Vec<G>) {
        if coef == 0 {
            return;
        }
        match self.terms.entry(path) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coef);
            }
        }
    }

    pub fn add_assign(&mut self, other: &PathSum<G>) {
        for (p, c) in &other.terms {
            self.add_term(*c, p.clone());
        }
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(p, c)| (c * k, p.clone())))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<G>, i64)> {
        self.terms.iter().map(|(p, c)| (p, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, path: &[G]) -> i64 {
        self.terms.get(path).copied().unwrap_or(0)
    }
}

/// Cyclic derivative of `w` at `arrow`: every occurrence of `arrow` is
/// rotated to the front of its cycle and deleted.
pub fn cyclic_derivative(w: &Potential, arrow: &ArrowId) -> PathSum {
    let mut out = PathSum::zero();
    for t in w.terms() {
        let n = t.cycle.len();
        for (i, a) in t.cycle.iter().enumerate() {
            if a == arrow {
                let path = (1..n).map(|j| t.cycle[(i + j) % n].clone()).collect();
                out.add_term(t.coef, path);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(s: &[&str]) -> Vec<ArrowId> {
        s.iter().map(|x| ArrowId::new(*x)).collect()
    }

    #[test]
    fn canonical_rotation_starts_at_least_id() {
        assert_eq!(
            canonical_rotation(&ids(&["c", "a", "b"])),
            ids(&["a", "b", "c"])
        );
        // repeated least id: pick the rotation that is least overall
        assert_eq!(
            canonical_rotation(&ids(&["a", "z", "a", "b"])),
            ids(&["a", "b", "a", "z"])
        );
    }

    #[test]
    fn merges_rotations_and_drops_zeros() {
        let w = Potential::new([
            Term {
                coef: 2,
                cycle: ids(&["b", "c", "a"]),
            },
            Term {
                coef: -2,
                cycle: ids(&["a", "b", "c"]),
            },
            Term {
                coef: 1,
                cycle: ids(&["x", "y"]),
            },
        ]);
        assert_eq!(
            w.terms(),
            &[Term {
                coef: 1,
                cycle: ids(&["x", "y"])
            }]
        );
    }

    #[test]
    fn derivative_of_three_cycle() {
        let w = Potential::single(1, ids(&["a", "b", "c"]));
        let d = cyclic_derivative(&w, &ArrowId::new("a"));
        assert_eq!(d, PathSum::from_terms([(1, ids(&["b", "c"]))]));
        assert!(cyclic_derivative(&w, &ArrowId::new("d")).is_zero());
    }

    #[test]
    fn derivative_at_starred_arrow() {
        let w = Potential::new([
            Term {
                coef: 1,
                cycle: ids(&["a", "b", "c"]),
            },
            Term {
                coef: -1,
                cycle: ids(&["x", "y", "b*", "a*"]),
            },
        ]);
        let d = cyclic_derivative(&w, &ArrowId::new("b*"));
        assert_eq!(d, PathSum::from_terms([(-1, ids(&["a*", "x", "y"]))]));
    }

    #[test]
    fn path_sum_cancels() {
        let mut s = PathSum::from_terms([(1, ids(&["a"])), (2, ids(&["b"]))]);
        s.add_term(-1, ids(&["a"]));
        assert_eq!(s, PathSum::from_terms([(2, ids(&["b"]))]));
    }
}
