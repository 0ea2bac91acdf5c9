//! Graded quiver and differential of the Ginzburg dg algebra of a QP.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{cyclic_derivative, ArrowId, PathSum, Qp, Vertex};

/// Generators of the graded quiver: original arrows (degree 0), their
/// opposites (degree -1) and one loop per vertex (degree -2).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Arrow(ArrowId),
    Dual(ArrowId),
    Loop(Vertex),
}

impl Generator {
    pub fn degree(&self) -> i32 {
        match self {
            Generator::Arrow(_) => 0,
            Generator::Dual(_) => -1,
            Generator::Loop(_) => -2,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Arrow(a) => write!(f, "{a}"),
            Generator::Dual(a) => write!(f, "bar({a})"),
            Generator::Loop(i) => write!(f, "e{i}"),
        }
    }
}

impl Serialize for Generator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedArrow {
    pub generator: Generator,
    pub src: Vertex,
    pub tgt: Vertex,
    pub degree: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GinzburgPresentation {
    pub arrows: Vec<GradedArrow>,
    pub differential: BTreeMap<Generator, PathSum<Generator>>,
}

impl GinzburgPresentation {
    pub fn d(&self, g: &Generator) -> &PathSum<Generator> {
        &self.differential[g]
    }

    /// Extends the differential to path sums by the graded Leibniz rule.
    pub fn apply(&self, x: &PathSum<Generator>) -> PathSum<Generator> {
        let mut out = PathSum::zero();
        for (path, coef) in x.iter() {
            let mut sign = 1i64;
            for (j, g) in path.iter().enumerate() {
                for (inner, c) in self.d(g).iter() {
                    let mut p = path[..j].to_vec();
                    p.extend(inner.iter().cloned());
                    p.extend(path[j + 1..].iter().cloned());
                    out.add_term(sign * coef * c, p);
                }
                if g.degree() % 2 != 0 {
                    sign = -sign;
                }
            }
        }
        out
    }
}

/// `d(a) = 0`, `d(bar a) = ∂_a W`, and `d(e_i)` is the vertex-`i` part of
/// `Σ_a (a·bar(a) - bar(a)·a)`, paths written in traversal order.
pub fn ginzburg(qp: &Qp) -> GinzburgPresentation {
    let mut arrows = Vec::new();
    let mut differential = BTreeMap::new();
    for a in qp.arrows() {
        let g = Generator::Arrow(a.id.clone());
        arrows.push(GradedArrow {
            generator: g.clone(),
            src: a.src,
            tgt: a.tgt,
            degree: 0,
        });
        differential.insert(g, PathSum::zero());
    }
    for a in qp.arrows() {
        let g = Generator::Dual(a.id.clone());
        arrows.push(GradedArrow {
            generator: g.clone(),
            src: a.tgt,
            tgt: a.src,
            degree: -1,
        });
        let da = cyclic_derivative(qp.potential(), &a.id);
        let lifted = PathSum::from_terms(
            da.iter()
                .map(|(p, c)| (c, p.iter().cloned().map(Generator::Arrow).collect())),
        );
        differential.insert(g, lifted);
    }
    for &i in qp.vertices() {
        let g = Generator::Loop(i);
        arrows.push(GradedArrow {
            generator: g.clone(),
            src: i,
            tgt: i,
            degree: -2,
        });
        let mut d = PathSum::zero();
        for a in qp.arrows() {
            let (x, xbar) = (
                Generator::Arrow(a.id.clone()),
                Generator::Dual(a.id.clone()),
            );
            if a.src == i {
                d.add_term(1, vec![x.clone(), xbar.clone()]);
            }
            if a.tgt == i {
                d.add_term(-1, vec![xbar, x]);
            }
        }
        differential.insert(g, d);
    }
    GinzburgPresentation {
        arrows,
        differential,
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{Potential, Quiver};
    use super::*;

    fn arrow(s: &str) -> Generator {
        Generator::Arrow(s.into())
    }
    fn dual(s: &str) -> Generator {
        Generator::Dual(s.into())
    }

    #[test]
    fn a2_presentation() {
        let g = ginzburg(&a2());
        let degrees: Vec<(String, i32)> = g
            .arrows
            .iter()
            .map(|a| (a.generator.to_string(), a.degree))
            .collect();
        assert_eq!(
            degrees,
            vec![
                ("a".to_string(), 0),
                ("bar(a)".to_string(), -1),
                ("e1".to_string(), -2),
                ("e2".to_string(), -2)
            ]
        );
        assert!(g.d(&dual("a")).is_zero());
        assert_eq!(
            g.d(&Generator::Loop(1)),
            &PathSum::from_terms([(1, vec![arrow("a"), dual("a")])])
        );
        assert_eq!(
            g.d(&Generator::Loop(2)),
            &PathSum::from_terms([(-1, vec![dual("a"), arrow("a")])])
        );
    }

    #[test]
    fn dual_differential_is_cyclic_derivative() {
        let g = ginzburg(&three_cycle());
        assert_eq!(
            g.d(&dual("a")),
            &PathSum::from_terms([(1, vec![arrow("b"), arrow("c")])])
        );
    }

    #[test]
    fn isolated_vertex_loop_is_closed() {
        let qp = Qp::new(Quiver::new([5], []), Potential::zero()).unwrap();
        let g = ginzburg(&qp);
        assert!(g.d(&Generator::Loop(5)).is_zero());
    }

    #[test]
    fn differential_squares_to_zero() {
        for qp in [a2(), a3(), three_cycle()] {
            let g = ginzburg(&qp);
            for gen in g.differential.keys() {
                let once = g.d(gen).clone();
                assert!(g.apply(&once).is_zero(), "d^2({gen}) != 0");
            }
        }
    }
}
