use std::collections::BTreeSet;

use super::{
    restrict, validate_potential, Arrow, ArrowId, Potential, Qp, QpError, Quiver, Term, Vertex,
};

/// Output of [`premutate`]: a quiver with potential that may still carry
/// 2-cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnreducedQp {
    pub quiver: Quiver,
    pub potential: Potential,
}

impl UnreducedQp {
    /// True when some term of the potential is a 2-cycle.
    pub fn has_quadratic_terms(&self) -> bool {
        self.potential.terms().iter().any(|t| t.cycle.len() == 2)
    }
}

impl From<Qp> for UnreducedQp {
    fn from(qp: Qp) -> Self {
        UnreducedQp {
            quiver: qp.quiver,
            potential: qp.potential,
        }
    }
}

/// Mutation at `k` before 2-cycle removal.
pub fn premutate(qp: &Qp, k: Vertex) -> Result<UnreducedQp, QpError> {
    if !qp.vertices().contains(&k) {
        return Err(QpError::UnknownVertex(k));
    }
    let incoming: Vec<&Arrow> = qp.arrows().iter().filter(|a| a.tgt == k).collect();
    let outgoing: Vec<&Arrow> = qp.arrows().iter().filter(|a| a.src == k).collect();

    let mut arrows = Vec::with_capacity(qp.arrows().len() + incoming.len() * outgoing.len());
    let mut w2 = Vec::new();
    for a in &incoming {
        for b in &outgoing {
            let ab = ArrowId::composite(&a.id, &b.id);
            arrows.push(Arrow {
                id: ab.clone(),
                src: a.src,
                tgt: b.tgt,
            });
            w2.push(Term {
                coef: 1,
                cycle: vec![ab, b.id.reversed(), a.id.reversed()],
            });
        }
    }
    for a in qp.arrows() {
        if a.src == k || a.tgt == k {
            arrows.push(Arrow {
                id: a.id.reversed(),
                src: a.tgt,
                tgt: a.src,
            });
        } else {
            arrows.push(a.clone());
        }
    }
    let quiver = Quiver::new(qp.vertices().iter().copied(), arrows);

    let w1 = qp.potential().terms().iter().map(|t| Term {
        coef: t.coef,
        cycle: substitute_composites(qp.quiver(), &t.cycle, k),
    });
    let potential = Potential::new(w1.chain(w2));
    Ok(UnreducedQp { quiver, potential })
}

/// Replaces every factor `ab` passing through `k` by the composite `[ab]`.
fn substitute_composites(quiver: &Quiver, cycle: &[ArrowId], k: Vertex) -> Vec<ArrowId> {
    let n = cycle.len();
    let ends: Vec<(Vertex, Vertex)> = cycle
        .iter()
        .map(|id| {
            let a = quiver.arrow(id).expect("validated potential");
            (a.src, a.tgt)
        })
        .collect();
    // An arrow leaving k is always preceded by one entering k, so starting
    // at any arrow that does not leave k keeps every pair intact.
    let Some(start) = (0..n).find(|&i| ends[i].0 != k) else {
        return cycle.to_vec();
    };
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let idx = (start + i) % n;
        if ends[idx].1 == k {
            let next = (idx + 1) % n;
            out.push(ArrowId::composite(&cycle[idx], &cycle[next]));
            i += 2;
        } else {
            out.push(cycle[idx].clone());
            i += 1;
        }
    }
    out
}

/// Removes 2-cycles appearing as quadratic terms of the potential.
///
/// For a term `e*uv` with `e = ±1`, write `W = e*uv + u*A + B*v + C` where
/// `u` and `v` occur in at most one other term each; then `u, v` are
/// deleted and `W := C - e*B*A`. Repeats until no quadratic term remains.
pub fn reduce(unreduced: UnreducedQp) -> Result<Qp, QpError> {
    let UnreducedQp {
        quiver,
        mut potential,
    } = unreduced;
    let mut arrows: Vec<Arrow> = quiver.arrows().to_vec();
    let vertices = quiver.vertices().clone();

    while let Some(pos) = potential.terms().iter().position(|t| t.cycle.len() == 2) {
        let terms = potential.terms();
        let quad = &terms[pos];
        let eps = quad.coef;
        if eps.abs() != 1 {
            return Err(QpError::UnsupportedReduction(format!(
                "2-cycle {}{} has coefficient {eps}",
                quad.cycle[0], quad.cycle[1]
            )));
        }
        let (u, v) = (&quad.cycle[0], &quad.cycle[1]);
        let mut u_term = None;
        let mut v_term = None;
        let mut rest = Vec::new();
        for (i, t) in terms.iter().enumerate() {
            if i == pos {
                continue;
            }
            let nu = t.cycle.iter().filter(|a| *a == u).count();
            let nv = t.cycle.iter().filter(|a| *a == v).count();
            match (nu, nv) {
                (0, 0) => rest.push(t.clone()),
                (1, 0) if u_term.is_none() => u_term = Some(t),
                (0, 1) if v_term.is_none() => v_term = Some(t),
                _ => {
                    return Err(QpError::UnsupportedReduction(format!(
                        "arrows of the 2-cycle {u}{v} occur in more than one other term"
                    )))
                }
            }
        }
        // u*A: rotate so u is first and drop it.
        let a_part = u_term.map(|t| {
            let i = t.cycle.iter().position(|x| x == u).unwrap();
            let n = t.cycle.len();
            (
                t.coef,
                (1..n)
                    .map(|j| t.cycle[(i + j) % n].clone())
                    .collect::<Vec<_>>(),
            )
        });
        // B*v: rotate so v is last and drop it.
        let b_part = v_term.map(|t| {
            let i = t.cycle.iter().position(|x| x == v).unwrap();
            let n = t.cycle.len();
            (
                t.coef,
                (1..n)
                    .map(|j| t.cycle[(i + j) % n].clone())
                    .collect::<Vec<_>>(),
            )
        });
        if let (Some((la, a)), Some((lb, b))) = (a_part, b_part) {
            let mut cycle = b;
            cycle.extend(a);
            rest.push(Term {
                coef: -eps * la * lb,
                cycle,
            });
        }
        let (u, v) = (u.clone(), v.clone());
        arrows.retain(|a| a.id != u && a.id != v);
        potential = Potential::new(rest);
    }

    let quiver = Quiver::new(vertices, arrows);
    match quiver.validate() {
        Ok(()) => {}
        Err(QpError::TwoCycleArrows(a, b)) => {
            return Err(QpError::UnsupportedReduction(format!(
                "2-cycle {a}{b} has no quadratic term in the potential"
            )))
        }
        Err(e) => return Err(e),
    }
    validate_potential(&quiver, &potential)?;
    Ok(Qp::from_parts_unchecked(quiver, potential))
}

/// Mutation at `k`: premutation followed by 2-cycle reduction.
pub fn mutate(qp: &Qp, k: Vertex) -> Result<Qp, QpError> {
    reduce(premutate(qp, k)?)
}

/// Comparison of restricting after mutating against mutating after
/// restricting.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MuresReport {
    pub quiver_equal: bool,
    pub potential_equal: bool,
}

pub fn mures_check(qp: &Qp, keep: &BTreeSet<Vertex>, i: Vertex) -> Result<MuresReport, QpError> {
    if !keep.contains(&i) {
        return Err(QpError::BadSubset(keep.iter().copied().collect()));
    }
    let left = restrict(&mutate(qp, i)?, keep)?;
    let right = mutate(&restrict(qp, keep)?, i)?;
    Ok(MuresReport {
        quiver_equal: left.vertices() == right.vertices()
            && left.quiver().arrow_multiset() == right.quiver().arrow_multiset(),
        potential_equal: left.potential() == right.potential(),
    })
}
