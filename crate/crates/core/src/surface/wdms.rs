use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("weights incompatible with surface: sum(w) - (m + 2b) = {lhs}, but 4g - 4 = {rhs}")]
    Incompatible { lhs: i64, rhs: i64 },
    #[error("surface has {0} punctures; only unpunctured surfaces are supported")]
    HasPunctures(u32),
    #[error("surface has no boundary component")]
    NoBoundary,
    #[error("boundary component {0} carries no marked point")]
    EmptyBoundary(usize),
    #[error("decoration {0} has weight {1}; weights must be at least 1")]
    BadWeight(usize, i64),
    #[error("collapse component {component}: -sum(kappa+2) + sum(w) = {lhs}, but 4g - 4 = {rhs}")]
    EnhancementViolated {
        component: usize,
        lhs: i64,
        rhs: i64,
    },
    #[error("collapse component {component}: enhancement {kappa} is below 3")]
    KappaTooSmall { component: usize, kappa: i64 },
    #[error("collapse component {0} has no boundary curve")]
    NoBoundaryCurves(usize),
    #[error("collapse needs simple weights, decoration {0} has weight {1}")]
    NotSimpleWeights(usize, i64),
    #[error("decoration index {0} is out of range")]
    BadDecorationIndex(usize),
    #[error("decoration {0} is claimed by two collapse components")]
    OverlappingComponents(usize),
    #[error("collapse removes more genus than the surface has")]
    GenusUnderflow,
}

/// Weighted decorated marked surface, recorded by its topological type:
/// genus, marked points per boundary component, and decoration weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wdms {
    pub genus: u32,
    pub boundaries: Vec<u32>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub punctures: u32,
    pub decorations: Vec<i64>,
}

fn is_zero(p: &u32) -> bool {
    *p == 0
}

impl Wdms {
    pub fn new(genus: u32, boundaries: Vec<u32>, decorations: Vec<i64>) -> Self {
        Self {
            genus,
            boundaries,
            punctures: 0,
            decorations,
        }
    }

    pub fn marked_points(&self) -> i64 {
        self.boundaries.iter().map(|&m| m as i64).sum()
    }

    /// The two sides of the compatibility equation
    /// `sum(w) - (m + 2b) = 4g - 4`.
    pub fn compatibility_sides(&self) -> (i64, i64) {
        let total: i64 = self.decorations.iter().sum();
        let b = self.boundaries.len() as i64;
        (
            total - (self.marked_points() + 2 * b),
            4 * self.genus as i64 - 4,
        )
    }
}

pub fn validate_wdms(s: &Wdms) -> Result<(), SurfaceError> {
    if s.punctures != 0 {
        return Err(SurfaceError::HasPunctures(s.punctures));
    }
    if s.boundaries.is_empty() {
        return Err(SurfaceError::NoBoundary);
    }
    if let Some(i) = s.boundaries.iter().position(|&m| m == 0) {
        return Err(SurfaceError::EmptyBoundary(i));
    }
    if let Some((i, &w)) = s.decorations.iter().enumerate().find(|(_, &w)| w < 1) {
        return Err(SurfaceError::BadWeight(i, w));
    }
    let (lhs, rhs) = s.compatibility_sides();
    if lhs != rhs {
        return Err(SurfaceError::Incompatible { lhs, rhs });
    }
    Ok(())
}

/// `6g + 3p + 3b + m - 6`.
pub fn rank(s: &Wdms) -> i64 {
    6 * s.genus as i64 + 3 * s.punctures as i64 + 3 * s.boundaries.len() as i64 + s.marked_points()
        - 6
}

/// One connected component of the collapsed subsurface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseComponent {
    pub genus: u32,
    /// One enhancement per boundary curve of the component.
    pub boundary_enhancements: Vec<i64>,
    /// Indices into the ambient surface's decorations.
    pub decorations: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseDatum {
    pub components: Vec<CollapseComponent>,
}

/// Fills each boundary curve of the collapsed components by a disc carrying
/// one decoration of weight `kappa - 2`. Decorations outside the subsurface
/// keep their order; new ones are appended component by component.
///
/// Removing a component of genus `h` with `c` boundary curves lowers the
/// ambient genus by `h + c - 1`.
pub fn collapse(s: &Wdms, d: &CollapseDatum) -> Result<Wdms, SurfaceError> {
    validate_wdms(s)?;
    if let Some((i, &w)) = s.decorations.iter().enumerate().find(|(_, &w)| w != 1) {
        return Err(SurfaceError::NotSimpleWeights(i, w));
    }
    let mut claimed = BTreeSet::new();
    let mut genus_loss = 0i64;
    let mut new_weights = Vec::new();
    for (ci, comp) in d.components.iter().enumerate() {
        if comp.boundary_enhancements.is_empty() {
            return Err(SurfaceError::NoBoundaryCurves(ci));
        }
        for &k in &comp.decorations {
            if k >= s.decorations.len() {
                return Err(SurfaceError::BadDecorationIndex(k));
            }
            if !claimed.insert(k) {
                return Err(SurfaceError::OverlappingComponents(k));
            }
        }
        if let Some(&kappa) = comp.boundary_enhancements.iter().find(|&&k| k < 3) {
            return Err(SurfaceError::KappaTooSmall {
                component: ci,
                kappa,
            });
        }
        let contained: i64 = comp.decorations.iter().map(|&k| s.decorations[k]).sum();
        let lhs = contained
            - comp
                .boundary_enhancements
                .iter()
                .map(|k| k + 2)
                .sum::<i64>();
        let rhs = 4 * comp.genus as i64 - 4;
        if lhs != rhs {
            return Err(SurfaceError::EnhancementViolated {
                component: ci,
                lhs,
                rhs,
            });
        }
        genus_loss += comp.genus as i64 + comp.boundary_enhancements.len() as i64 - 1;
        new_weights.extend(comp.boundary_enhancements.iter().map(|k| k - 2));
    }
    let genus = s.genus as i64 - genus_loss;
    if genus < 0 {
        return Err(SurfaceError::GenusUnderflow);
    }
    let mut decorations: Vec<i64> = s
        .decorations
        .iter()
        .enumerate()
        .filter(|(i, _)| !claimed.contains(i))
        .map(|(_, &w)| w)
        .collect();
    decorations.extend(new_weights);
    let out = Wdms {
        genus: genus as u32,
        boundaries: s.boundaries.clone(),
        punctures: s.punctures,
        decorations,
    };
    validate_wdms(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon_simple() -> Wdms {
        Wdms::new(0, vec![6], vec![1, 1, 1, 1])
    }

    fn disc(kappa: i64, decorations: impl IntoIterator<Item = usize>) -> CollapseDatum {
        CollapseDatum {
            components: vec![CollapseComponent {
                genus: 0,
                boundary_enhancements: vec![kappa],
                decorations: decorations.into_iter().collect(),
            }],
        }
    }

    #[test]
    fn compatibility_examples() {
        assert!(validate_wdms(&Wdms::new(0, vec![6], vec![1, 1, 2])).is_ok());
        assert!(validate_wdms(&Wdms::new(0, vec![5], vec![1, 2])).is_ok());
        assert_eq!(
            validate_wdms(&Wdms::new(0, vec![6], vec![1, 1, 1])),
            Err(SurfaceError::Incompatible { lhs: -5, rhs: -4 })
        );
    }

    #[test]
    fn structural_rejections() {
        let mut s = Wdms::new(0, vec![6], vec![1, 1, 2]);
        s.punctures = 1;
        assert_eq!(validate_wdms(&s), Err(SurfaceError::HasPunctures(1)));
        assert_eq!(
            validate_wdms(&Wdms::new(1, vec![], vec![4])),
            Err(SurfaceError::NoBoundary)
        );
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Wdms::new(0, vec![6], vec![1, 1, 2])), 3);
        assert_eq!(rank(&Wdms::new(0, vec![5], vec![1, 2])), 2);
        assert_eq!(rank(&Wdms::new(1, vec![1], vec![3])), 4);
    }

    #[test]
    fn torus_surface_is_compatible() {
        // once-bounded torus with one marked point and a weight-3 zero
        assert!(validate_wdms(&Wdms::new(1, vec![1], vec![3])).is_ok());
    }

    #[test]
    fn collision_of_three_zeros() {
        let out = collapse(&hexagon_simple(), &disc(5, [0, 1, 2])).unwrap();
        assert_eq!(out.decorations, vec![1, 3]);
        assert_eq!(out.genus, 0);
    }

    #[test]
    fn collision_of_two_zeros() {
        let out = collapse(&hexagon_simple(), &disc(4, [1, 3])).unwrap();
        assert_eq!(out.decorations, vec![1, 1, 2]);
    }

    #[test]
    fn collapse_rejections() {
        assert_eq!(
            collapse(&hexagon_simple(), &disc(2, [0])),
            Err(SurfaceError::KappaTooSmall {
                component: 0,
                kappa: 2
            })
        );
        assert_eq!(
            collapse(&hexagon_simple(), &disc(5, [0, 1])),
            Err(SurfaceError::EnhancementViolated {
                component: 0,
                lhs: -5,
                rhs: -4
            })
        );
        assert!(matches!(
            collapse(&Wdms::new(0, vec![6], vec![1, 1, 2]), &disc(4, [0, 1])),
            Err(SurfaceError::NotSimpleWeights(2, 2))
        ));
    }

    #[test]
    fn genus_one_component() {
        // genus-2 surface, 1 boundary with 2 points: sum(w) = 2 + 2 + 4 = 8
        let s = Wdms::new(2, vec![2], vec![1; 8]);
        assert!(validate_wdms(&s).is_ok());
        // a one-holed torus holding 4 zeros: -(k+2) + 4 = 0  =>  k = 2 (too small)
        // a one-holed torus holding 5 zeros: k = 3
        let d = CollapseDatum {
            components: vec![CollapseComponent {
                genus: 1,
                boundary_enhancements: vec![3],
                decorations: (0..5).collect(),
            }],
        };
        let out = collapse(&s, &d).unwrap();
        assert_eq!(out.genus, 1);
        assert_eq!(out.decorations, vec![1, 1, 1, 1]);
        assert!(validate_wdms(&out).is_ok());
    }
}
