//! Matrix model of mixed-angulations of the once-bounded torus with a single
//! weight-3 decoration.
//!
//! A state is a pair of homology rows `h`, `v` together with the corner of the
//! fundamental square that carries the boundary ("bubble"). Moving the bubble
//! one corner clockwise (BL -> TL -> TR -> BR -> BL) left-multiplies the matrix
//! by `((0,1),(-1,0))`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("matrix has determinant {0}; rows must form a homology basis")]
    NonUnimodular(BigInt),
    #[error("state has bubble {0}; flips act on normal forms only")]
    NonNormalForm(Bubble),
    #[error("unknown bubble corner {0:?}")]
    UnknownBubble(String),
    #[error("unknown flip {0:?}")]
    UnknownFlip(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bubble {
    BL,
    TL,
    TR,
    BR,
}

impl Bubble {
    /// Clockwise steps from this corner back to BL.
    fn steps_to_bl(self) -> usize {
        match self {
            Bubble::BL => 0,
            Bubble::TL => 3,
            Bubble::TR => 2,
            Bubble::BR => 1,
        }
    }
}

impl fmt::Display for Bubble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bubble::BL => "BL",
            Bubble::TL => "TL",
            Bubble::TR => "TR",
            Bubble::BR => "BR",
        })
    }
}

impl FromStr for Bubble {
    type Err = TorusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "BL" => Ok(Bubble::BL),
            "TL" => Ok(Bubble::TL),
            "TR" => Ok(Bubble::TR),
            "BR" => Ok(Bubble::BR),
            _ => Err(TorusError::UnknownBubble(s.to_string())),
        }
    }
}

/// The four flip matrices, applied by left multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TorusFlip {
    /// Forward flip at the horizontal arc, `((0,-1),(1,2))`.
    HorizontalForward,
    /// Forward flip arriving from the horizontal arc's predecessor, `((-1,1),(-1,0))`.
    HorizontalInverseArc,
    /// Forward flip at the vertical arc, `((2,1),(-1,0))`.
    VerticalForward,
    /// Forward flip arriving from the vertical arc's predecessor, `((0,-1),(1,-1))`.
    VerticalInverseArc,
}

impl TorusFlip {
    pub const ALL: [TorusFlip; 4] = [
        TorusFlip::HorizontalForward,
        TorusFlip::HorizontalInverseArc,
        TorusFlip::VerticalForward,
        TorusFlip::VerticalInverseArc,
    ];

    pub fn matrix(self) -> [[i64; 2]; 2] {
        match self {
            TorusFlip::HorizontalForward => [[0, -1], [1, 2]],
            TorusFlip::HorizontalInverseArc => [[-1, 1], [-1, 0]],
            TorusFlip::VerticalForward => [[2, 1], [-1, 0]],
            TorusFlip::VerticalInverseArc => [[0, -1], [1, -1]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TorusFlip::HorizontalForward => "h",
            TorusFlip::HorizontalInverseArc => "h-flat",
            TorusFlip::VerticalForward => "v",
            TorusFlip::VerticalInverseArc => "v-flat",
        }
    }
}

impl FromStr for TorusFlip {
    type Err = TorusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TorusFlip::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| TorusError::UnknownFlip(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TorusState {
    #[serde(with = "row_serde")]
    pub h: [BigInt; 2],
    #[serde(with = "row_serde")]
    pub v: [BigInt; 2],
    pub bubble: Bubble,
}

impl TorusState {
    pub fn new(h: [i64; 2], v: [i64; 2], bubble: Bubble) -> Self {
        Self {
            h: h.map(BigInt::from),
            v: v.map(BigInt::from),
            bubble,
        }
    }

    pub fn det(&self) -> BigInt {
        &self.h[0] * &self.v[1] - &self.h[1] * &self.v[0]
    }

    /// Left multiplication of the matrix with rows `h`, `v`.
    fn left_mul(&self, m: [[i64; 2]; 2]) -> TorusState {
        let row = |coefs: [i64; 2]| -> [BigInt; 2] {
            [0, 1].map(|j| coefs[0] * &self.h[j] + coefs[1] * &self.v[j])
        };
        TorusState {
            h: row(m[0]),
            v: row(m[1]),
            bubble: self.bubble,
        }
    }
}

impl fmt::Display for TorusState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(({},{}),({},{}))@{}",
            self.h[0], self.h[1], self.v[0], self.v[1], self.bubble
        )
    }
}

/// Moves the bubble to BL through the cyclic equivalences.
pub fn normal_form(s: &TorusState) -> Result<TorusState, TorusError> {
    let det = s.det();
    if !det.abs().is_one() {
        return Err(TorusError::NonUnimodular(det));
    }
    let mut out = s.clone();
    for _ in 0..s.bubble.steps_to_bl() {
        out = out.left_mul([[0, 1], [-1, 0]]);
    }
    out.bubble = Bubble::BL;
    Ok(out)
}

pub fn flip(s: &TorusState, which: TorusFlip) -> Result<TorusState, TorusError> {
    if s.bubble != Bubble::BL {
        return Err(TorusError::NonNormalForm(s.bubble));
    }
    normal_form(&s.left_mul(which.matrix()))
}

/// `(h + v) mod 3`, componentwise.
pub fn invariant(s: &TorusState) -> (u8, u8) {
    let three = BigInt::from(3);
    let r = |x: BigInt| -> u8 {
        let m = ((x % &three) + &three) % &three;
        m.to_u8().expect("residue mod 3")
    };
    (r(&s.h[0] + &s.v[0]), r(&s.h[1] + &s.v[1]))
}

/// Normal forms reachable from `start` in at most `depth` flips.
pub fn reachable(start: &TorusState, depth: usize) -> Result<BTreeSet<TorusState>, TorusError> {
    let start = normal_form(start)?;
    let mut seen = BTreeSet::from([start.clone()]);
    let mut frontier = vec![start];
    for _ in 0..depth {
        let mut next = Vec::new();
        for s in &frontier {
            for f in TorusFlip::ALL {
                let t = flip(s, f)?;
                if seen.insert(t.clone()) {
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    Ok(seen)
}

mod row_serde {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Int(i64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(row: &[BigInt; 2], s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut t = s.serialize_tuple(2)?;
        for x in row {
            match x.to_i64() {
                Some(i) => t.serialize_element(&i)?,
                None => t.serialize_element(&x.to_string())?,
            }
        }
        t.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigInt; 2], D::Error> {
        let [a, b] = <[Entry; 2]>::deserialize(d)?;
        let conv = |e: Entry| -> Result<BigInt, D::Error> {
            match e {
                Entry::Int(i) => Ok(BigInt::from(i)),
                Entry::Text(t) => t.parse().map_err(serde::de::Error::custom),
            }
        };
        Ok([conv(a)?, conv(b)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(h: [i64; 2], v: [i64; 2]) -> TorusState {
        TorusState::new(h, v, Bubble::BL)
    }

    #[test]
    fn normal_form_examples() {
        let s = st([2, 1], [1, 1]);
        assert_eq!(normal_form(&s).unwrap(), s);
        // TL carries ((r,s),(-p,-q)) for the BL matrix ((p,q),(r,s))
        let tl = TorusState::new([1, 1], [-2, -1], Bubble::TL);
        assert_eq!(normal_form(&tl).unwrap(), s);
        let tr = TorusState::new([-2, -1], [-1, -1], Bubble::TR);
        assert_eq!(normal_form(&tr).unwrap(), s);
        let br = TorusState::new([-1, -1], [2, 1], Bubble::BR);
        assert_eq!(normal_form(&br).unwrap(), s);
        assert!(matches!(
            normal_form(&st([1, 2], [2, 4])),
            Err(TorusError::NonUnimodular(_))
        ));
    }

    #[test]
    fn forward_flip_of_identity() {
        let out = flip(&st([1, 0], [0, 1]), TorusFlip::HorizontalForward).unwrap();
        assert_eq!(out, st([0, -1], [1, 2]));
    }

    #[test]
    fn displayed_flip_chain() {
        // ((-r,-s),(p-r,q-s)) -> ((p,q),(r,s)) -> ((-r,-s),(p+2r,q+2s))
        let (p, q, r, s) = (2, 1, 1, 1);
        let before = st([-r, -s], [p - r, q - s]);
        let here = flip(&before, TorusFlip::HorizontalInverseArc).unwrap();
        assert_eq!(here, st([p, q], [r, s]));
        let after = flip(&here, TorusFlip::HorizontalForward).unwrap();
        assert_eq!(after, st([-r, -s], [p + 2 * r, q + 2 * s]));
    }

    #[test]
    fn flips_need_normal_form() {
        let s = TorusState::new([1, 0], [0, 1], Bubble::TR);
        assert_eq!(
            flip(&s, TorusFlip::VerticalForward),
            Err(TorusError::NonNormalForm(Bubble::TR))
        );
    }

    #[test]
    fn invariants_of_start_states() {
        assert_eq!(invariant(&st([1, 0], [0, 1])), (1, 1));
        assert_eq!(invariant(&st([1, 1], [0, 1])), (1, 2));
        assert_eq!(invariant(&st([-1, 0], [0, -1])), (2, 2));
    }

    #[test]
    fn flip_preserves_determinant() {
        let s = st([1, 1], [0, 1]);
        for f in TorusFlip::ALL {
            assert_eq!(flip(&s, f).unwrap().det(), s.det());
        }
    }

    #[test]
    fn json_shape() {
        let s = st([1, 0], [0, 1]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"h":[1,0],"v":[0,1],"bubble":"BL"}"#);
        assert_eq!(serde_json::from_str::<TorusState>(&text).unwrap(), s);
        let mut big = s.clone();
        big.h[0] = BigInt::from(i64::MAX) * 4;
        let text = serde_json::to_string(&big).unwrap();
        assert_eq!(serde_json::from_str::<TorusState>(&text).unwrap(), big);
    }
}
