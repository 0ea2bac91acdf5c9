use super::{content_key, FlipSystem};
use crate::surface::{DissectionError, PolygonDissection};
use crate::torus::{flip, TorusError, TorusFlip, TorusState};

/// Flips of polygon dissections; operator `i` flips the `i`-th diagonal in
/// sorted order.
#[derive(Clone, Copy, Debug)]
pub struct PolygonFlips {
    pub forward: bool,
}

impl PolygonFlips {
    pub fn forward() -> Self {
        Self { forward: true }
    }

    pub fn backward() -> Self {
        Self { forward: false }
    }
}

impl FlipSystem for PolygonFlips {
    type State = PolygonDissection;
    type Error = DissectionError;

    fn operator_count(&self, s: &PolygonDissection) -> usize {
        s.diagonals().len()
    }

    fn apply(
        &self,
        s: &PolygonDissection,
        op: usize,
    ) -> Result<PolygonDissection, DissectionError> {
        let gamma = *s
            .diagonals()
            .iter()
            .nth(op)
            .expect("operator index below diagonal count");
        if self.forward {
            s.flip_forward(gamma)
        } else {
            s.flip_backward(gamma)
        }
    }

    fn key(&self, s: &PolygonDissection) -> String {
        content_key(s)
    }

    fn describe(&self) -> String {
        let dir = if self.forward { "forward" } else { "backward" };
        format!("polygon dissection {dir} flips")
    }
}

/// The four torus flip matrices; operator `i` is `TorusFlip::ALL[i]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct TorusFlips;

impl FlipSystem for TorusFlips {
    type State = TorusState;
    type Error = TorusError;

    fn operator_count(&self, _: &TorusState) -> usize {
        TorusFlip::ALL.len()
    }

    fn apply(&self, s: &TorusState, op: usize) -> Result<TorusState, TorusError> {
        flip(s, TorusFlip::ALL[op])
    }

    fn key(&self, s: &TorusState) -> String {
        content_key(s)
    }

    fn describe(&self) -> String {
        "torus flip matrices h, h-flat, v, v-flat".to_string()
    }
}
