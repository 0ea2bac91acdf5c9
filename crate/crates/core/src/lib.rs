//! Combinatorial workbench for quivers with potential, mixed-angulations of
//! polygons, heart and silting seeds, and the exchange graphs they generate.

pub mod exchange;
pub mod qp;
pub mod quotient;
pub mod seeds;
pub mod surface;
pub mod torus;
