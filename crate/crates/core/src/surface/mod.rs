//! Weighted decorated marked surfaces and the polygon model of their
//! mixed-angulations.

mod dissection;
mod refinement;
mod triangulation;
mod wdms;

pub use dissection::{
    enumerate_dissections, Chord, DissectionDoc, DissectionError, PolygonDissection,
};
pub use refinement::{
    complementary_arcs, realises_flip, refine_flip_witness, refinement_graph_components,
    refinements,
};
pub use triangulation::{
    arc_labels, arrows_by_arc, quiver_from_triangulation, triangulations, Triangulation,
};
pub use wdms::{
    collapse, rank, validate_wdms, CollapseComponent, CollapseDatum, SurfaceError, Wdms,
};
