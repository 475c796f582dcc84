//! Weighted barycenter (Tutte) drawings, forwards and backwards.
//!
//! The forward problem is classical: given a planar graph, positive weights
//! on its internal edges and a convex outer polygon, place every internal
//! vertex at the weighted average of its neighbours. The resulting straight
//! line drawing is planar and every face is convex.
//!
//! The inverse problem is recognition: given a straight-line drawing of a
//! triconnected planar graph whose hull vertices form a face, decide whether
//! positive edge weights exist that make the drawing a weighted barycenter
//! drawing, and recover a witness weight function when they do. The decision
//! runs on per-vertex convex-combination coefficients, ratio products around
//! strictly internal faces, and scale-factor propagation over the interior;
//! an LP strict-feasibility oracle settles the general-degree case exactly.

pub mod cli;
pub mod energy;
pub mod forward;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod lp;
pub mod recognize;
pub mod svg;

mod linalg;
mod simplex;

pub use forward::{solve_barycenter, verify_tutte_output, OuterPolygon, WeightFunction};
pub use geometry::{Point, Tolerances};
pub use graph::{EdgeClass, EdgeKey, EmbeddedDrawing, PlanarGraph, VertexClass};
pub use io::DrawingDocument;
pub use recognize::{recognize, RecognitionResult, RecognizeMode, Verdict};
