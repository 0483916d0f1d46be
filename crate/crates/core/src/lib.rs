//! Exact computations on balanced simplicial complexes: faces and links,
//! homology over prime fields and the rationals, flag f/h-vectors and their
//! Betti corrections, graded pieces of Stanley–Reisner rings and modules,
//! Lefschetz tests, Walkup-class generators, and a verification harness.

pub mod coloring;
pub mod complex;
pub mod constructions;
pub mod error;
pub mod field;
pub mod flags;
pub mod graded;
pub mod homology;
pub mod io;
pub mod linalg;
pub mod manifold;
pub mod verify;

pub use coloring::{find_balanced_coloring, Coloring, Grading, Grouping};
pub use complex::{Complex, Face, PairRef, RelativePair, VertexId};
pub use error::{Error, Result};
pub use field::FieldSpec;
pub use homology::{reduced_betti, relative_betti, BettiVector};
pub use manifold::{boundary_subcomplex, classify, Classification, Label};
