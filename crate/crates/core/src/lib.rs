//! Koszulity of the algebras attached to uniform layered graphs.
//!
//! The crate decides Koszulity of `A(Γ)` through the quadratic algebra
//! `B(Γ)` on the non-minimal vertices and its quadratic dual: relation
//! subspaces are built exactly over the rationals, Hilbert series are
//! computed degree by degree, and distributivity of the relation lattices
//! is checked on each decreasing run of levels. Around that sit an
//! isomorphism-free enumerator of layered graphs, the order-complex
//! cochain counts of interval windows, and an exhaustive search driver.

pub mod algebra;
pub mod cohomology;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod io;
pub mod koszul;
pub mod lattice;
pub mod linalg;
pub mod search;

pub use algebra::{build_quadratic, hilbert_b, hilbert_b_dual, numerically_koszul, HilbertSeries, NumericVerdict, QuadraticData};
pub use cohomology::{cochain_dims, cohomology_dims, CochainDims, IntervalReading};
pub use enumerate::{canonical_key, count, enumerate, CanonicalKey};
pub use error::{Error, Result};
pub use graph::{validate, LayerProfile, LayeredGraph, StructuralMode, VertexId, Violation};
pub use koszul::{is_koszul, KoszulStatus, KoszulVerdict};
pub use lattice::is_distributive;
pub use linalg::Subspace;
pub use search::{run_search, SearchOptions, SearchReport};
