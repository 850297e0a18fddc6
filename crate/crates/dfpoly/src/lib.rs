//! Exact computation of Donaldson-Futaki invariants for polarized group
//! compactifications, driven by W-invariant lattice polytope data.
//!
//! Everything numeric is big-rational arithmetic; floating point appears only
//! in the optional Monte-Carlo cross-checks and in decimal rendering.

pub mod error;
pub mod futaki;
pub mod linalg;
pub mod plfunc;
pub mod poly;
pub mod polytope;
pub mod quadrature;
pub mod rat;
pub mod root_system;

pub use error::{Error, Result};
pub use futaki::{CrossCheck, DFReport};
pub use plfunc::{AffinePiece, PLFunction, RefinedCell};
pub use poly::{IdentityReport, Polynomial, PolyVectorField};
pub use polytope::{
    Constraint, Facet, FacetKind, FanoReport, HPolytope, Simplex, VPolytope,
};
pub use rat::{Int, Rat};
pub use root_system::{RootSystem, WeylGroup};
