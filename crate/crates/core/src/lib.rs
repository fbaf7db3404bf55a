//! Exact orbifold invariants of omnioriented quasitoric orbifolds.
//!
//! A model is a simple polytope with a primitive integer vector on every
//! facet. From it this crate computes local group orders, box elements and
//! twisted sectors with their ages, Chen-Ruan Betti tables and Euler
//! numbers, and combinatorial blowups along faces together with their
//! crepancy and McKay-type checks. All arithmetic is exact.

pub mod linalg;
pub mod polytope;
pub mod model;
pub mod cohomology;
pub mod blowup;
pub mod ring;
pub mod io;

pub use linalg::{IntMatrix, Rational, RationalVector, SmithDecomposition};
pub use model::{BoxElement, CharacteristicModel, ModelError, TwistedSector};
pub use polytope::{CombinatorialPolytope, Face};
