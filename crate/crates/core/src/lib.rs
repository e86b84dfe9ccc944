//! Even lattices, 2-elementary discriminant forms, definite lattice algorithms, genus
//! classification, and chamber geometry for embeddings of `L10(2)` into the even unimodular
//! lattice of signature (1, 25).

pub mod catalog;
pub mod chamber;
pub mod definite;
pub mod error;
pub mod fqf;
pub mod genus;
pub mod lattice;
pub mod mass;
pub mod matrix;
pub mod perm;
pub mod pipeline;
pub mod serial;

pub use error::{Error, Result};
pub use fqf::{FiniteIsometry, FiniteQuadraticForm, GlueMap};
pub use lattice::{DualVector, EmbeddingModel, Lattice, Signature};
pub use matrix::{Int, IntMatrix, Rat, RatMatrix};
