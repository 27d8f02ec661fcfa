//! Exact twisted and extended-equivariant de Rham cohomology on finite invariant-form models.
//!
//! A model is a finite graded-commutative algebra with a differential, contraction operators for
//! a Lie algebra action, a closed 3-form `H` and 1-forms `ξ_j`. On top of that the crate builds
//! the truncated extended Cartan complex and computes its cohomology with exact rational
//! arithmetic.

pub mod cli;
pub mod equivariant;
pub mod error;
pub mod free;
pub mod library;
pub mod linalg;
pub mod model;
pub mod morphisms;
pub mod operators;
pub mod parser;
pub mod scalar;
pub mod sparse;
pub mod validate;

pub use error::{Error, Result};
pub use model::{CdgaModel, FormElement};
