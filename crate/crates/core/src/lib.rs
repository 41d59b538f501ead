//! Exact structure-constant calculus for low-dimensional associative algebras,
//! with a catalog of canonical 2D and 3D forms and isomorphism search over
//! small prime fields.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod extend;
pub mod field;
pub mod isocheck;
pub mod kernel;
pub mod msc;

pub use error::{Error, Result};
pub use field::{FieldSpec, FieldValue};
pub use msc::{BaseChange, CoordinateVector, Matrix, StructureMatrix, TraceClass, TraceProfile};
