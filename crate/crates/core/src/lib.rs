//! Exact computations with nilpotent preprojective modules and Lusztig data,
//! and a harness that checks the two descriptions of `B(w)` against each
//! other.
//!
//! Conventions used throughout:
//!
//! * words are stored in application order: `letters[0]` is applied first;
//! * vertices are 0-based in the API and 1-based in every file format and
//!   error message;
//! * edge `k` contributes arrows `2k` (along its orientation, sign `+1`) and
//!   `2k + 1` (against it, sign `-1`).

pub mod crystal;
pub mod error;
pub mod field;
pub mod linalg;
pub mod prepmod;
pub mod rootsys;
pub mod veritas;

pub use error::{Error, Result};
pub use field::{Field, FieldDescriptor, PrimeField, Rationals};
pub use linalg::Matrix;
pub use rootsys::{CartanGraph, RootVec, Weight, WeylWord};
