//! Exact verification of depth-zero character identities for GL(N) over a
//! local field, at the level of class functions on finite reductive quotients
//! attached to the faces of the Bruhat–Tits building.
//!
//! Everything is computed in exact cyclotomic arithmetic: conjugacy classes
//! and irreducible characters of GL(n, F_q) by exhaustive enumeration,
//! Harish-Chandra induction and restriction by direct group sums, facet
//! combinatorics of the reduced building, and (for GL(2)) an alternating
//! facet sum over the tree.

// memoisation statics spell out their full type, and the table algorithms
// walk parallel index arrays
#![allow(clippy::type_complexity, clippy::needless_range_loop)]

pub mod building;
pub mod char_table;
pub mod cyclotomic;
pub mod error;
pub mod finite_field;
pub mod gl_classes;
pub mod harish_chandra;
pub mod laurent;
pub mod matcher;
pub mod matrix;
pub mod tree;

pub use error::{Error, Result};
