// SPDX-License-Identifier: Apache-2.0

//! Interior languages of discrete lines of irreducible unit Pisot
//! substitutions, computed with finite automata over number-field digits.

pub mod automata;
pub mod error;
pub mod families;
pub mod geometry;
pub mod interior;
pub mod linalg;
pub mod numberfield;
pub mod par;
pub mod relations;
pub mod sadic;
pub mod substitution;

pub use error::{Error, Result};
