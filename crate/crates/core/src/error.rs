// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("root isolation failed at {bits} bits: {reason}")]
    RootIsolation { bits: u32, reason: String },
    #[error("enclosure comparison still indecisive at the {0}-bit precision cap")]
    Indecisive(u32),
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),
    #[error("substitution precondition failed: {0}")]
    Precondition(String),
    #[error("point budget of {budget} exceeded (needed {needed})")]
    PointBudget { budget: u64, needed: u64 },
    #[error("state budget of {0} exceeded")]
    StateBudget(usize),
    #[error("automaton is not deterministic")]
    NotDeterministic,
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("alphabet has no zero digit")]
    NoZeroDigit,
    #[error("digit {0} has no scalar form")]
    MissingScalar(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate cut-and-project step {0}: the line meets a lattice corner")]
    Degenerate(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
