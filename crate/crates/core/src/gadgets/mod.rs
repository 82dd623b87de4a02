//! Constructions that implement one function from others, exactly or as a
//! limit with an explicit repetition schedule.

mod binary;
mod chi;
mod ising;
mod oplus3;
mod or_universal;
mod plan;
mod synth;
mod topkis;

pub use binary::*;
pub use chi::*;
pub use ising::*;
pub use oplus3::*;
pub use or_universal::*;
pub use plan::*;
pub use synth::*;
pub use topkis::*;

use crate::formula::FormulaError;
use crate::pbf::PbfError;
use crate::value::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GadgetError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Pbf(#[from] PbfError),
    #[error("expected arity {expected}, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("no canonical function is reachable from a case {0} function")]
    NoCanonicalWitness(&'static str),
    #[error("ratio {0} does not shrink the error")]
    Diverges(Rational),
    #[error("tolerance {0} needs more repetitions than allowed")]
    TooManyRepetitions(Rational),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("function is not permissive")]
    NotPermissive,
    #[error("function is not log-supermodular")]
    NotLsm,
    #[error("function is log-supermodular")]
    AlreadyLsm,
    #[error("underlying relation is not the parity relation")]
    RelationMismatch,
    #[error("{0} is not dyadic")]
    NonDyadic(Rational),
    #[error("value needs {needed} bits, precision is {bits}")]
    PrecisionTooLow { needed: u32, bits: u32 },
    #[error("target has a zero value")]
    ZeroValue,
    #[error("target is not strictly monotone in the direction the route needs")]
    NotMonotone,
    #[error("no power of the shifting weight separates the target")]
    NoShift,
}
