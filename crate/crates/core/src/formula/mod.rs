//! Primitive-product-summation formulas and constraint instances.

mod ast;
mod eval;
mod flatten;
mod reduce;
mod sums;
mod tolerance;

pub use ast::*;
pub use eval::{
    evaluate, evaluate_with, partition_function, partition_function_with, plan_elimination,
    EliminationPlan, EvalOptions, PlanStep, DEFAULT_INTERMEDIATE_CAP,
};
pub use flatten::flatten;
pub use reduce::{reduce_instance, reduction_budget, Reduction, ReductionBudget};
pub use sums::{counting_instance, disjoint_sum, ordinal_multiple, ordinal_sum, power_of_two};
pub use tolerance::{tolerance_budget, ToleranceBudget, TOLERANCE_ENUMERATION_CAP};

use crate::pbf::PbfError;
use crate::value::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("undefined function `{0}`")]
    UndefinedFunction(String),
    #[error("atom {atom}: `{func}` has arity {expected} but is applied to {got} arguments")]
    ArityMismatch {
        atom: usize,
        func: String,
        expected: usize,
        got: usize,
    },
    #[error("atom {atom}: variable `{variable}` is not declared")]
    UnknownVariable { atom: usize, variable: String },
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("step {step}: eliminating `{variable}` needs an arity-{arity} table (cap {cap})")]
    IntermediateArity {
        step: usize,
        variable: String,
        arity: usize,
        cap: usize,
    },
    #[error("result arity {arity} exceeds the cap of {cap}")]
    OutputArity { arity: usize, cap: usize },
    #[error("tolerance must be positive, got {0}")]
    NonPositiveEpsilon(Rational),
    #[error("atom index {0} out of range")]
    AtomOutOfRange(usize),
    #[error("`{func}` must be binary, has arity {arity}")]
    NotBinary { func: String, arity: usize },
    #[error("function `{0}` is identically zero")]
    ZeroFunction(String),
    #[error("plan target differs from `{0}`")]
    PlanTargetMismatch(String),
    #[error("plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Pbf(#[from] PbfError),
}
