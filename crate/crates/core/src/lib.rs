//! Exact tools for pps-definability of nonnegative pseudo-Boolean functions.
//!
//! Values are exact rationals throughout. The crate covers table operations,
//! a variable-elimination evaluator for primitive-product-summation formulas,
//! Möbius and Fourier transforms, structural tests (log-supermodularity,
//! product form, affine relations), explicit gadget constructions, and a
//! complexity classifier for finite function languages.

pub mod analysis;
pub mod classify;
pub mod formula;
pub mod gadgets;
pub mod pbf;
pub mod random;
pub mod transforms;
pub mod value;

pub use pbf::{FnTable, PbfError, Pinning};
pub use value::{q, Rational};
