//! Dense tables for nonnegative pseudo-Boolean functions `{0,1}^n -> Q>=0`.
//!
//! Assignments are bitmasks with coordinate `i` (0-based) at bit `i`, so the
//! first argument is the least significant bit. All positions in this crate
//! are 0-based.

mod named;
mod ops;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::value::Rational;

pub use named::*;
pub use ops::{product, Pinning, TwoPinning};

/// Largest arity a table may have unless a caller asks for a different cap.
pub const DEFAULT_ARITY_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PbfError {
    #[error("table for arity {arity} needs {expected} values, got {got}")]
    WrongLength {
        arity: usize,
        expected: usize,
        got: usize,
    },
    #[error("negative value {value} at mask {mask}")]
    Negative { mask: usize, value: Rational },
    #[error("arity {arity} exceeds the cap of {cap}")]
    Capacity { arity: usize, cap: usize },
    #[error("position {position} out of range for arity {arity}")]
    PositionOutOfRange { position: usize, arity: usize },
    #[error("position {0} pinned twice")]
    DuplicatePin(usize),
    #[error("operation needs arity at least {needed}, got {arity}")]
    ArityTooSmall { needed: usize, arity: usize },
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
}

/// An immutable table of `2^arity` nonnegative rationals.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct FnTable {
    arity: usize,
    values: Arc<[Rational]>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    arity: usize,
    values: Vec<Rational>,
}

impl TryFrom<RawTable> for FnTable {
    type Error = PbfError;
    fn try_from(raw: RawTable) -> Result<Self, PbfError> {
        FnTable::new(raw.arity, raw.values)
    }
}

impl From<FnTable> for RawTable {
    fn from(t: FnTable) -> Self {
        RawTable {
            arity: t.arity,
            values: t.values.to_vec(),
        }
    }
}

impl FnTable {
    pub fn new(arity: usize, values: Vec<Rational>) -> Result<Self, PbfError> {
        Self::with_cap(arity, values, DEFAULT_ARITY_CAP)
    }

    pub fn with_cap(arity: usize, values: Vec<Rational>, cap: usize) -> Result<Self, PbfError> {
        if arity > cap {
            return Err(PbfError::Capacity { arity, cap });
        }
        let expected = 1usize << arity;
        if values.len() != expected {
            return Err(PbfError::WrongLength {
                arity,
                expected,
                got: values.len(),
            });
        }
        if let Some((mask, v)) = values.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(PbfError::Negative {
                mask,
                value: v.clone(),
            });
        }
        Ok(Self::from_vec_unchecked(arity, values))
    }

    pub(crate) fn from_vec_unchecked(arity: usize, values: Vec<Rational>) -> Self {
        debug_assert_eq!(values.len(), 1 << arity);
        FnTable {
            arity,
            values: values.into(),
        }
    }

    /// Builds a table from a function of the mask. The caller guarantees
    /// nonnegative outputs and an arity within the cap.
    pub fn from_fn(arity: usize, f: impl FnMut(usize) -> Rational) -> Self {
        assert!(arity <= DEFAULT_ARITY_CAP, "arity {arity} exceeds cap");
        let values: Vec<Rational> = (0..1usize << arity).map(f).collect();
        assert!(
            values.iter().all(|v| !v.is_negative()),
            "negative table entry"
        );
        Self::from_vec_unchecked(arity, values)
    }

    pub fn from_ints(arity: usize, values: &[i64]) -> Result<Self, PbfError> {
        Self::new(arity, values.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        Self::from_fn(arity, |_| c.clone())
    }

    pub fn nullary(c: Rational) -> Self {
        Self::constant(0, c)
    }

    /// `U(0) = a`, `U(1) = b`.
    pub fn unary(a: Rational, b: Rational) -> Self {
        Self::from_fn(1, |m| if m == 0 { a.clone() } else { b.clone() })
    }

    /// Binary table from its matrix `m[x1][x2]`.
    pub fn from_matrix(m: [[Rational; 2]; 2]) -> Self {
        Self::from_fn(2, |mask| m[mask & 1][mask >> 1].clone())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub(crate) fn shared_values(&self) -> Arc<[Rational]> {
        Arc::clone(&self.values)
    }

    pub fn get(&self, mask: usize) -> &Rational {
        &self.values[mask]
    }

    /// Value at an assignment given as bits `x_0, x_1, ...`.
    pub fn at(&self, bits: &[u8]) -> &Rational {
        assert_eq!(bits.len(), self.arity);
        &self.values[bits_to_mask(bits)]
    }

    /// Matrix entry `F(a, b)` of a binary table.
    pub fn entry(&self, a: usize, b: usize) -> &Rational {
        assert_eq!(self.arity, 2);
        &self.values[a | (b << 1)]
    }

    pub fn is_all_zero(&self) -> bool {
        self.values.iter().all(Rational::is_zero)
    }

    pub fn max_value(&self) -> Rational {
        self.values
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Smallest positive entry, if any.
    pub fn min_nonzero(&self) -> Option<Rational> {
        self.values.iter().filter(|v| !v.is_zero()).min().cloned()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, _)| m)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        assert!(!c.is_negative());
        Self::from_vec_unchecked(self.arity, self.values.iter().map(|v| v * c).collect())
    }

    pub fn mul_pointwise(&self, other: &Self) -> Result<Self, PbfError> {
        self.check_same_arity(other)?;
        Ok(Self::from_vec_unchecked(
            self.arity,
            self.values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a * b)
                .collect(),
        ))
    }

    pub fn add_pointwise(&self, other: &Self) -> Result<Self, PbfError> {
        self.check_same_arity(other)?;
        Ok(Self::from_vec_unchecked(
            self.arity,
            self.values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    /// Entrywise power `F^k`.
    pub fn powi(&self, k: u32) -> Self {
        Self::from_vec_unchecked(
            self.arity,
            self.values.iter().map(|v| v.pow(k as i64)).collect(),
        )
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<Rational, PbfError> {
        self.check_same_arity(other)?;
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero))
    }

    /// `G(x) = F(x_{perm[0]}, ..., x_{perm[n-1]})`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, PbfError> {
        let n = self.arity;
        if perm.len() != n {
            return Err(PbfError::ArityMismatch {
                left: n,
                right: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n {
                return Err(PbfError::PositionOutOfRange {
                    position: p,
                    arity: n,
                });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(PbfError::DuplicatePin(p));
            }
        }
        Ok(Self::from_fn(n, |mask| {
            let mut src = 0;
            for (i, &p) in perm.iter().enumerate() {
                if mask >> p & 1 == 1 {
                    src |= 1 << i;
                }
            }
            self.values[src].clone()
        }))
    }

    /// Binary transpose `F(x2, x1)`.
    pub fn transpose(&self) -> Self {
        assert_eq!(self.arity, 2);
        self.permute(&[1, 0]).expect("valid permutation")
    }

    fn check_same_arity(&self, other: &Self) -> Result<(), PbfError> {
        if self.arity != other.arity {
            return Err(PbfError::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for FnTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnTable[{}](", self.arity)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for FnTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn bits_to_mask(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |m, (i, &b)| m | ((b as usize & 1) << i))
}

pub fn mask_to_bits(mask: usize, arity: usize) -> Vec<u8> {
    (0..arity).map(|i| (mask >> i & 1) as u8).collect()
}
