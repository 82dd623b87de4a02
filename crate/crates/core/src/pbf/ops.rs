use std::collections::BTreeMap;

use super::{FnTable, PbfError, DEFAULT_ARITY_CAP};
use crate::value::Rational;

/// A partial assignment of constants to positions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pinning {
    assignments: BTreeMap<usize, bool>,
}

impl Pinning {
    pub fn new(pins: impl IntoIterator<Item = (usize, bool)>) -> Result<Self, PbfError> {
        let mut assignments = BTreeMap::new();
        for (p, c) in pins {
            if assignments.insert(p, c).is_some() {
                return Err(PbfError::DuplicatePin(p));
            }
        }
        Ok(Pinning { assignments })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn get(&self, position: usize) -> Option<bool> {
        self.assignments.get(&position).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.assignments.iter().map(|(&p, &c)| (p, c))
    }
}

/// A pinning that leaves exactly positions `i < j` free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPinning {
    pub i: usize,
    pub j: usize,
    pub pins: Pinning,
    pub table: FnTable,
}

/// Position of each scope entry's bit, gathered into a sub-mask.
#[inline]
pub(crate) fn gather(mask: usize, scope: &[usize]) -> usize {
    let mut out = 0;
    for (k, &p) in scope.iter().enumerate() {
        out |= (mask >> p & 1) << k;
    }
    out
}

/// `H(x) = F(x[scope_f]) * G(x[scope_g])` over `out_arity` variables.
/// Scopes may repeat positions.
pub fn product(
    f: &FnTable,
    scope_f: &[usize],
    g: &FnTable,
    scope_g: &[usize],
    out_arity: usize,
) -> Result<FnTable, PbfError> {
    if out_arity > DEFAULT_ARITY_CAP {
        return Err(PbfError::Capacity {
            arity: out_arity,
            cap: DEFAULT_ARITY_CAP,
        });
    }
    for (t, s) in [(f, scope_f), (g, scope_g)] {
        if s.len() != t.arity() {
            return Err(PbfError::ArityMismatch {
                left: t.arity(),
                right: s.len(),
            });
        }
        if let Some(&p) = s.iter().find(|&&p| p >= out_arity) {
            return Err(PbfError::PositionOutOfRange {
                position: p,
                arity: out_arity,
            });
        }
    }
    Ok(FnTable::from_fn(out_arity, |m| {
        f.get(gather(m, scope_f)) * g.get(gather(m, scope_g))
    }))
}

impl FnTable {
    /// Fixes the pinned positions; remaining positions keep their order.
    pub fn pin(&self, pinning: &Pinning) -> Result<FnTable, PbfError> {
        let n = self.arity();
        if let Some((p, _)) = pinning.iter().find(|&(p, _)| p >= n) {
            return Err(PbfError::PositionOutOfRange {
                position: p,
                arity: n,
            });
        }
        let mut base = 0;
        for (p, c) in pinning.iter() {
            if c {
                base |= 1 << p;
            }
        }
        let free: Vec<usize> = (0..n).filter(|&p| pinning.get(p).is_none()).collect();
        Ok(FnTable::from_fn(free.len(), |m| {
            let mut full = base;
            for (k, &p) in free.iter().enumerate() {
                full |= (m >> k & 1) << p;
            }
            self.get(full).clone()
        }))
    }

    pub fn pin_pairs(&self, pins: &[(usize, bool)]) -> Result<FnTable, PbfError> {
        self.pin(&Pinning::new(pins.iter().copied())?)
    }

    /// All binary pinnings, ordered by `(i, j)` and then by the constants
    /// read as a mask over the remaining positions.
    pub fn two_pinnings(&self) -> Result<Vec<TwoPinning>, PbfError> {
        let n = self.arity();
        if n < 2 {
            return Err(PbfError::ArityTooSmall {
                needed: 2,
                arity: n,
            });
        }
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let rest: Vec<usize> = (0..n).filter(|&p| p != i && p != j).collect();
                for c in 0..1usize << rest.len() {
                    let pins =
                        Pinning::new(rest.iter().enumerate().map(|(k, &p)| (p, c >> k & 1 == 1)))?;
                    let table = self.pin(&pins)?;
                    out.push(TwoPinning { i, j, pins, table });
                }
            }
        }
        Ok(out)
    }

    /// `Σ_{x_pos} F(x)`.
    pub fn sum_out(&self, position: usize) -> Result<FnTable, PbfError> {
        let n = self.arity();
        if n == 0 {
            return Err(PbfError::ArityTooSmall {
                needed: 1,
                arity: 0,
            });
        }
        if position >= n {
            return Err(PbfError::PositionOutOfRange { position, arity: n });
        }
        let low = (1usize << position) - 1;
        Ok(FnTable::from_fn(n - 1, |m| {
            let full = (m & low) | ((m & !low) << 1);
            self.get(full) + self.get(full | 1 << position)
        }))
    }

    /// `F(1 - x)`.
    pub fn bar(&self) -> FnTable {
        let all = self.len() - 1;
        FnTable::from_fn(self.arity(), |m| self.get(m ^ all).clone())
    }

    /// `F(x) * F(1 - x)`.
    pub fn star(&self) -> FnTable {
        let all = self.len() - 1;
        FnTable::from_fn(self.arity(), |m| self.get(m) * self.get(m ^ all))
    }

    /// The 0/1 support indicator.
    pub fn underlying_relation(&self) -> FnTable {
        FnTable::from_fn(self.arity(), |m| {
            if self.get(m).is_zero() {
                Rational::zero()
            } else {
                Rational::one()
            }
        })
    }

    pub fn is_permissive(&self) -> bool {
        self.values().iter().all(Rational::is_positive)
    }

    /// True when every entry is 0 or 1.
    pub fn is_relation(&self) -> bool {
        self.values().iter().all(|v| v.is_zero() || v.is_one())
    }
}
