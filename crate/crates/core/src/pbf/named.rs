use super::FnTable;
use crate::value::Rational;

fn indicator(arity: usize, pred: impl Fn(usize) -> bool) -> FnTable {
    FnTable::from_fn(arity, |m| {
        if pred(m) {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// `IMP(x, y) = 0` iff `x = 1, y = 0`.
pub fn imp() -> FnTable {
    indicator(2, |m| m != 0b01)
}

pub fn eq() -> FnTable {
    indicator(2, |m| m == 0b00 || m == 0b11)
}

pub fn neq() -> FnTable {
    indicator(2, |m| m == 0b01 || m == 0b10)
}

pub fn or() -> FnTable {
    indicator(2, |m| m != 0)
}

pub fn nand() -> FnTable {
    indicator(2, |m| m != 0b11)
}

/// `δ_c(x) = [x = c]`.
pub fn delta(c: bool) -> FnTable {
    indicator(1, |m| (m == 1) == c)
}

/// The permissive equality `EQ'`: 2 on the diagonal, 1 elsewhere.
pub fn eq_weighted() -> FnTable {
    FnTable::from_fn(2, |m| Rational::from(if m == 0 || m == 3 { 2 } else { 1 }))
}

/// Even-parity relation `x ⊕ y ⊕ z = 0`.
pub fn xor3() -> FnTable {
    indicator(3, |m| m.count_ones() % 2 == 0)
}

/// `n`-ary equality.
pub fn eq_n(arity: usize) -> FnTable {
    let all = (1usize << arity) - 1;
    indicator(arity, |m| m == 0 || m == all)
}

pub fn eq3() -> FnTable {
    eq_n(3)
}

/// The nullary constant `1/2`.
pub fn half() -> FnTable {
    FnTable::nullary(Rational::new(1, 2))
}

pub fn ones(arity: usize) -> FnTable {
    FnTable::constant(arity, Rational::one())
}

pub fn zeros(arity: usize) -> FnTable {
    FnTable::constant(arity, Rational::zero())
}

/// `IMP_α(x, y)`: 1 everywhere except `α` at `(1, 0)`.
pub fn imp_alpha(alpha: &Rational) -> FnTable {
    FnTable::from_fn(2, |m| {
        if m == 0b01 {
            alpha.clone()
        } else {
            Rational::one()
        }
    })
}

/// `OR_α(x, y)`: 1 everywhere except `α` at `(0, 0)`.
pub fn or_alpha(alpha: &Rational) -> FnTable {
    FnTable::from_fn(2, |m| {
        if m == 0 {
            alpha.clone()
        } else {
            Rational::one()
        }
    })
}
