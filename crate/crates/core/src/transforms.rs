//! Multiplicative Möbius and Fourier transforms, and the classes `P` and `C`.

use serde::Serialize;

use crate::pbf::{FnTable, Pinning};
use crate::value::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("function is not permissive (zero at mask {0})")]
    NotPermissive(usize),
    #[error("coefficient table has length {0}, not a power of two")]
    BadLength(usize),
    #[error("inverse transform has a negative entry at mask {0}")]
    NegativeResult(usize),
}

/// `M(y) = Π_{w ≤ y} F(w)^{(-1)^{|y - w|}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MobiusTable {
    pub arity: usize,
    pub coeffs: Vec<Rational>,
}

/// `F̂(y) = 2^-n Σ_w (-1)^{|w ∧ y|} F(w)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FourierTable {
    pub arity: usize,
    pub coeffs: Vec<Rational>,
}

pub fn mobius(f: &FnTable) -> Result<MobiusTable, TransformError> {
    if let Some(m) = f.values().iter().position(|v| !v.is_positive()) {
        return Err(TransformError::NotPermissive(m));
    }
    let n = f.arity();
    let mut c = f.values().to_vec();
    for i in 0..n {
        for y in 0..c.len() {
            if y >> i & 1 == 1 {
                c[y] = &c[y] / &c[y ^ (1 << i)];
            }
        }
    }
    Ok(MobiusTable {
        arity: n,
        coeffs: c,
    })
}

/// `F(x) = Π_{y ≤ x} M(y)`.
pub fn inverse_mobius(m: &MobiusTable) -> Result<FnTable, TransformError> {
    let mut c = m.coeffs.clone();
    if c.len() != 1 << m.arity {
        return Err(TransformError::BadLength(c.len()));
    }
    if let Some(y) = c.iter().position(|v| !v.is_positive()) {
        return Err(TransformError::NegativeResult(y));
    }
    for i in 0..m.arity {
        for y in 0..c.len() {
            if y >> i & 1 == 1 {
                c[y] = &c[y] * &c[y ^ (1 << i)];
            }
        }
    }
    Ok(FnTable::new(m.arity, c).expect("positive entries"))
}

fn walsh_hadamard(values: &mut [Rational]) {
    let len = values.len();
    let mut h = 1;
    while h < len {
        for start in (0..len).step_by(2 * h) {
            for j in start..start + h {
                let a = values[j].clone();
                let b = values[j + h].clone();
                values[j] = &a + &b;
                values[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

pub fn fourier(f: &FnTable) -> FourierTable {
    let mut c = f.values().to_vec();
    walsh_hadamard(&mut c);
    let scale = Rational::pow2(-(f.arity() as i64));
    for v in &mut c {
        *v = &*v * &scale;
    }
    FourierTable {
        arity: f.arity(),
        coeffs: c,
    }
}

impl FourierTable {
    pub fn get(&self, mask: usize) -> &Rational {
        &self.coeffs[mask]
    }

    /// `F(w) = Σ_y (-1)^{|w ∧ y|} F̂(y)`, as signed values.
    pub fn inverse_values(&self) -> Vec<Rational> {
        let mut c = self.coeffs.clone();
        walsh_hadamard(&mut c);
        c
    }

    pub fn inverse(&self) -> Result<FnTable, TransformError> {
        let v = self.inverse_values();
        if let Some(m) = v.iter().position(Rational::is_negative) {
            return Err(TransformError::NegativeResult(m));
        }
        Ok(FnTable::new(self.arity, v).expect("nonnegative entries"))
    }

    /// `(F̂ * Ĝ)(x) = Σ_y F̂(y) Ĝ(x ⊕ y)`.
    pub fn convolve(&self, other: &FourierTable) -> FourierTable {
        assert_eq!(self.arity, other.arity);
        let len = self.coeffs.len();
        let coeffs = (0..len)
            .map(|x| {
                (0..len)
                    .map(|y| &self.coeffs[y] * &other.coeffs[x ^ y])
                    .sum()
            })
            .collect();
        FourierTable {
            arity: self.arity,
            coeffs,
        }
    }
}

/// Checks `(FG)^ = F̂ * Ĝ` for two tables of equal arity.
pub fn convolution_check(f: &FnTable, g: &FnTable) -> bool {
    let fg = f.mul_pointwise(g).expect("equal arity");
    fourier(&fg) == fourier(f).convolve(&fourier(g))
}

/// Outcome of a class-membership test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "witness", rename_all = "snake_case")]
pub enum ClassCheck<W> {
    Member,
    NotMember(W),
}

impl<W> ClassCheck<W> {
    pub fn is_member(&self) -> bool {
        matches!(self, ClassCheck::Member)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            ClassCheck::Member => None,
            ClassCheck::NotMember(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NegativeCoefficient {
    pub mask: usize,
    pub value: Rational,
}

/// `F ∈ P` iff every Fourier coefficient is nonnegative. The witness is the
/// negative coefficient with the smallest mask.
pub fn in_class_p(f: &FnTable) -> ClassCheck<NegativeCoefficient> {
    let hat = fourier(f);
    match hat.coeffs.iter().position(Rational::is_negative) {
        None => ClassCheck::Member,
        Some(mask) => ClassCheck::NotMember(NegativeCoefficient {
            mask,
            value: hat.coeffs[mask].clone(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassCWitness {
    pub pins: Vec<(usize, bool)>,
    pub mask: usize,
    pub value: Rational,
}

/// Pinnings leaving at least two free positions, ordered by pinned set
/// (as a sorted list, lexicographically) and then by the constants.
pub fn pinnings_of_arity_two_or_more(n: usize) -> Vec<Pinning> {
    if n < 2 {
        return Vec::new();
    }
    let mut sets: Vec<Vec<usize>> = (0..1usize << n)
        .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.len() <= n - 2)
        .collect();
    sets.sort();
    let mut out = Vec::new();
    for s in sets {
        let k = s.len();
        for c in 0..1usize << k {
            // The first pinned position is the most significant constant.
            let pins = s
                .iter()
                .enumerate()
                .map(|(t, &p)| (p, c >> (k - 1 - t) & 1 == 1));
            out.push(Pinning::new(pins).expect("distinct positions"));
        }
    }
    out
}

/// `F ∈ C` iff `(F^π)*` is in `P` for every pinning `F^π` of arity at least 2.
/// Functions of arity below 2 are members vacuously.
pub fn in_class_c(f: &FnTable) -> ClassCheck<ClassCWitness> {
    for pins in pinnings_of_arity_two_or_more(f.arity()) {
        let g = f.pin(&pins).expect("positions in range");
        if let ClassCheck::NotMember(w) = in_class_p(&g.star()) {
            return ClassCheck::NotMember(ClassCWitness {
                pins: pins.iter().collect(),
                mask: w.mask,
                value: w.value,
            });
        }
    }
    ClassCheck::Member
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbf::*;
    use crate::value::q;

    #[test]
    fn fourier_examples() {
        assert_eq!(
            fourier(&eq_weighted()).coeffs,
            vec![q(3, 2), q(0, 1), q(0, 1), q(1, 2)]
        );
        assert_eq!(fourier(&neq()).get(3), &q(-1, 2));
        assert_eq!(
            fourier(&xor3()).coeffs,
            eq3().scale(&q(1, 2)).values().to_vec()
        );
    }

    #[test]
    fn fourier_round_trip() {
        let f = FnTable::from_ints(3, &[1, 0, 4, 2, 7, 1, 0, 3]).unwrap();
        assert_eq!(fourier(&f).inverse().unwrap(), f);
    }

    #[test]
    fn mobius_chi() {
        let chi = FnTable::from_fn(3, |m| if m & 0b101 == 0b101 { q(3, 1) } else { q(1, 1) });
        let m = mobius(&chi).unwrap();
        for y in 0..8 {
            assert_eq!(m.coeffs[y], if y == 0b101 { q(3, 1) } else { q(1, 1) });
        }
        assert_eq!(inverse_mobius(&m).unwrap(), chi);
        assert_eq!(mobius(&imp()), Err(TransformError::NotPermissive(1)));
    }

    #[test]
    fn class_p_examples() {
        let w = in_class_p(&imp());
        assert_eq!(
            w,
            ClassCheck::NotMember(NegativeCoefficient {
                mask: 0b10,
                value: q(-1, 4)
            })
        );
        assert!(in_class_p(&FnTable::unary(q(3, 1), q(1, 1))).is_member());
        assert!(!in_class_p(&FnTable::unary(q(1, 1), q(3, 1))).is_member());
    }

    #[test]
    fn class_c_examples() {
        let f4 = FnTable::from_fn(4, |m| match m.count_ones() {
            4 => q(4, 1),
            3 => q(2, 1),
            _ => q(1, 1),
        });
        let w = in_class_c(&f4);
        assert_eq!(
            w,
            ClassCheck::NotMember(ClassCWitness {
                pins: vec![],
                mask: 0b1111,
                value: q(-1, 8)
            })
        );
        assert!(in_class_c(&eq()).is_member());
        assert!(in_class_c(&imp()).is_member());
        assert!(in_class_c(&eq_weighted()).is_member());
    }

    #[test]
    fn pinning_order() {
        let p = pinnings_of_arity_two_or_more(4);
        assert!(p[0].is_empty());
        assert_eq!(p[1].iter().collect::<Vec<_>>(), vec![(0, false)]);
        assert_eq!(p[2].iter().collect::<Vec<_>>(), vec![(0, true)]);
        assert_eq!(
            p[3].iter().collect::<Vec<_>>(),
            vec![(0, false), (1, false)]
        );
        assert_eq!(p.len(), 1 + 4 * 2 + 6 * 4);
    }
}
