//! Normalising a weighted parity function to the relation `⊕₃`.

use std::fmt;

use serde::Serialize;

use super::GadgetError;
use crate::formula::{Atom, Env, Implementation, PpsFormula};
use crate::pbf::{self, FnTable};
use crate::value::Rational;

/// `radicand^(num/den)`, kept symbolic until asked for an exact value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Radical {
    pub radicand: Rational,
    pub num: i64,
    pub den: u32,
}

impl Radical {
    /// The value when it is rational.
    pub fn exact(&self) -> Option<Rational> {
        self.radicand
            .nth_root_exact(self.den)
            .map(|r| r.pow(self.num))
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^({}/{})", self.radicand, self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Oplus3Normalization {
    pub symmetrised: FnTable,
    pub mu0: Rational,
    pub mu2: Rational,
    /// `U(0) = μ₀^(−1/3)`.
    pub u0: Radical,
    /// `U(1) = (μ₀ / μ₂³)^(1/6)`.
    pub u1: Radical,
    /// `U(x)U(y)U(z)F''(x,y,z)`, present when both weights are rational.
    pub normalized: Option<FnTable>,
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

pub fn oplus3_normalize(f: &FnTable) -> Result<Oplus3Normalization, GadgetError> {
    if f.arity() != 3 {
        return Err(GadgetError::WrongArity {
            expected: 3,
            got: f.arity(),
        });
    }
    if f.underlying_relation() != pbf::xor3() {
        return Err(GadgetError::RelationMismatch);
    }
    let symmetrised = PERMS.iter().fold(pbf::ones(3), |acc, p| {
        acc.mul_pointwise(&f.permute(p).expect("permutation"))
            .expect("arity 3")
    });
    let mu0 = symmetrised.get(0).clone();
    let mu2 = symmetrised.get(0b110).clone();
    let u0 = Radical {
        radicand: mu0.clone(),
        num: -1,
        den: 3,
    };
    let u1 = Radical {
        radicand: &mu0 / mu2.pow(3),
        num: 1,
        den: 6,
    };
    let normalized = match (u0.exact(), u1.exact()) {
        (Some(a), Some(b)) => {
            let u = [a, b];
            Some(FnTable::from_fn(3, |x| {
                let w: Rational = (0..3).map(|i| u[x >> i & 1].clone()).product();
                w * symmetrised.get(x)
            }))
        }
        _ => None,
    };
    Ok(Oplus3Normalization {
        symmetrised,
        mu0,
        mu2,
        u0,
        u1,
        normalized,
    })
}

/// `G(x, z) = Σ_y ⊕₃(x, y, z) U'(y)` with `U' = (1, 2)`.
pub fn oplus3_imp_gadget() -> Implementation {
    let env: Env = [
        ("XOR3".to_string(), pbf::xor3()),
        (
            "U".to_string(),
            pbf::FnTable::from_ints(1, &[1, 2]).unwrap(),
        ),
    ]
    .into_iter()
    .collect();
    let formula = PpsFormula::new(
        &["x", "z"],
        &["y"],
        vec![Atom::new("XOR3", &["x", "y", "z"]), Atom::new("U", &["y"])],
    );
    Implementation { formula, env }
}
