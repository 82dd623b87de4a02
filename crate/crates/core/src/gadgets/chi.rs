//! Up-set indicator weights `χ_{y,c}` and the decomposition of arity-3
//! log-supermodular functions into them.

use serde::Serialize;

use super::GadgetError;
use crate::analysis::is_lsm;
use crate::formula::{Atom, Env, Implementation, PpsFormula};
use crate::pbf::{self, FnTable};
use crate::transforms::mobius;
use crate::value::Rational;

/// `χ(x) = c` if `x ≥ y0` (coordinatewise), 1 otherwise.
pub fn chi_table(arity: usize, y0: usize, c: &Rational) -> FnTable {
    FnTable::from_fn(arity, |x| {
        if x & y0 == y0 {
            c.clone()
        } else {
            Rational::one()
        }
    })
}

fn xname(i: usize) -> String {
    format!("x{}", i + 1)
}

/// A pps-formula for `χ_{y0,c}` over IMP and one unary weight.
///
/// With `|y0| ≥ 2` this is `Σ_z U(z) Π_{i ∈ y0} IMP(z, x_i)` with
/// `U = (1, c − 1)`, which needs `c ≥ 1`. Smaller `y0` give a single unary.
/// When `reversed` is set the formula computes `χ(1 − x)` instead, using
/// `IMP(x_i, z)` and `U = (c − 1, 1)`.
pub fn chi_builder(
    arity: usize,
    y0: usize,
    c: &Rational,
    reversed: bool,
) -> Result<Implementation, GadgetError> {
    if y0 >> arity != 0 {
        return Err(GadgetError::InvalidParameter(format!(
            "mask {y0} exceeds arity {arity}"
        )));
    }
    if c.is_negative() {
        return Err(GadgetError::InvalidParameter(format!(
            "weight {c} is negative"
        )));
    }
    let free: Vec<String> = (0..arity).map(xname).collect();
    let one = Rational::one();
    let members: Vec<usize> = (0..arity).filter(|&i| y0 >> i & 1 == 1).collect();
    let mut env = Env::new();
    let formula = match members.len() {
        0 if arity == 0 => {
            env.insert("C".into(), FnTable::nullary(c.clone()));
            PpsFormula {
                free,
                bound: vec![],
                atoms: vec![Atom::new("C", &[])],
            }
        }
        0 => {
            env.insert("U".into(), FnTable::unary(c.clone(), c.clone()));
            PpsFormula {
                free,
                bound: vec![],
                atoms: vec![Atom::from_strings("U", vec![xname(0)])],
            }
        }
        1 => {
            let u = if reversed {
                FnTable::unary(c.clone(), one)
            } else {
                FnTable::unary(one, c.clone())
            };
            env.insert("U".into(), u);
            PpsFormula {
                free,
                bound: vec![],
                atoms: vec![Atom::from_strings("U", vec![xname(members[0])])],
            }
        }
        _ => {
            if *c < one {
                return Err(GadgetError::InvalidParameter(format!(
                    "weight {c} below 1 needs a non-pps construction for |y| ≥ 2"
                )));
            }
            let u = if reversed {
                FnTable::unary(c - &one, one)
            } else {
                FnTable::unary(one.clone(), c - &one)
            };
            env.insert("U".into(), u);
            env.insert("IMP".into(), pbf::imp());
            let mut atoms = vec![Atom::new("U", &["z"])];
            for &i in &members {
                let args = if reversed {
                    vec![xname(i), "z".into()]
                } else {
                    vec!["z".into(), xname(i)]
                };
                atoms.push(Atom::from_strings("IMP", args));
            }
            PpsFormula {
                free,
                bound: vec!["z".into()],
                atoms,
            }
        }
    };
    Ok(Implementation { formula, env })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChiFactor {
    pub mask: usize,
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lsm3Decomposition {
    /// When set, `F(x) = Π factor(1 − x)`; otherwise `F = Π factor`.
    pub complemented: bool,
    pub factors: Vec<ChiFactor>,
}

impl Lsm3Decomposition {
    pub fn reconstruct(&self) -> FnTable {
        let prod = self.factors.iter().fold(pbf::ones(3), |acc, f| {
            acc.mul_pointwise(&chi_table(3, f.mask, &f.weight))
                .expect("arity 3")
        });
        if self.complemented {
            prod.bar()
        } else {
            prod
        }
    }

    /// A single pps-formula computing the product of the factors.
    pub fn implementation(&self) -> Result<Implementation, GadgetError> {
        let mut env = Env::new();
        let mut formula = PpsFormula {
            free: (0..3).map(xname).collect(),
            bound: vec![],
            atoms: vec![],
        };
        for (t, f) in self.factors.iter().enumerate() {
            let imp = chi_builder(3, f.mask, &f.weight, self.complemented)?;
            for a in imp.formula.atoms {
                let func = if a.func == "IMP" {
                    a.func
                } else {
                    format!("{}{t}", a.func)
                };
                let args = a
                    .args
                    .into_iter()
                    .map(|v| if v == "z" { format!("z{t}") } else { v })
                    .collect();
                formula.atoms.push(Atom::from_strings(func, args));
            }
            formula
                .bound
                .extend(imp.formula.bound.into_iter().map(|_| format!("z{t}")));
            for (name, table) in imp.env {
                let key = if name == "IMP" {
                    name
                } else {
                    format!("{name}{t}")
                };
                env.insert(key, table);
            }
        }
        Ok(Implementation { formula, env })
    }
}

/// Writes a permissive arity-3 lsm function as a product of `χ` weights,
/// possibly after complementing every argument.
pub fn lsm3_decompose(f: &FnTable) -> Result<Lsm3Decomposition, GadgetError> {
    if f.arity() != 3 {
        return Err(GadgetError::WrongArity {
            expected: 3,
            got: f.arity(),
        });
    }
    if !f.is_permissive() {
        return Err(GadgetError::NotPermissive);
    }
    if !is_lsm(f).is_member() {
        return Err(GadgetError::NotLsm);
    }
    let m = mobius(f).expect("permissive");
    let complemented = m.coeffs[0b111] < Rational::one();
    let h = if complemented {
        mobius(&f.bar()).expect("permissive")
    } else {
        m
    };
    let factors = (0..8)
        .filter(|&y| y == 0 || !h.coeffs[y].is_one())
        .map(|y| ChiFactor {
            mask: y,
            weight: h.coeffs[y].clone(),
        })
        .collect();
    Ok(Lsm3Decomposition {
        complemented,
        factors,
    })
}
