//! Any nonnegative function from OR-derived IMP and NAND, unary weights and
//! constants, as a limit of exact pps-formulas.

use super::plan::{GadgetPlan, RepeatGroup, Schedule};
use super::GadgetError;
use crate::formula::{Atom, Env, Implementation, PpsFormula};
use crate::pbf::{self, FnTable};
use crate::value::Rational;

#[derive(Debug, Clone)]
pub struct OrUniversal {
    pub target: FnTable,
    /// Smallest positive value of the target.
    pub mu: Rational,
    /// `(A, u_A(1))` for each `A` in the support; `u_A = (1, 2F(A)/μ − 1)`.
    pub weights: Vec<(usize, Rational)>,
    /// `2F(A)/μ` on the support, 1 elsewhere.
    pub psi1: Implementation,
    /// 2 on the support, 1 elsewhere.
    pub psi2: Implementation,
    /// `(μ/2) · F_ψ1 · (½ F_ψ2)^k`.
    pub plan: GadgetPlan,
}

fn xname(i: usize) -> String {
    format!("x{}", i + 1)
}

fn zname(a: usize) -> String {
    format!("z{a}")
}

/// Atoms forcing `x = A` when `z_A = 1`.
fn selector_atoms(n: usize, a: usize, z: &str) -> Vec<Atom> {
    (0..n)
        .map(|i| {
            let f = if a >> i & 1 == 1 { "IMP" } else { "NAND" };
            Atom::from_strings(f, vec![z.to_string(), xname(i)])
        })
        .collect()
}

impl OrUniversal {
    pub fn expected_psi1(&self) -> FnTable {
        let two_over_mu = Rational::from(2) / &self.mu;
        FnTable::from_fn(self.target.arity(), |x| {
            let v = self.target.get(x);
            if v.is_zero() {
                Rational::one()
            } else {
                v * &two_over_mu
            }
        })
    }

    pub fn expected_psi2(&self) -> FnTable {
        FnTable::from_fn(self.target.arity(), |x| {
            Rational::from(if self.target.get(x).is_zero() { 1 } else { 2 })
        })
    }
}

pub fn or_universal(f: &FnTable) -> Result<OrUniversal, GadgetError> {
    let n = f.arity();
    let free: Vec<String> = (0..n).map(xname).collect();
    let support: Vec<usize> = f.support().collect();
    let base_env: Env = [("IMP", pbf::imp()), ("NAND", pbf::nand())]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();

    if support.is_empty() {
        let mut env = base_env;
        env.insert("Zero".into(), FnTable::nullary(Rational::zero()));
        let zero = Implementation {
            formula: PpsFormula {
                free: free.clone(),
                bound: vec![],
                atoms: vec![Atom::new("Zero", &[])],
            },
            env,
        };
        let ones = Implementation {
            formula: PpsFormula {
                free,
                bound: vec![],
                atoms: vec![],
            },
            env: Env::new(),
        };
        return Ok(OrUniversal {
            target: f.clone(),
            mu: Rational::zero(),
            weights: vec![],
            psi1: ones.clone(),
            psi2: ones,
            plan: GadgetPlan::exact("zero function", f.clone(), zero),
        });
    }

    let mu = f.min_nonzero().expect("nonempty support");
    let two = Rational::from(2);
    let weights: Vec<(usize, Rational)> = support
        .iter()
        .map(|&a| (a, &two * f.get(a) / &mu - Rational::one()))
        .collect();

    let bound: Vec<String> = support.iter().map(|&a| zname(a)).collect();
    let mut env1 = base_env.clone();
    let mut atoms1 = Vec::new();
    let mut atoms2 = Vec::new();
    for (a, w) in &weights {
        let z = zname(*a);
        let u = format!("u{a}");
        env1.insert(u.clone(), FnTable::unary(Rational::one(), w.clone()));
        atoms1.push(Atom::from_strings(u, vec![z.clone()]));
        atoms1.extend(selector_atoms(n, *a, &z));
        atoms2.extend(selector_atoms(n, *a, &z));
    }
    let psi1 = Implementation {
        formula: PpsFormula {
            free: free.clone(),
            bound: bound.clone(),
            atoms: atoms1.clone(),
        },
        env: env1.clone(),
    };
    let psi2 = Implementation {
        formula: PpsFormula {
            free: free.clone(),
            bound: bound.clone(),
            atoms: atoms2.clone(),
        },
        env: base_env,
    };

    let mut env = env1;
    env.insert("Scale".into(), FnTable::nullary(&mu / &two));
    let mut atoms = atoms1;
    atoms.push(Atom::new("Scale", &[]));
    let full = support.len() == f.len();
    let (repeated, schedule) = if full {
        (vec![], Schedule::Exact)
    } else {
        env.insert("Half".into(), pbf::half());
        let mut group = atoms2;
        group.push(Atom::new("Half", &[]));
        (
            vec![RepeatGroup {
                bound: bound.clone(),
                atoms: group,
            }],
            Schedule::geometric(&mu / &two, Rational::new(1, 2)),
        )
    };
    let plan = GadgetPlan {
        label: "OR-universal".into(),
        target: f.clone(),
        free,
        bound,
        atoms,
        repeated,
        env,
        schedule,
    };
    Ok(OrUniversal {
        target: f.clone(),
        mu,
        weights,
        psi1,
        psi2,
        plan,
    })
}
