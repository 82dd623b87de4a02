//! Seeded generators for tables, formulas and matrices used by tests and
//! the verification commands.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{Atom, Env, PpsFormula};
use crate::gadgets::Gf2Matrix;
use crate::pbf::FnTable;
use crate::value::Rational;

/// `p/q` with `0 ≤ p ≤ max_num` and `1 ≤ q ≤ max_den`.
pub fn rational<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    Rational::new(rng.gen_range(0..=max_num), rng.gen_range(1..=max_den))
}

/// A strictly positive `p/q`.
pub fn positive_rational<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    Rational::new(
        rng.gen_range(1..=max_num.max(1)),
        rng.gen_range(1..=max_den),
    )
}

/// Entries drawn from `grid`.
pub fn table_from_grid<R: Rng + ?Sized>(rng: &mut R, arity: usize, grid: &[Rational]) -> FnTable {
    FnTable::from_fn(arity, |_| grid.choose(rng).expect("nonempty grid").clone())
}

/// Nonnegative entries, each zero with probability `zero_prob`.
pub fn table<R: Rng + ?Sized>(rng: &mut R, arity: usize, zero_prob: f64) -> FnTable {
    FnTable::from_fn(arity, |_| {
        if rng.gen_bool(zero_prob) {
            Rational::zero()
        } else {
            positive_rational(rng, 9, 4)
        }
    })
}

pub fn permissive_table<R: Rng + ?Sized>(rng: &mut R, arity: usize) -> FnTable {
    table(rng, arity, 0.0)
}

/// A 0/1 table.
pub fn relation<R: Rng + ?Sized>(rng: &mut R, arity: usize) -> FnTable {
    FnTable::from_fn(arity, |_| Rational::from(rng.gen_range(0..=1i64)))
}

/// Shape parameters for [`formula`].
#[derive(Debug, Clone, Copy)]
pub struct FormulaShape {
    pub free: usize,
    pub bound: usize,
    pub atoms: usize,
    pub max_atom_arity: usize,
    pub zero_prob: f64,
}

/// A random formula together with an environment holding one table per atom.
/// Atoms may repeat variables and may be nullary.
pub fn formula<R: Rng + ?Sized>(rng: &mut R, shape: FormulaShape) -> (PpsFormula, Env) {
    let free: Vec<String> = (0..shape.free).map(|i| format!("x{i}")).collect();
    let bound: Vec<String> = (0..shape.bound).map(|i| format!("y{i}")).collect();
    let vars: Vec<&String> = free.iter().chain(bound.iter()).collect();
    let mut env = Env::new();
    let mut atoms = Vec::with_capacity(shape.atoms);
    for a in 0..shape.atoms {
        let arity = if vars.is_empty() {
            0
        } else {
            rng.gen_range(0..=shape.max_atom_arity)
        };
        let name = format!("F{a}");
        env.insert(name.clone(), table(rng, arity, shape.zero_prob));
        let args = (0..arity)
            .map(|_| (*vars.choose(rng).expect("variables")).clone())
            .collect();
        atoms.push(Atom::from_strings(name, args));
    }
    (PpsFormula { free, bound, atoms }, env)
}

pub fn gf2_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Gf2Matrix {
    Gf2Matrix::new(
        (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_bool(0.5)).collect())
            .collect(),
    )
    .expect("nonempty dimensions")
}
