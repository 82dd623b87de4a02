//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use fclone_core::analysis::is_lsm;
use fclone_core::formula::{Env, PpsFormula};
use fclone_core::gadgets::chi_table;
use fclone_core::{pbf, q, random, FnTable, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Evaluates `psi` by enumerating every assignment of all its variables.
pub fn brute_evaluate(psi: &PpsFormula, env: &Env) -> FnTable {
    let vars: Vec<&String> = psi.free.iter().chain(psi.bound.iter()).collect();
    let id: HashMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let nf = psi.free.len();
    let nb = psi.bound.len();
    let scopes: Vec<(&FnTable, Vec<usize>)> = psi
        .atoms
        .iter()
        .map(|a| {
            (
                &env[&a.func],
                a.args.iter().map(|v| id[v.as_str()]).collect(),
            )
        })
        .collect();
    FnTable::from_fn(nf, |x| {
        let mut total = Rational::zero();
        for y in 0..1usize << nb {
            let full = x | (y << nf);
            let mut w = Rational::one();
            for (t, scope) in &scopes {
                let mut m = 0;
                for (k, &v) in scope.iter().enumerate() {
                    m |= (full >> v & 1) << k;
                }
                w *= t.get(m);
                if w.is_zero() {
                    break;
                }
            }
            total += w;
        }
        total
    })
}

/// Direct definition of log-supermodularity over all pairs.
pub fn brute_lsm(f: &FnTable) -> bool {
    (0..f.len()).all(|x| (0..f.len()).all(|y| f.get(x) * f.get(y) <= f.get(x & y) * f.get(x | y)))
}

/// Fourier coefficient from its definition.
pub fn brute_fourier(f: &FnTable, y: usize) -> Rational {
    let s: Rational = (0..f.len())
        .map(|w| {
            if (w & y).count_ones().is_multiple_of(2) {
                f.get(w).clone()
            } else {
                -f.get(w).clone()
            }
        })
        .sum();
    s * Rational::pow2(-(f.arity() as i64))
}

/// `Σ_σ Π_e y^{[column e has even overlap with σ]}`, by direct enumeration.
pub fn brute_ising(m: &fclone_core::gadgets::Gf2Matrix, y: &Rational) -> Rational {
    let rows = m.rows();
    let cols = rows[0].len();
    let mut total = Rational::zero();
    for sigma in 0..1usize << rows.len() {
        let mut w = Rational::one();
        for e in 0..cols {
            let odd = rows
                .iter()
                .enumerate()
                .filter(|(i, r)| r[e] && sigma >> i & 1 == 1)
                .count()
                % 2
                == 1;
            if !odd {
                w *= y;
            }
        }
        total += w;
    }
    total
}

/// Number of satisfying assignments of an instance over 0/1 relations, by
/// backtracking over the variables in order.
pub fn count_solutions(inst: &fclone_core::formula::CspInstance, env: &Env) -> u64 {
    let id: HashMap<&str, usize> = inst
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let atoms: Vec<(&FnTable, Vec<usize>)> = inst
        .atoms
        .iter()
        .map(|a| {
            (
                &env[&a.func],
                a.args.iter().map(|v| id[v.as_str()]).collect(),
            )
        })
        .collect();
    // Atoms become checkable once their last variable is set.
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); inst.variables.len() + 1];
    for (k, (_, scope)) in atoms.iter().enumerate() {
        let last = scope.iter().map(|&v| v + 1).max().unwrap_or(0);
        ready[last].push(k);
    }
    fn go(
        depth: usize,
        x: &mut Vec<usize>,
        atoms: &[(&FnTable, Vec<usize>)],
        ready: &[Vec<usize>],
    ) -> u64 {
        let ok = ready[depth].iter().all(|&k| {
            let (t, scope) = &atoms[k];
            let m = scope.iter().enumerate().fold(0, |m, (j, &v)| m | x[v] << j);
            !t.get(m).is_zero()
        });
        if !ok {
            return 0;
        }
        if depth == x.len() {
            return 1;
        }
        let mut n = 0;
        for b in 0..2 {
            x[depth] = b;
            n += go(depth + 1, x, atoms, ready);
        }
        n
    }
    go(0, &mut vec![0; inst.variables.len()], &atoms, &ready)
}

/// A random permissive lsm table of arity 3. Products of up-set weights with
/// `c ≥ 1` on pairs are lsm, and so are their complements.
pub fn random_lsm3<R: Rng>(r: &mut R) -> FnTable {
    if r.gen_bool(0.3) {
        loop {
            let f = random::table_from_grid(r, 3, &[q(1, 1), q(2, 1), q(3, 1), q(4, 1)]);
            if is_lsm(&f).is_member() {
                return f;
            }
        }
    }
    let mut f = pbf::ones(3);
    for y in 0..8usize {
        if r.gen_bool(0.5) {
            let c = if y.count_ones() >= 2 {
                q(r.gen_range(1..=4), 1)
            } else {
                random::positive_rational(r, 5, 3)
            };
            f = f.mul_pointwise(&chi_table(3, y, &c)).unwrap();
        }
    }
    if r.gen_bool(0.5) {
        f.bar()
    } else {
        f
    }
}
