//! Exact evaluation by variable elimination.
//!
//! Equality atoms are contracted first with a union-find pass. The remaining
//! bound variables are eliminated in greedy min-degree order (ties broken by
//! the lowest variable id, free variables first in id order).

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;
use smallvec::SmallVec;

use super::{Atom, CspInstance, Env, FormulaError, PpsFormula};
use crate::pbf::{self, FnTable, DEFAULT_ARITY_CAP};
use crate::value::Rational;

pub const DEFAULT_INTERMEDIATE_CAP: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Largest arity of an intermediate product table.
    pub intermediate_cap: usize,
    /// Largest arity of the returned table.
    pub output_cap: usize,
    /// Intermediate tables at least this large are filled in parallel.
    pub parallel_threshold: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            intermediate_cap: DEFAULT_INTERMEDIATE_CAP,
            output_cap: DEFAULT_ARITY_CAP,
            parallel_threshold: 1 << 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanStep {
    pub variable: String,
    /// Arity of the table produced after summing the variable out.
    pub arity: usize,
    /// Arity of the product formed before the sum.
    pub product_arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct EliminationPlan {
    pub steps: Vec<PlanStep>,
    /// Bound variables replaced by a representative through equality atoms.
    pub substituted: Vec<(String, String)>,
    /// Bound variables that occur in no atom; each contributes a factor 2.
    pub isolated: Vec<String>,
}

impl EliminationPlan {
    pub fn order(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.variable.as_str()).collect()
    }

    /// Largest arity produced by a step (0 for an empty plan).
    pub fn width(&self) -> usize {
        self.steps.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    pub fn max_product_arity(&self) -> usize {
        self.steps
            .iter()
            .map(|s| s.product_arity)
            .max()
            .unwrap_or(0)
    }
}

type Table = Arc<[Rational]>;
type Scope = SmallVec<[u32; 4]>;

/// The parts of a formula the evaluator reads, borrowed.
#[derive(Clone, Copy)]
struct View<'a> {
    free: &'a [String],
    bound: &'a [String],
    atoms: &'a [Atom],
}

impl<'a> View<'a> {
    fn formula(psi: &'a PpsFormula) -> Self {
        View {
            free: &psi.free,
            bound: &psi.bound,
            atoms: &psi.atoms,
        }
    }

    fn instance(inst: &'a CspInstance) -> Self {
        View {
            free: &[],
            bound: &inst.variables,
            atoms: &inst.atoms,
        }
    }

    fn name(&self, v: u32) -> &'a String {
        let v = v as usize;
        if v < self.free.len() {
            &self.free[v]
        } else {
            &self.bound[v - self.free.len()]
        }
    }
}

struct Compiled {
    n_free: usize,
    rep: Vec<u32>,
    factors: Vec<(Scope, Table)>,
    scalar: Rational,
    /// Bound class representatives that carry at least one factor.
    active: Vec<u32>,
    isolated: Vec<u32>,
    free_reps: Vec<u32>,
}

fn find(parent: &mut [u32], mut v: u32) -> u32 {
    let mut root = v;
    while parent[root as usize] != root {
        root = parent[root as usize];
    }
    while parent[v as usize] != root {
        let next = parent[v as usize];
        parent[v as usize] = root;
        v = next;
    }
    root
}

struct Func<'e> {
    table: &'e FnTable,
    values: Table,
    is_eq: bool,
}

/// Validates `view` against `env` and builds the factor list, with the same
/// errors as [`PpsFormula::validate`].
fn compile(view: View<'_>, env: &Env) -> Result<Compiled, FormulaError> {
    let n_free = view.free.len();
    let n = n_free + view.bound.len();
    let mut ids: FxHashMap<&str, u32> = FxHashMap::with_capacity_and_hasher(n, Default::default());
    for (i, v) in view.free.iter().chain(view.bound).enumerate() {
        if v.is_empty() {
            return Err(FormulaError::InvalidName(v.clone()));
        }
        if ids.insert(v.as_str(), i as u32).is_some() {
            return Err(FormulaError::DuplicateVariable(v.clone()));
        }
    }

    let eq = pbf::eq();
    let mut func_ids: FxHashMap<&str, u32> = FxHashMap::default();
    let mut funcs: Vec<Func> = Vec::new();
    let mut atom_func: Vec<u32> = Vec::with_capacity(view.atoms.len());
    let mut args: Vec<u32> = Vec::with_capacity(2 * view.atoms.len());
    let mut last = 0u32;
    for (index, atom) in view.atoms.iter().enumerate() {
        let f = match func_ids.get(atom.func.as_str()) {
            Some(&f) => f,
            None => {
                let table = env
                    .get(&atom.func)
                    .ok_or_else(|| FormulaError::UndefinedFunction(atom.func.clone()))?;
                funcs.push(Func {
                    table,
                    values: table.shared_values(),
                    is_eq: *table == eq,
                });
                func_ids.insert(&atom.func, funcs.len() as u32 - 1);
                funcs.len() as u32 - 1
            }
        };
        let arity = funcs[f as usize].table.arity();
        if arity != atom.args.len() {
            return Err(FormulaError::ArityMismatch {
                atom: index,
                func: atom.func.clone(),
                expected: arity,
                got: atom.args.len(),
            });
        }
        for v in &atom.args {
            // Atoms tend to follow declaration order, so try the neighbours
            // of the previous argument before hashing.
            let near = [last, last + 1]
                .into_iter()
                .find(|&i| (i as usize) < n && view.name(i) == v);
            match near.or_else(|| ids.get(v.as_str()).copied()) {
                Some(id) => {
                    args.push(id);
                    last = id;
                }
                None => {
                    return Err(FormulaError::UnknownVariable {
                        atom: index,
                        variable: v.clone(),
                    })
                }
            }
        }
        atom_func.push(f);
    }
    drop(ids);

    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut start = 0;
    for &f in &atom_func {
        let func = &funcs[f as usize];
        if func.is_eq {
            let a = find(&mut parent, args[start]);
            let b = find(&mut parent, args[start + 1]);
            // Free variables have the lowest ids, so the minimum keeps a free
            // representative whenever the class has one.
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi as usize] = lo;
        }
        start += func.table.arity();
    }
    let rep: Vec<u32> = (0..n as u32).map(|v| find(&mut parent, v)).collect();

    let mut scalar = Rational::one();
    let mut factors = Vec::with_capacity(atom_func.len());
    let mut used = vec![false; n];
    let mut start = 0;
    for &f in &atom_func {
        let func = &funcs[f as usize];
        let arity = func.table.arity();
        let atom_args = &args[start..start + arity];
        start += arity;
        if func.is_eq {
            continue;
        }
        let mut scope = Scope::new();
        for &a in atom_args {
            let r = rep[a as usize];
            if !scope.contains(&r) {
                scope.push(r);
            }
        }
        if scope.is_empty() {
            scalar *= func.table.get(0);
            continue;
        }
        for &v in &scope {
            used[v as usize] = true;
        }
        let values = if scope.len() == arity {
            Arc::clone(&func.values)
        } else {
            let pos: Vec<usize> = atom_args
                .iter()
                .map(|&a| scope.iter().position(|&s| s == rep[a as usize]).unwrap())
                .collect();
            (0..1usize << scope.len())
                .map(|m| {
                    let idx = pos
                        .iter()
                        .enumerate()
                        .fold(0, |acc, (k, &p)| acc | ((m >> p & 1) << k));
                    func.table.get(idx).clone()
                })
                .collect()
        };
        factors.push((scope, values));
    }

    let mut active = Vec::new();
    let mut isolated = Vec::new();
    for v in n_free..n {
        if rep[v] as usize == v {
            if used[v] {
                active.push(v as u32);
            } else {
                isolated.push(v as u32);
            }
        }
    }
    let free_reps = (0..n_free as u32)
        .filter(|&v| rep[v as usize] == v)
        .collect();
    Ok(Compiled {
        n_free,
        rep,
        factors,
        scalar,
        active,
        isolated,
        free_reps,
    })
}

type Parts<T> = SmallVec<[(Scope, T); 3]>;

/// Factors indexed by the variables they mention.
struct Buckets<T> {
    var_factors: Vec<SmallVec<[u32; 3]>>,
    factors: Vec<Option<(Scope, T)>>,
    mark: Vec<u32>,
    stamp: u32,
}

impl<T> Buckets<T> {
    fn new(n: usize) -> Self {
        Buckets {
            var_factors: vec![SmallVec::new(); n],
            factors: Vec::with_capacity(2 * n),
            mark: vec![0; n],
            stamp: 0,
        }
    }

    fn add(&mut self, scope: Scope, payload: T) {
        let id = self.factors.len() as u32;
        for &v in &scope {
            self.var_factors[v as usize].push(id);
        }
        self.factors.push(Some((scope, payload)));
    }

    fn take(&mut self, v: u32) -> Parts<T> {
        let ids = std::mem::take(&mut self.var_factors[v as usize]);
        ids.into_iter()
            .filter_map(|id| self.factors[id as usize].take())
            .collect()
    }

    /// Number of distinct variables sharing a live factor with `v`. Drops
    /// the ids of consumed factors on the way.
    fn degree(&mut self, v: u32) -> usize {
        self.stamp += 1;
        let stamp = self.stamp;
        self.mark[v as usize] = stamp;
        let ids = &mut self.var_factors[v as usize];
        let (mut d, mut kept) = (0, 0);
        for i in 0..ids.len() {
            let id = ids[i];
            let Some((scope, _)) = &self.factors[id as usize] else {
                continue;
            };
            ids[kept] = id;
            kept += 1;
            for &u in scope {
                if self.mark[u as usize] != stamp {
                    self.mark[u as usize] = stamp;
                    d += 1;
                }
            }
        }
        ids.truncate(kept);
        d
    }

    fn remaining(self) -> impl Iterator<Item = (Scope, T)> {
        self.factors.into_iter().flatten()
    }
}

fn union_without<T>(parts: &[(Scope, T)], v: u32) -> Scope {
    let mut out: Scope = parts
        .iter()
        .flat_map(|(s, _)| s.iter().copied())
        .filter(|&u| u != v)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Min-priority queue on `(degree, variable)` with one heap per degree.
/// Stale entries are skipped by the caller.
#[derive(Default)]
struct DegreeQueue {
    buckets: Vec<BinaryHeap<Reverse<u32>>>,
    lowest: usize,
}

impl DegreeQueue {
    fn push(&mut self, d: usize, v: u32) {
        if d >= self.buckets.len() {
            self.buckets.resize_with(d + 1, BinaryHeap::new);
        }
        self.buckets[d].push(Reverse(v));
        self.lowest = self.lowest.min(d);
    }

    fn pop(&mut self) -> Option<(usize, u32)> {
        while self.lowest < self.buckets.len() {
            if let Some(Reverse(v)) = self.buckets[self.lowest].pop() {
                return Some((self.lowest, v));
            }
            self.lowest += 1;
        }
        None
    }
}

/// Eliminates the active bound variables of `c` in greedy min-degree order.
///
/// `combine` receives each variable, its factors and the scope of their
/// product with the variable summed out. Returns the order with the arity
/// of each step.
fn eliminate_min_degree<T>(
    c: &Compiled,
    b: &mut Buckets<T>,
    cap: usize,
    view: View<'_>,
    mut combine: impl FnMut(u32, Parts<T>, &[u32]) -> T,
) -> Result<Vec<(u32, usize)>, FormulaError> {
    let n = c.rep.len();
    let mut current = vec![usize::MAX; n];
    let mut eliminable = vec![false; n];
    let mut queue = DegreeQueue::default();
    for &v in &c.active {
        eliminable[v as usize] = true;
        let d = b.degree(v);
        current[v as usize] = d;
        queue.push(d, v);
    }
    let mut left = c.active.len();
    let mut order = Vec::with_capacity(left);
    while left > 0 {
        let (d, v) = queue.pop().expect("live variables remain queued");
        if !eliminable[v as usize] || current[v as usize] != d {
            continue;
        }
        eliminable[v as usize] = false;
        left -= 1;
        let parts = b.take(v);
        let scope = union_without(&parts, v);
        let product_arity = scope.len() + 1;
        if product_arity > cap {
            return Err(FormulaError::IntermediateArity {
                step: order.len(),
                variable: view.name(v).clone(),
                arity: product_arity,
                cap,
            });
        }
        order.push((v, scope.len()));
        let payload = combine(v, parts, &scope);
        if !scope.is_empty() {
            b.add(scope.clone(), payload);
            for &u in &scope {
                if eliminable[u as usize] {
                    let du = b.degree(u);
                    if du != current[u as usize] {
                        current[u as usize] = du;
                        queue.push(du, u);
                    }
                }
            }
        }
    }
    Ok(order)
}

/// Multiplies `parts` and sums out `v`, giving a table over `out`.
fn eliminate(v: u32, parts: Parts<Table>, out: &[u32], opts: &EvalOptions) -> Table {
    let mut prepared: SmallVec<[(SmallVec<[u8; 4]>, Table); 3]> = SmallVec::new();
    for (scope, t) in parts {
        let mut pos = SmallVec::new();
        for &u in &scope {
            pos.push(if u == v {
                0
            } else {
                1 + out.iter().position(|&w| w == u).unwrap() as u8
            });
        }
        prepared.push((pos, t));
    }
    let entry = |m: usize| -> Rational {
        let mut total = Rational::zero();
        for bit in 0..2usize {
            let ext = (m << 1) | bit;
            let mut prod = Rational::one();
            for (pos, t) in &prepared {
                let idx = pos
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (k, &p)| acc | ((ext >> p & 1) << k));
                let val = &t[idx];
                if val.is_zero() {
                    prod = Rational::zero();
                    break;
                }
                if !val.is_one() {
                    prod *= val;
                }
            }
            total += &prod;
        }
        total
    };
    let size = 1usize << out.len();
    if size >= opts.parallel_threshold {
        (0..size)
            .into_par_iter()
            .map(entry)
            .collect::<Vec<_>>()
            .into()
    } else {
        (0..size).map(entry).collect()
    }
}

fn run(view: View<'_>, env: &Env, opts: &EvalOptions) -> Result<FnTable, FormulaError> {
    if view.free.len() > opts.output_cap {
        return Err(FormulaError::OutputArity {
            arity: view.free.len(),
            cap: opts.output_cap,
        });
    }
    let mut c = compile(view, env)?;
    let mut b: Buckets<Table> = Buckets::new(c.rep.len());
    for (scope, t) in std::mem::take(&mut c.factors) {
        b.add(scope, t);
    }
    let mut scalar = c.scalar.clone() * Rational::pow2(c.isolated.len() as i64);
    eliminate_min_degree(
        &c,
        &mut b,
        opts.intermediate_cap,
        view,
        |v, parts, scope| {
            let table = eliminate(v, parts, scope, opts);
            if scope.is_empty() {
                scalar *= &table[0];
            }
            table
        },
    )?;

    // Every remaining factor lives on free representatives.
    let k = c.free_reps.len();
    let remaining: Vec<(Vec<usize>, Table)> = b
        .remaining()
        .map(|(scope, t)| {
            let pos = scope
                .iter()
                .map(|u| c.free_reps.binary_search(u).unwrap())
                .collect();
            (pos, t)
        })
        .collect();
    let reduced: Vec<Rational> = (0..1usize << k)
        .map(|m| {
            let mut prod = scalar.clone();
            for (pos, t) in &remaining {
                if prod.is_zero() {
                    break;
                }
                let idx = pos
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (j, &p)| acc | ((m >> p & 1) << j));
                prod *= &t[idx];
            }
            prod
        })
        .collect();

    let n_free = c.n_free;
    if k == n_free {
        return Ok(FnTable::from_vec_unchecked(n_free, reduced));
    }
    let values = (0..1usize << n_free)
        .map(|x| {
            let consistent = (0..n_free).all(|i| (x >> i & 1) == (x >> c.rep[i] & 1));
            if !consistent {
                return Rational::zero();
            }
            let idx = c
                .free_reps
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &r)| acc | ((x >> r & 1) << j));
            reduced[idx].clone()
        })
        .collect();
    Ok(FnTable::from_vec_unchecked(n_free, values))
}

/// Exact table of `ψ` over its free variables, in declaration order.
pub fn evaluate(psi: &PpsFormula, env: &Env) -> Result<FnTable, FormulaError> {
    run(View::formula(psi), env, &EvalOptions::default())
}

pub fn evaluate_with(
    psi: &PpsFormula,
    env: &Env,
    opts: &EvalOptions,
) -> Result<FnTable, FormulaError> {
    run(View::formula(psi), env, opts)
}

/// `Z(I)`: the sum over all assignments of the product of constraints.
pub fn partition_function(instance: &CspInstance, env: &Env) -> Result<Rational, FormulaError> {
    partition_function_with(instance, env, &EvalOptions::default())
}

pub fn partition_function_with(
    instance: &CspInstance,
    env: &Env,
    opts: &EvalOptions,
) -> Result<Rational, FormulaError> {
    let t = run(View::instance(instance), env, opts)?;
    Ok(t.get(0).clone())
}

/// The order `evaluate` will use, with the arity of each intermediate.
pub fn plan_elimination(
    psi: &PpsFormula,
    env: &Env,
    cap: usize,
) -> Result<EliminationPlan, FormulaError> {
    let view = View::formula(psi);
    let mut c = compile(view, env)?;
    let mut b: Buckets<()> = Buckets::new(c.rep.len());
    for (scope, _) in std::mem::take(&mut c.factors) {
        b.add(scope, ());
    }
    let order = eliminate_min_degree(&c, &mut b, cap, view, |_, _, _| ())?;
    let names: Vec<&String> = psi.variables().collect();
    let steps = order
        .into_iter()
        .map(|(v, arity)| PlanStep {
            variable: names[v as usize].clone(),
            arity,
            product_arity: arity + 1,
        })
        .collect();
    let substituted = (c.n_free..c.rep.len())
        .filter(|&v| c.rep[v] as usize != v)
        .map(|v| (names[v].clone(), names[c.rep[v] as usize].clone()))
        .collect();
    let isolated = c
        .isolated
        .iter()
        .map(|&v| names[v as usize].clone())
        .collect();
    Ok(EliminationPlan {
        steps,
        substituted,
        isolated,
    })
}
