//! Lifting lsm functions to permissive ones, and pulling a non-lsm binary
//! pinning out of a non-lsm function.

use serde::Serialize;

use super::GadgetError;
use crate::analysis::is_lsm;
use crate::pbf::FnTable;
use crate::value::Rational;

/// A permissive lsm `G` with `F = R_F · G`.
///
/// `G(x) = max_{y ≤ x} F'(y) μ^{|x| − |y|}` where `F'` is `F` with `F'(0) = 1`
/// when `F(0) = 0`, and `μ` is the smallest positive value of `F'` over its
/// largest. The zero function lifts to the all-ones function.
pub fn topkis_lift(f: &FnTable) -> Result<FnTable, GadgetError> {
    if !is_lsm(f).is_member() {
        return Err(GadgetError::NotLsm);
    }
    if f.is_all_zero() {
        return Ok(FnTable::constant(f.arity(), Rational::one()));
    }
    let mut vals = f.values().to_vec();
    if vals[0].is_zero() {
        vals[0] = Rational::one();
    }
    let fp = FnTable::new(f.arity(), vals).expect("nonnegative");
    let mu = fp.min_nonzero().expect("nonzero") / fp.max_value();
    let g = FnTable::from_fn(f.arity(), |x| {
        // Enumerate the submasks of x.
        let mut best = Rational::zero();
        let mut y = x;
        loop {
            let v = fp.get(y);
            if !v.is_zero() {
                let d = (x.count_ones() - y.count_ones()) as i64;
                let cand = v * mu.pow(d);
                if cand > best {
                    best = cand;
                }
            }
            if y == 0 {
                break;
            }
            y = (y - 1) & x;
        }
        best
    });
    Ok(g)
}

/// A strictly positive non-lsm binary function obtained from a 2-pinning
/// of `H_k(x) = Σ_y F(y) Π_i H(x_i, y_i)^k` with `H = [[2, 1], [1, 2]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonLsmExtraction {
    pub k: u64,
    pub i: usize,
    pub j: usize,
    pub pins: Vec<(usize, bool)>,
    /// The pinning, indexed by `(x_i, x_j)`.
    pub table: FnTable,
}

/// Largest power searched before giving up.
pub const MAX_POWER: u64 = 1 << 16;

/// `H_k` computed one coordinate at a time.
pub fn smoothed(f: &FnTable, k: u64) -> FnTable {
    let diag = Rational::pow2(k as i64);
    let mut v = f.values().to_vec();
    for i in 0..f.arity() {
        let bit = 1usize << i;
        for x in 0..v.len() {
            if x & bit == 0 {
                let (a, b) = (v[x].clone(), v[x | bit].clone());
                v[x] = &diag * &a + &b;
                v[x | bit] = a + &diag * &b;
            }
        }
    }
    FnTable::new(f.arity(), v).expect("nonnegative")
}

fn violating_pinning(h: &FnTable) -> Option<NonLsmExtraction> {
    h.two_pinnings().ok()?.into_iter().find_map(|p| {
        let t = &p.table;
        (t.entry(0, 0) * t.entry(1, 1) < t.entry(0, 1) * t.entry(1, 0)).then(|| NonLsmExtraction {
            k: 0,
            i: p.i,
            j: p.j,
            pins: p.pins.iter().collect(),
            table: p.table.clone(),
        })
    })
}

/// Searches `k = 1, 2, 4, …` until `H_k` has a non-lsm 2-pinning, then
/// binary-searches down to the least such `k` in the last interval.
pub fn extract_nonlsm_binary(f: &FnTable) -> Result<NonLsmExtraction, GadgetError> {
    if f.arity() < 2 || is_lsm(f).is_member() {
        return Err(GadgetError::AlreadyLsm);
    }
    let mut lo = 0u64;
    let mut hi = 1u64;
    let mut found = loop {
        if let Some(w) = violating_pinning(&smoothed(f, hi)) {
            break w;
        }
        lo = hi;
        hi *= 2;
        if hi > MAX_POWER {
            return Err(GadgetError::InvalidParameter(format!(
                "no violation found up to k = {MAX_POWER}"
            )));
        }
    };
    found.k = hi;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match violating_pinning(&smoothed(f, mid)) {
            Some(mut w) => {
                w.k = mid;
                found = w;
                hi = mid;
            }
            None => lo = mid,
        }
    }
    Ok(found)
}
