use std::collections::HashMap;

use serde::Serialize;

use super::{Env, FormulaError, PpsFormula};
use crate::value::Rational;

/// Largest `n + m` for which the bound constant is computed by enumeration.
pub const TOLERANCE_ENUMERATION_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToleranceBudget {
    /// Per-atom perturbation that keeps the formula within `ε/2`.
    pub delta: Rational,
    /// `max_{x,y,T} C_{y,T}(x)`, floored at 1.
    pub c: Rational,
    /// Number of replaced atoms.
    pub s: usize,
    /// Number of bound variables.
    pub m: usize,
}

/// How far the atoms at `replaced` may move (in sup norm) while keeping
/// `‖F_ψ' - F_ψ‖∞ < ε/2`.
///
/// `δ = ε · 2^-(s+1) · 2^-m / C`, where `C` bounds the product of the
/// untouched atoms times any proper sub-product of the replaced ones. `C` is
/// floored at 1 and `δ` is capped at 1/2 so that powers of `δ` never exceed
/// `δ` itself.
pub fn tolerance_budget(
    psi: &PpsFormula,
    env: &Env,
    replaced: &[usize],
    eps: &Rational,
) -> Result<ToleranceBudget, FormulaError> {
    if !eps.is_positive() {
        return Err(FormulaError::NonPositiveEpsilon(eps.clone()));
    }
    psi.validate(env)?;
    if let Some(&j) = replaced.iter().find(|&&j| j >= psi.atoms.len()) {
        return Err(FormulaError::AtomOutOfRange(j));
    }
    let total = psi.free.len() + psi.bound.len();
    if total > TOLERANCE_ENUMERATION_CAP {
        return Err(FormulaError::IntermediateArity {
            step: 0,
            variable: String::new(),
            arity: total,
            cap: TOLERANCE_ENUMERATION_CAP,
        });
    }
    let ids: HashMap<&str, usize> = psi
        .variables()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let scopes: Vec<Vec<usize>> = psi
        .atoms
        .iter()
        .map(|a| a.args.iter().map(|v| ids[v.as_str()]).collect())
        .collect();
    let is_replaced: Vec<bool> = (0..psi.atoms.len())
        .map(|j| replaced.contains(&j))
        .collect();
    let s = replaced.len();

    let mut c = Rational::zero();
    for mask in 0..1usize << total {
        let mut other = Rational::one();
        let mut rep_vals = Vec::with_capacity(s);
        for (j, atom) in psi.atoms.iter().enumerate() {
            let idx = scopes[j]
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &p)| acc | ((mask >> p & 1) << k));
            let v = env[&atom.func].get(idx);
            if is_replaced[j] {
                rep_vals.push(v.clone());
            } else {
                other *= v;
            }
        }
        if other.is_zero() || s == 0 {
            continue;
        }
        // Best product over the complement of a nonempty T: keep every
        // value above 1, but at least one replaced atom must be dropped.
        let mut best = Rational::one();
        let mut all_above = true;
        let mut min_val: Option<Rational> = None;
        for v in &rep_vals {
            if *v > Rational::one() {
                best *= v;
            } else {
                all_above = false;
            }
            if min_val.as_ref().is_none_or(|m| v < m) {
                min_val = Some(v.clone());
            }
        }
        if all_above {
            best /= min_val.unwrap();
        }
        let cand = other * best;
        if cand > c {
            c = cand;
        }
    }
    let c = c.max(Rational::one());
    let m = psi.bound.len();
    let mut delta = eps * &Rational::pow2(-(s as i64 + 1) - m as i64) / &c;
    let half = Rational::new(1, 2);
    if delta > half {
        delta = half;
    }
    Ok(ToleranceBudget { delta, c, s, m })
}
