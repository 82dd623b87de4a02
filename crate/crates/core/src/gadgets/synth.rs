//! Dyadic unary weights from IMP, OR or NAND and the constant ½.

use num_traits::ToPrimitive;
use serde::Serialize;

use super::plan::GadgetPlan;
use super::GadgetError;
use crate::formula::{
    counting_instance, ordinal_sum, Atom, CspInstance, Env, Implementation, PpsFormula,
};
use crate::pbf::{self, FnTable};
use crate::value::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthRoute {
    Imp,
    Or,
    Nand,
}

impl SynthRoute {
    pub fn function_name(self) -> &'static str {
        match self {
            SynthRoute::Imp => "IMP",
            SynthRoute::Or => "OR",
            SynthRoute::Nand => "NAND",
        }
    }

    fn table(self) -> FnTable {
        match self {
            SynthRoute::Imp => pbf::imp(),
            SynthRoute::Or => pbf::or(),
            SynthRoute::Nand => pbf::nand(),
        }
    }
}

fn scaled_count(v: &Rational, m: u32) -> Result<u64, GadgetError> {
    (v * Rational::pow2(m as i64))
        .numer()
        .to_u64()
        .ok_or_else(|| GadgetError::InvalidParameter(format!("{v} is too large to synthesise")))
}

/// A formula with free variable `c` evaluating exactly to `(g0, g1)`.
///
/// Both values must be dyadic with denominators at most `2^bits`. The IMP
/// route needs both nonzero, the OR route `0 < g0 < g1` and the NAND route
/// `g0 > g1 > 0`.
pub fn synth_unary(
    g0: &Rational,
    g1: &Rational,
    route: SynthRoute,
    bits: u32,
) -> Result<Implementation, GadgetError> {
    let mut m = 0;
    for v in [g0, g1] {
        if v.is_negative() {
            return Err(GadgetError::InvalidParameter(format!(
                "weight {v} is negative"
            )));
        }
        let e = v
            .dyadic_exponent()
            .ok_or_else(|| GadgetError::NonDyadic(v.clone()))?;
        if e > bits {
            return Err(GadgetError::PrecisionTooLow { needed: e, bits });
        }
        m = m.max(e);
    }
    if g0.is_zero() || g1.is_zero() {
        return Err(GadgetError::ZeroValue);
    }
    let f_name = route.function_name();
    let mut env = Env::new();
    env.insert(f_name.to_string(), route.table());
    env.insert("Half".into(), pbf::half());
    let half_atoms = (0..m).map(|_| Atom::new("Half", &[]));

    let (atoms, bound) = match route {
        SynthRoute::Imp => {
            let i = counting_instance(scaled_count(g0, m)?, f_name, &env, "i")?;
            let j = counting_instance(scaled_count(g1, m)?, f_name, &env, "j")?;
            let mut atoms: Vec<Atom> = i.atoms.iter().chain(j.atoms.iter()).cloned().collect();
            atoms.extend(
                i.variables
                    .iter()
                    .map(|a| Atom::from_strings(f_name, vec!["c".into(), a.clone()])),
            );
            atoms.extend(
                j.variables
                    .iter()
                    .map(|b| Atom::from_strings(f_name, vec![b.clone(), "c".into()])),
            );
            let bound = i
                .variables
                .iter()
                .chain(j.variables.iter())
                .cloned()
                .collect();
            (atoms, bound)
        }
        SynthRoute::Or | SynthRoute::Nand => {
            // NAND is OR with both arguments complemented, so the NAND route
            // builds the OR construction for the reversed target.
            let (lo, hi) = if route == SynthRoute::Or {
                (g0, g1)
            } else {
                (g1, g0)
            };
            if hi <= lo {
                return Err(GadgetError::NotMonotone);
            }
            let i = counting_instance(scaled_count(lo, m)?, f_name, &env, "i")?;
            let j = counting_instance(scaled_count(&(hi - lo), m)? + 1, f_name, &env, "j")?;
            let k: CspInstance = ordinal_sum(&i, &j, f_name, &env)?;
            let v1 = &k.variables[i.variables.len()..];
            let mut atoms = k.atoms.clone();
            atoms.extend(
                v1.iter()
                    .map(|b| Atom::from_strings(f_name, vec![b.clone(), "c".into()])),
            );
            (atoms, k.variables.clone())
        }
    };
    let mut atoms = atoms;
    atoms.extend(half_atoms);
    Ok(Implementation {
        formula: PpsFormula {
            free: vec!["c".into()],
            bound,
            atoms,
        },
        env,
    })
}

/// `⌊v · 2^bits⌋ / 2^bits`.
pub fn truncate(v: &Rational, bits: u32) -> Rational {
    let scale = Rational::pow2(bits as i64);
    Rational::from((v * &scale).floor()) / scale
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftedWeight {
    /// Copies of `G` in the plan.
    pub k: u64,
    /// `H / G^k`.
    pub h_prime: FnTable,
    /// `H'` truncated to `bits` binary digits.
    pub truncated: FnTable,
    pub bits: u32,
    pub route: SynthRoute,
    /// Computes `G^k · truncated` exactly.
    pub plan: GadgetPlan,
    /// Sup-norm distance between the plan and `H`.
    pub error: Rational,
}

/// Upper limit on the shift `k`.
pub const MAX_SHIFT: u64 = 1 << 16;

/// Writes `H = G^k · H'` with `H'` strictly monotone in the direction the
/// OR route (for `G(0) > G(1)`) or NAND route (for `G(0) < G(1)`) accepts,
/// then synthesises a truncation of `H'` within `eps` of `H` overall.
pub fn shift_monotone(
    h: &FnTable,
    g: &FnTable,
    eps: &Rational,
) -> Result<ShiftedWeight, GadgetError> {
    for t in [h, g] {
        if t.arity() != 1 {
            return Err(GadgetError::WrongArity {
                expected: 1,
                got: t.arity(),
            });
        }
    }
    if !eps.is_positive() {
        return Err(GadgetError::InvalidParameter(format!(
            "tolerance {eps} must be positive"
        )));
    }
    let (g0, g1) = (g.get(0), g.get(1));
    let (h0, h1) = (h.get(0), h.get(1));
    let route = match g0.cmp(g1) {
        std::cmp::Ordering::Greater => SynthRoute::Or,
        std::cmp::Ordering::Less => SynthRoute::Nand,
        std::cmp::Ordering::Equal => return Err(GadgetError::NoShift),
    };
    if g0.is_zero() || g1.is_zero() || h0.is_zero() || h1.is_zero() {
        return Err(GadgetError::ZeroValue);
    }
    // Least k with (g0/g1)^k · h1 > h0 (OR) or (g1/g0)^k · h0 > h1 (NAND).
    let (big, small, hb, hs) = if route == SynthRoute::Or {
        (g0, g1, h1, h0)
    } else {
        (g1, g0, h0, h1)
    };
    let ratio = big / small;
    let mut lhs = hb.clone();
    let mut k = 0u64;
    while lhs <= *hs {
        k += 1;
        if k > MAX_SHIFT {
            return Err(GadgetError::NoShift);
        }
        lhs *= &ratio;
    }
    let gk = g.powi(k as u32);
    let h_prime = FnTable::from_fn(1, |x| h.get(x) / gk.get(x));
    let gmax = gk.max_value();

    let ordered = |t: &FnTable| {
        if route == SynthRoute::Or {
            t.get(0) < t.get(1)
        } else {
            t.get(0) > t.get(1)
        }
    };
    let mut bits = 0u32;
    let truncated = loop {
        if Rational::pow2(-(bits as i64)) * &gmax < *eps {
            let t = FnTable::from_fn(1, |x| truncate(h_prime.get(x), bits));
            if !t.get(0).is_zero() && !t.get(1).is_zero() && ordered(&t) {
                break t;
            }
        }
        bits += 1;
        if bits > 4096 {
            return Err(GadgetError::PrecisionTooLow {
                needed: bits,
                bits: 4096,
            });
        }
    };
    let imp = synth_unary(truncated.get(0), truncated.get(1), route, bits)?;
    let mut env = imp.env;
    env.insert("G".into(), g.clone());
    let mut atoms = imp.formula.atoms;
    atoms.extend((0..k).map(|_| Atom::new("G", &["c"])));
    let target = gk.mul_pointwise(&truncated).expect("unary");
    let error = target.max_abs_diff(h).expect("unary");
    let implementation = Implementation {
        formula: PpsFormula {
            free: imp.formula.free,
            bound: imp.formula.bound,
            atoms,
        },
        env,
    };
    let plan = GadgetPlan::exact("shifted unary weight", target, implementation);
    Ok(ShiftedWeight {
        k,
        h_prime,
        truncated,
        bits,
        route,
        plan,
        error,
    })
}

/// `U(x) = Σ_y NAND(x, y)`, which is `(2, 1)`.
pub fn nand_unary() -> Implementation {
    let env: Env = [("NAND".to_string(), pbf::nand())].into_iter().collect();
    Implementation {
        formula: PpsFormula::new(&["x"], &["y"], vec![Atom::new("NAND", &["x", "y"])]),
        env,
    }
}
