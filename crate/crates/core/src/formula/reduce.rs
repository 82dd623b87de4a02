use serde::Serialize;

use super::{flatten, merge_env, rename_functions, CspInstance, Env, FormulaError, PpsFormula};
use crate::gadgets::GadgetPlan;
use crate::value::Rational;

/// Quantities that determine the per-constraint tolerance of a reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionBudget {
    pub n: usize,
    pub m: usize,
    pub m_other: usize,
    pub mu_max: Rational,
    pub mu_min: Rational,
    pub nu_max: Rational,
    pub nu_min: Rational,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub eps_prime: Rational,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub instance: CspInstance,
    pub env: Env,
    /// Tolerance used to instantiate the plan.
    pub eps_prime: Rational,
    /// Repetitions used (0 when nothing was replaced).
    pub repetitions: u64,
    pub budget: Option<ReductionBudget>,
}

/// Computes `ε'` for an instance with `m` constraints on `f_name`.
pub fn reduction_budget(
    instance: &CspInstance,
    env: &Env,
    f_name: &str,
    eps: &Rational,
) -> Result<ReductionBudget, FormulaError> {
    if !eps.is_positive() {
        return Err(FormulaError::NonPositiveEpsilon(eps.clone()));
    }
    instance.validate(env)?;
    let f = env
        .get(f_name)
        .ok_or_else(|| FormulaError::UndefinedFunction(f_name.to_string()))?;
    for a in &instance.atoms {
        if env[&a.func].is_all_zero() {
            return Err(FormulaError::ZeroFunction(a.func.clone()));
        }
    }
    if f.is_all_zero() {
        return Err(FormulaError::ZeroFunction(f_name.to_string()));
    }
    let one = Rational::one();
    let m = instance.atoms.iter().filter(|a| a.func == f_name).count();
    let m_other = instance.atoms.len() - m;
    let n = instance.variables.len();
    let mu_max = f.max_value();
    let mu_min = f.min_nonzero().unwrap().min(one.clone());
    // Equality contributes the value 1 to the range.
    let mut nu_max = one.clone();
    let mut nu_min = one.clone();
    for a in instance.atoms.iter().filter(|a| a.func != f_name) {
        let t = &env[&a.func];
        nu_max = nu_max.max(t.max_value());
        nu_min = nu_min.min(t.min_nonzero().unwrap());
    }
    let two_n = Rational::pow2(n as i64);
    let mi = m as i64;
    let mo = m_other as i64;
    let a = Rational::from(4 * m) / &mu_min * &two_n * mu_max.pow(mi) * nu_max.pow(mo);
    let b = if m == 0 {
        Rational::zero()
    } else {
        &two_n * (&mu_max + &one).pow(mi - 1) * nu_max.pow(mo)
    };
    let c = mu_min.pow(mi) * nu_min.pow(mo);
    let eps_prime = if m == 0 {
        eps.clone()
    } else {
        eps / &Rational::from(4) * &c / (&a + &b)
    };
    Ok(ReductionBudget {
        n,
        m,
        m_other,
        mu_max,
        mu_min,
        nu_max,
        nu_min,
        a,
        b,
        c,
        eps_prime,
    })
}

/// Replaces each `f_name` constraint by the plan instantiated at `ε'`, so that
/// the new partition function is within relative error `ε` of the old one.
pub fn reduce_instance(
    instance: &CspInstance,
    env: &Env,
    f_name: &str,
    plan: &GadgetPlan,
    eps: &Rational,
) -> Result<Reduction, FormulaError> {
    let budget = reduction_budget(instance, env, f_name, eps)?;
    if budget.m == 0 {
        return Ok(Reduction {
            instance: instance.clone(),
            env: env.clone(),
            eps_prime: eps.clone(),
            repetitions: 0,
            budget: None,
        });
    }
    if plan.target != env[f_name] {
        return Err(FormulaError::PlanTargetMismatch(f_name.to_string()));
    }
    let (k, imp) = plan
        .instantiate_for(&budget.eps_prime)
        .map_err(|e| FormulaError::Plan(e.to_string()))?;
    let mut out_env = env.clone();
    let map = merge_env(&mut out_env, &imp.env);
    let mut phi = imp.formula;
    rename_functions(&mut phi, &map);
    let flat: PpsFormula = flatten(&instance.as_formula(), f_name, &phi)?;
    Ok(Reduction {
        instance: CspInstance {
            variables: flat.bound,
            atoms: flat.atoms,
        },
        env: out_env,
        eps_prime: budget.eps_prime.clone(),
        repetitions: k,
        budget: Some(budget),
    })
}
