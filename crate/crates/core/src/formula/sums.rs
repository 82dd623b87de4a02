//! Disjoint and ordinal sums of instances, and instances with prescribed
//! partition functions built from them.

use super::{Atom, CspInstance, Env, FormulaError, FreshNames};

/// Renames the variables of `j` that clash with `i`.
fn rename_apart(i: &CspInstance, j: &CspInstance) -> CspInstance {
    let mut fresh = FreshNames::new(i.variables.iter().chain(j.variables.iter()));
    let clashes: std::collections::HashSet<&String> = i.variables.iter().collect();
    let map: std::collections::HashMap<&String, String> = j
        .variables
        .iter()
        .map(|v| {
            (
                v,
                if clashes.contains(v) {
                    fresh.fresh(v)
                } else {
                    v.clone()
                },
            )
        })
        .collect();
    CspInstance {
        variables: j.variables.iter().map(|v| map[v].clone()).collect(),
        atoms: j
            .atoms
            .iter()
            .map(|a| {
                Atom::from_strings(
                    a.func.clone(),
                    a.args.iter().map(|v| map[v].clone()).collect(),
                )
            })
            .collect(),
    }
}

/// `I ⊎ J`; `Z(I ⊎ J) = Z(I)·Z(J)`.
pub fn disjoint_sum(i: &CspInstance, j: &CspInstance) -> CspInstance {
    let j = rename_apart(i, j);
    let mut out = i.clone();
    out.variables.extend(j.variables);
    out.atoms.extend(j.atoms);
    out
}

/// `I +≤ J`: the disjoint sum plus `F(x, y)` for every `x` of `I` and `y` of `J`.
pub fn ordinal_sum(
    i: &CspInstance,
    j: &CspInstance,
    f_name: &str,
    env: &Env,
) -> Result<CspInstance, FormulaError> {
    let f = env
        .get(f_name)
        .ok_or_else(|| FormulaError::UndefinedFunction(f_name.to_string()))?;
    if f.arity() != 2 {
        return Err(FormulaError::NotBinary {
            func: f_name.to_string(),
            arity: f.arity(),
        });
    }
    let j = rename_apart(i, j);
    let mut out = i.clone();
    for x in &i.variables {
        for y in &j.variables {
            out.atoms
                .push(Atom::from_strings(f_name, vec![x.clone(), y.clone()]));
        }
    }
    out.variables.extend(j.variables);
    out.atoms.extend(j.atoms);
    Ok(out)
}

/// `2^k`: `k` unconstrained variables named `{prefix}0 .. {prefix}{k-1}`.
pub fn power_of_two(k: usize, prefix: &str) -> CspInstance {
    CspInstance {
        variables: (0..k).map(|i| format!("{prefix}{i}")).collect(),
        atoms: Vec::new(),
    }
}

/// `a·I`: the ordinal sum of `a` copies of `I` (empty when `a = 0`).
pub fn ordinal_multiple(
    a: usize,
    i: &CspInstance,
    f_name: &str,
    env: &Env,
) -> Result<CspInstance, FormulaError> {
    let mut out = CspInstance::default();
    for _ in 0..a {
        out = ordinal_sum(&out, i, f_name, env)?;
    }
    Ok(out)
}

/// An instance over `f_name` (IMP or OR) whose partition function is `a ≥ 1`.
///
/// With `a = Σ a_i 2^i` in binary, the instance is
/// `a_1·2^1 +≤ … +≤ a_k·2^k +≤ (a_0 + … + a_k − 1)·2`.
pub fn counting_instance(
    a: u64,
    f_name: &str,
    env: &Env,
    prefix: &str,
) -> Result<CspInstance, FormulaError> {
    assert!(a >= 1, "counting instance needs a positive count");
    let bits = 64 - a.leading_zeros() as usize;
    let mut out = CspInstance::default();
    for i in 1..bits {
        if a >> i & 1 == 1 {
            out = ordinal_sum(
                &out,
                &power_of_two(i, &format!("{prefix}{i}_")),
                f_name,
                env,
            )?;
        }
    }
    let ones = a.count_ones() as usize;
    let tail = ordinal_multiple(
        ones - 1,
        &power_of_two(1, &format!("{prefix}t_")),
        f_name,
        env,
    )?;
    ordinal_sum(&out, &tail, f_name, env)
}
