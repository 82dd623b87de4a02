use std::collections::HashMap;

use super::{Atom, FormulaError, FreshNames, PpsFormula};

/// Replaces every `g_name` atom of `psi` by a copy of `phi_g`, with the
/// copy's free variables bound to the atom arguments and its bound variables
/// renamed apart.
///
/// With `ℓ` occurrences and `s` bound variables in `phi_g`, the result has
/// `m + ℓ·s` bound variables.
pub fn flatten(
    psi: &PpsFormula,
    g_name: &str,
    phi_g: &PpsFormula,
) -> Result<PpsFormula, FormulaError> {
    let mut fresh = FreshNames::new(psi.variables().chain(phi_g.variables()));
    let mut out = PpsFormula {
        free: psi.free.clone(),
        bound: psi.bound.clone(),
        atoms: Vec::new(),
    };
    for (index, atom) in psi.atoms.iter().enumerate() {
        if atom.func != g_name {
            out.atoms.push(atom.clone());
            continue;
        }
        if atom.args.len() != phi_g.free.len() {
            return Err(FormulaError::ArityMismatch {
                atom: index,
                func: g_name.to_string(),
                expected: phi_g.free.len(),
                got: atom.args.len(),
            });
        }
        let mut sub: HashMap<&str, String> = phi_g
            .free
            .iter()
            .zip(atom.args.iter())
            .map(|(f, a)| (f.as_str(), a.clone()))
            .collect();
        for b in &phi_g.bound {
            let name = fresh.fresh(b);
            out.bound.push(name.clone());
            sub.insert(b.as_str(), name);
        }
        for inner in &phi_g.atoms {
            let args = inner
                .args
                .iter()
                .map(|v| {
                    sub.get(v.as_str())
                        .cloned()
                        .ok_or_else(|| FormulaError::UnknownVariable {
                            atom: index,
                            variable: v.clone(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.atoms.push(Atom::from_strings(inner.func.clone(), args));
        }
    }
    Ok(out)
}
