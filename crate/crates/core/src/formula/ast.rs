use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::FormulaError;
use crate::pbf::FnTable;

/// Named function tables available to formulas.
pub type Env = BTreeMap<String, FnTable>;

/// Separator reserved for variables introduced by renaming.
pub const RESERVED_SEPARATOR: char = '~';

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub func: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(func: impl Into<String>, args: &[&str]) -> Self {
        Atom {
            func: func.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn from_strings(func: impl Into<String>, args: Vec<String>) -> Self {
        Atom {
            func: func.into(),
            args,
        }
    }
}

/// `F(free) = Σ_{bound} Π atoms`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PpsFormula {
    pub free: Vec<String>,
    pub bound: Vec<String>,
    pub atoms: Vec<Atom>,
}

/// A constraint instance: every variable is summed in the partition function.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CspInstance {
    pub variables: Vec<String>,
    pub atoms: Vec<Atom>,
}

/// A formula bundled with the tables it refers to.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Implementation {
    pub formula: PpsFormula,
    pub env: Env,
}

impl PpsFormula {
    pub fn new(free: &[&str], bound: &[&str], atoms: Vec<Atom>) -> Self {
        PpsFormula {
            free: free.iter().map(|s| s.to_string()).collect(),
            bound: bound.iter().map(|s| s.to_string()).collect(),
            atoms,
        }
    }

    pub fn arity(&self) -> usize {
        self.free.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = &String> {
        self.free.iter().chain(self.bound.iter())
    }

    /// Checks variable declarations, function names and arities.
    pub fn validate(&self, env: &Env) -> Result<(), FormulaError> {
        let mut seen = HashSet::with_capacity(self.free.len() + self.bound.len());
        for v in self.variables() {
            if v.is_empty() {
                return Err(FormulaError::InvalidName(v.clone()));
            }
            if !seen.insert(v.as_str()) {
                return Err(FormulaError::DuplicateVariable(v.clone()));
            }
        }
        for (index, atom) in self.atoms.iter().enumerate() {
            let table = env
                .get(&atom.func)
                .ok_or_else(|| FormulaError::UndefinedFunction(atom.func.clone()))?;
            if table.arity() != atom.args.len() {
                return Err(FormulaError::ArityMismatch {
                    atom: index,
                    func: atom.func.clone(),
                    expected: table.arity(),
                    got: atom.args.len(),
                });
            }
            if let Some(v) = atom.args.iter().find(|v| !seen.contains(v.as_str())) {
                return Err(FormulaError::UnknownVariable {
                    atom: index,
                    variable: v.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn as_instance(&self) -> CspInstance {
        CspInstance {
            variables: self.variables().cloned().collect(),
            atoms: self.atoms.clone(),
        }
    }
}

impl CspInstance {
    pub fn new(variables: &[&str], atoms: Vec<Atom>) -> Self {
        CspInstance {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            atoms,
        }
    }

    /// Instance whose variables are those of the atoms, in order of appearance.
    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        let mut seen = HashSet::new();
        let mut variables = Vec::new();
        for a in &atoms {
            for v in &a.args {
                if seen.insert(v.clone()) {
                    variables.push(v.clone());
                }
            }
        }
        CspInstance { variables, atoms }
    }

    pub fn as_formula(&self) -> PpsFormula {
        PpsFormula {
            free: Vec::new(),
            bound: self.variables.clone(),
            atoms: self.atoms.clone(),
        }
    }

    pub fn validate(&self, env: &Env) -> Result<(), FormulaError> {
        self.as_formula().validate(env)
    }
}

impl Implementation {
    pub fn evaluate(&self) -> Result<FnTable, FormulaError> {
        super::evaluate(&self.formula, &self.env)
    }
}

/// Generates variable names that avoid a growing set of taken names.
#[derive(Debug, Default, Clone)]
pub struct FreshNames {
    taken: HashSet<String>,
    counter: u64,
}

impl FreshNames {
    pub fn new<'a>(taken: impl IntoIterator<Item = &'a String>) -> Self {
        FreshNames {
            taken: taken.into_iter().cloned().collect(),
            counter: 0,
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    pub fn is_taken(&self, name: &str) -> bool {
        self.taken.contains(name)
    }

    /// A fresh `base~k` name.
    pub fn fresh(&mut self, base: &str) -> String {
        let stem = base.split(RESERVED_SEPARATOR).next().unwrap_or(base);
        loop {
            self.counter += 1;
            let name = format!("{stem}{RESERVED_SEPARATOR}{}", self.counter);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Adds `extra` to `env`, renaming entries whose names collide with a
/// different table. Returns the old-to-new name map.
pub fn merge_env(env: &mut Env, extra: &Env) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    for (name, table) in extra {
        let new_name = match env.get(name) {
            None => name.clone(),
            Some(t) if t == table => name.clone(),
            Some(_) => {
                let mut k = 1;
                loop {
                    let cand = format!("{name}_{k}");
                    match env.get(&cand) {
                        None => break cand,
                        Some(t) if t == table => break cand,
                        _ => k += 1,
                    }
                }
            }
        };
        env.insert(new_name.clone(), table.clone());
        map.insert(name.clone(), new_name);
    }
    map
}

/// Renames function references in a formula.
pub fn rename_functions(formula: &mut PpsFormula, map: &BTreeMap<String, String>) {
    for a in &mut formula.atoms {
        if let Some(n) = map.get(&a.func) {
            a.func = n.clone();
        }
    }
}
