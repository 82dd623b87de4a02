use serde::Serialize;

use super::GadgetError;
use crate::formula::{self, Atom, Env, FormulaError, FreshNames, Implementation, PpsFormula};
use crate::pbf::FnTable;
use crate::value::Rational;

/// Upper limit on repetition counts produced by a schedule.
pub const MAX_REPETITIONS: u64 = 1 << 20;

/// Maps a tolerance `ε` to a repetition count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// The template is exact; repeated groups (if any) are used once.
    Exact,
    /// After `k` repetitions the error is at most `coefficient · ratio^k`,
    /// and it must fall strictly below `min(ε · budget, cap)`.
    Geometric {
        coefficient: Rational,
        ratio: Rational,
        budget: Rational,
        cap: Option<Rational>,
    },
}

impl Schedule {
    pub fn geometric(coefficient: Rational, ratio: Rational) -> Self {
        Schedule::Geometric {
            coefficient,
            ratio,
            budget: Rational::one(),
            cap: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Schedule::Exact)
    }

    /// Least `k ≥ 1` meeting the bound, by exact comparison.
    pub fn repetitions(&self, eps: &Rational) -> Result<u64, GadgetError> {
        if !eps.is_positive() {
            return Err(GadgetError::Formula(FormulaError::NonPositiveEpsilon(
                eps.clone(),
            )));
        }
        match self {
            Schedule::Exact => Ok(1),
            Schedule::Geometric {
                coefficient,
                ratio,
                budget,
                cap,
            } => {
                let mut target = eps * budget;
                if let Some(c) = cap {
                    target = target.min(c.clone());
                }
                if ratio.is_zero() || coefficient.is_zero() {
                    return Ok(1);
                }
                if *ratio >= Rational::one() {
                    return Err(GadgetError::Diverges(ratio.clone()));
                }
                let mut err = coefficient * ratio;
                let mut k = 1;
                while err >= target {
                    k += 1;
                    if k > MAX_REPETITIONS {
                        return Err(GadgetError::TooManyRepetitions(eps.clone()));
                    }
                    err *= ratio;
                }
                Ok(k)
            }
        }
    }

    /// Error bound at `k` repetitions (zero for exact schedules).
    pub fn error_at(&self, k: u64) -> Rational {
        match self {
            Schedule::Exact => Rational::zero(),
            Schedule::Geometric {
                coefficient, ratio, ..
            } => coefficient * ratio.pow(k as i64),
        }
    }
}

/// Atoms copied `k` times, with their bound variables renamed per copy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepeatGroup {
    pub bound: Vec<String>,
    pub atoms: Vec<Atom>,
}

/// A parameterised implementation of `target` by a pps-formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetPlan {
    pub label: String,
    pub target: FnTable,
    pub free: Vec<String>,
    pub bound: Vec<String>,
    pub atoms: Vec<Atom>,
    pub repeated: Vec<RepeatGroup>,
    #[serde(skip)]
    pub env: Env,
    pub schedule: Schedule,
}

impl GadgetPlan {
    pub fn exact(label: impl Into<String>, target: FnTable, imp: Implementation) -> Self {
        GadgetPlan {
            label: label.into(),
            target,
            free: imp.formula.free,
            bound: imp.formula.bound,
            atoms: imp.formula.atoms,
            repeated: Vec::new(),
            env: imp.env,
            schedule: Schedule::Exact,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.schedule.is_exact()
    }

    pub fn repetitions(&self, eps: &Rational) -> Result<u64, GadgetError> {
        self.schedule.repetitions(eps)
    }

    /// The formula with every repeated group copied `k` times.
    pub fn instantiate(&self, k: u64) -> Implementation {
        let mut fresh = FreshNames::new(self.free.iter().chain(self.bound.iter()));
        for g in &self.repeated {
            for b in &g.bound {
                fresh.reserve(b);
            }
        }
        let mut formula = PpsFormula {
            free: self.free.clone(),
            bound: self.bound.clone(),
            atoms: self.atoms.clone(),
        };
        for g in &self.repeated {
            for _ in 0..k {
                let renamed: Vec<(String, String)> = g
                    .bound
                    .iter()
                    .map(|b| (b.clone(), fresh.fresh(b)))
                    .collect();
                formula.bound.extend(renamed.iter().map(|(_, n)| n.clone()));
                for a in &g.atoms {
                    let args = a
                        .args
                        .iter()
                        .map(|v| {
                            renamed
                                .iter()
                                .find(|(b, _)| b == v)
                                .map_or_else(|| v.clone(), |(_, n)| n.clone())
                        })
                        .collect();
                    formula.atoms.push(Atom::from_strings(a.func.clone(), args));
                }
            }
        }
        Implementation {
            formula,
            env: self.env.clone(),
        }
    }

    pub fn instantiate_for(&self, eps: &Rational) -> Result<(u64, Implementation), GadgetError> {
        let k = self.repetitions(eps)?;
        Ok((k, self.instantiate(k)))
    }

    /// The template with one copy of each repeated group.
    pub fn template(&self) -> Implementation {
        self.instantiate(1)
    }

    /// Evaluates the plan at `k` repetitions and returns the sup-norm error.
    pub fn error_of(&self, k: u64) -> Result<Rational, GadgetError> {
        let t = formula::evaluate(&self.instantiate(k).formula, &self.env)?;
        Ok(t.max_abs_diff(&self.target)?)
    }
}
