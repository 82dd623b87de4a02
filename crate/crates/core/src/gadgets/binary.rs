//! Binary functions: the five-way case split and explicit implementations
//! between a function and its canonical representative.

use serde::Serialize;

use super::plan::{GadgetPlan, RepeatGroup, Schedule};
use super::GadgetError;
use crate::formula::{
    evaluate, flatten, merge_env, rename_functions, tolerance_budget, Atom, Env, Implementation,
    PpsFormula,
};
use crate::pbf::{self, FnTable};
use crate::value::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case")]
pub enum BinaryCase {
    /// (i) `F = U1(x1) U2(x2)`.
    #[serde(rename = "i")]
    ProductOfUnaries { u1: FnTable, u2: FnTable },
    /// (ii) `F = U(x1) EQ(x1, x2)`.
    #[serde(rename = "ii")]
    WeightedEquality { u: FnTable },
    /// (iii) `F = U(x1) NEQ(x1, x2)`.
    #[serde(rename = "iii")]
    WeightedDisequality { u: FnTable },
    /// (iv) `IMP_α = U1(x1) U2(x2) F`.
    #[serde(rename = "iv")]
    ImpLike {
        alpha: Rational,
        u1: FnTable,
        u2: FnTable,
    },
    /// (v)(a) `OR_α = U1(x1) U2(x2) F`.
    #[serde(rename = "v(a)")]
    OrLike {
        alpha: Rational,
        u1: FnTable,
        u2: FnTable,
    },
    /// (v)(b) `NAND = U1(x1) U2(x2) F`.
    #[serde(rename = "v(b)")]
    NandLike { u1: FnTable, u2: FnTable },
}

/// The case of `F`, or of its transpose when `F(0,1) < F(1,0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinaryClassification {
    pub transposed: bool,
    #[serde(flatten)]
    pub case: BinaryCase,
}

impl BinaryClassification {
    pub fn label(&self) -> &'static str {
        match self.case {
            BinaryCase::ProductOfUnaries { .. } => "i",
            BinaryCase::WeightedEquality { .. } => "ii",
            BinaryCase::WeightedDisequality { .. } => "iii",
            BinaryCase::ImpLike { .. } => "iv",
            BinaryCase::OrLike { .. } => "v(a)",
            BinaryCase::NandLike { .. } => "v(b)",
        }
    }

    /// Rebuilds `F` from the named function and the case parameters.
    pub fn reconstruct(&self) -> FnTable {
        let divide = |canon: FnTable, u1: &FnTable, u2: &FnTable| {
            FnTable::from_fn(2, |m| {
                let c = canon.get(m);
                if c.is_zero() {
                    Rational::zero()
                } else {
                    c / &(u1.get(m & 1) * u2.get(m >> 1))
                }
            })
        };
        let g = match &self.case {
            BinaryCase::ProductOfUnaries { u1, u2 } => {
                FnTable::from_fn(2, |m| u1.get(m & 1) * u2.get(m >> 1))
            }
            BinaryCase::WeightedEquality { u } => {
                FnTable::from_fn(2, |m| u.get(m & 1) * pbf::eq().get(m))
            }
            BinaryCase::WeightedDisequality { u } => {
                FnTable::from_fn(2, |m| u.get(m & 1) * pbf::neq().get(m))
            }
            BinaryCase::ImpLike { alpha, u1, u2 } => divide(pbf::imp_alpha(alpha), u1, u2),
            BinaryCase::OrLike { alpha, u1, u2 } => divide(pbf::or_alpha(alpha), u1, u2),
            BinaryCase::NandLike { u1, u2 } => divide(pbf::nand(), u1, u2),
        };
        if self.transposed {
            g.transpose()
        } else {
            g
        }
    }
}

fn un(a: Rational, b: Rational) -> FnTable {
    FnTable::unary(a, b)
}

pub fn classify_binary(f: &FnTable) -> Result<BinaryClassification, GadgetError> {
    if f.arity() != 2 {
        return Err(GadgetError::WrongArity {
            expected: 2,
            got: f.arity(),
        });
    }
    let transposed = f.entry(0, 1) < f.entry(1, 0);
    let g = if transposed { f.transpose() } else { f.clone() };
    let [f00, f01, f10, f11] =
        [g.entry(0, 0), g.entry(0, 1), g.entry(1, 0), g.entry(1, 1)].map(Clone::clone);
    let zero = Rational::zero;
    let one = Rational::one;
    let pos = |v: &Rational| v.is_positive();
    let diag = &f00 * &f11;
    let anti = &f01 * &f10;

    let case = if diag == anti {
        let (u1, u2) = if f00.is_zero() && f01.is_zero() {
            (un(zero(), one()), un(f10.clone(), f11.clone()))
        } else if f00.is_zero() && f10.is_zero() {
            (un(f01.clone(), f11.clone()), un(zero(), one()))
        } else if f01.is_zero() && f11.is_zero() {
            (un(f00.clone(), f10.clone()), un(one(), zero()))
        } else if f10.is_zero() && f11.is_zero() {
            (un(one(), zero()), un(f00.clone(), f01.clone()))
        } else {
            (un(one(), &f10 / &f00), un(f00.clone(), f01.clone()))
        };
        BinaryCase::ProductOfUnaries { u1, u2 }
    } else if f01.is_zero() && f10.is_zero() && pos(&f00) && pos(&f11) {
        BinaryCase::WeightedEquality {
            u: un(f00.clone(), f11.clone()),
        }
    } else if f00.is_zero() && f11.is_zero() && pos(&f01) && pos(&f10) {
        BinaryCase::WeightedDisequality {
            u: un(f01.clone(), f10.clone()),
        }
    } else if pos(&f00) && pos(&f01) && pos(&f11) && diag > anti {
        BinaryCase::ImpLike {
            alpha: &anti / &diag,
            u1: un(f00.recip(), &f01 / &diag),
            u2: un(one(), &f00 / &f01),
        }
    } else if pos(&f01) && pos(&f10) && pos(&f11) {
        BinaryCase::OrLike {
            alpha: &diag / &anti,
            u1: un(&f11 / &f01, one()),
            u2: un(f10.recip(), f11.recip()),
        }
    } else {
        debug_assert!(pos(&f00) && pos(&f01) && pos(&f10) && f11.is_zero());
        BinaryCase::NandLike {
            u1: un(f00.recip(), f10.recip()),
            u2: un(one(), &f00 / &f01),
        }
    };
    Ok(BinaryClassification { transposed, case })
}

/// Implementations between `F` and its canonical function.
#[derive(Debug, Clone)]
pub struct BinaryWitness {
    pub classification: BinaryClassification,
    /// Name of the canonical function: `NEQ`, `IMP` or `OR`.
    pub canonical: &'static str,
    /// Implements the canonical function from `F` and unaries.
    pub forward: GadgetPlan,
    /// Implements `F` from the canonical function and unaries.
    pub backward: GadgetPlan,
}

/// Builds atoms for `G`, which is `F` read in the normalised orientation.
struct Orient {
    transposed: bool,
}

impl Orient {
    fn g(&self, a: &str, b: &str) -> Atom {
        if self.transposed {
            Atom::new("F", &[b, a])
        } else {
            Atom::new("F", &[a, b])
        }
    }

    /// Free variables so that the formula computes `F` rather than `G`.
    fn free_for_f(&self) -> Vec<String> {
        if self.transposed {
            vec!["g2".into(), "g1".into()]
        } else {
            vec!["g1".into(), "g2".into()]
        }
    }
}

fn env_of(entries: Vec<(&str, FnTable)>) -> Env {
    entries
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn vars(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Geometric schedule for NEQ approximants with error `4^-k` that feed the
/// atoms at `replaced` of `outer`.
fn neq_schedule(
    outer: &PpsFormula,
    env: &Env,
    replaced: &[usize],
) -> Result<Schedule, GadgetError> {
    let tb = tolerance_budget(outer, env, replaced, &Rational::one())?;
    let budget = Rational::pow2(-(tb.s as i64 + 1) - tb.m as i64) / &tb.c;
    Ok(Schedule::Geometric {
        coefficient: Rational::one(),
        ratio: Rational::new(1, 4),
        budget,
        cap: Some(Rational::new(1, 2)),
    })
}

/// Replaces each NEQ atom of `outer` by a repeat group built by `approx`.
fn plan_with_neq_groups(
    label: &str,
    target: FnTable,
    outer: PpsFormula,
    exact_env: Env,
    env: Env,
    approx: impl Fn(&str, &str) -> Vec<Atom>,
) -> Result<GadgetPlan, GadgetError> {
    let replaced: Vec<usize> = outer
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.func == "NEQ")
        .map(|(i, _)| i)
        .collect();
    let schedule = neq_schedule(&outer, &exact_env, &replaced)?;
    let mut atoms = Vec::new();
    let mut repeated = Vec::new();
    for a in outer.atoms {
        if a.func == "NEQ" {
            repeated.push(RepeatGroup {
                bound: Vec::new(),
                atoms: approx(&a.args[0], &a.args[1]),
            });
        } else {
            atoms.push(a);
        }
    }
    Ok(GadgetPlan {
        label: label.to_string(),
        target,
        free: outer.free,
        bound: outer.bound,
        atoms,
        repeated,
        env,
        schedule,
    })
}

pub fn binary_witness(f: &FnTable) -> Result<BinaryWitness, GadgetError> {
    let cls = classify_binary(f)?;
    let o = Orient {
        transposed: cls.transposed,
    };
    let g = |a: &str, b: &str| o.g(a, b);
    let f_free = o.free_for_f();
    let g_free = vars(&["g1", "g2"]);
    let (canonical, forward, backward) = match &cls.case {
        BinaryCase::ProductOfUnaries { .. } | BinaryCase::WeightedEquality { .. } => {
            return Err(GadgetError::NoCanonicalWitness(cls.label()));
        }
        BinaryCase::WeightedDisequality { u } => {
            let inv = un(u.get(0).recip(), u.get(1).recip());
            let fwd = Implementation {
                formula: PpsFormula {
                    free: g_free.clone(),
                    bound: vec![],
                    atoms: vec![Atom::new("Ui", &["g1"]), g("g1", "g2")],
                },
                env: env_of(vec![("F", f.clone()), ("Ui", inv)]),
            };
            let bwd = Implementation {
                formula: PpsFormula {
                    free: f_free.clone(),
                    bound: vec![],
                    atoms: vec![Atom::new("U", &["g1"]), Atom::new("NEQ", &["g1", "g2"])],
                },
                env: env_of(vec![("NEQ", pbf::neq()), ("U", u.clone())]),
            };
            (
                "NEQ",
                GadgetPlan::exact("NEQ from F", pbf::neq(), fwd),
                GadgetPlan::exact("F from NEQ", f.clone(), bwd),
            )
        }
        BinaryCase::ImpLike { alpha, u1, u2 } => {
            let fwd = GadgetPlan {
                label: "IMP from F".into(),
                target: pbf::imp(),
                free: g_free.clone(),
                bound: vec![],
                atoms: vec![],
                repeated: vec![RepeatGroup {
                    bound: vec![],
                    atoms: vec![
                        Atom::new("U1", &["g1"]),
                        Atom::new("U2", &["g2"]),
                        g("g1", "g2"),
                    ],
                }],
                env: env_of(vec![
                    ("F", f.clone()),
                    ("U1", u1.clone()),
                    ("U2", u2.clone()),
                ]),
                schedule: if alpha.is_zero() {
                    Schedule::Exact
                } else {
                    Schedule::geometric(Rational::one(), alpha.clone())
                },
            };
            let bwd = imp_to_g(alpha, u1, u2, &f_free, f);
            ("IMP", fwd, bwd)
        }
        BinaryCase::OrLike { alpha, u1, u2 } => {
            let fwd = GadgetPlan {
                label: "OR from F".into(),
                target: pbf::or(),
                free: g_free.clone(),
                bound: vec![],
                atoms: vec![],
                repeated: vec![RepeatGroup {
                    bound: vec![],
                    atoms: vec![
                        Atom::new("U1", &["g1"]),
                        Atom::new("U2", &["g2"]),
                        g("g1", "g2"),
                    ],
                }],
                env: env_of(vec![
                    ("F", f.clone()),
                    ("U1", u1.clone()),
                    ("U2", u2.clone()),
                ]),
                schedule: if alpha.is_zero() {
                    Schedule::Exact
                } else {
                    Schedule::geometric(Rational::one(), alpha.clone())
                },
            };
            let bwd = or_to_g_case_a(alpha, u1, u2, &f_free, f)?;
            ("OR", fwd, bwd)
        }
        BinaryCase::NandLike { u1, u2 } => {
            let fwd = nand_g_to_or(u1, u2, &o, f)?;
            let bwd = or_to_g_case_b(u1, u2, &f_free, f)?;
            ("OR", fwd, bwd)
        }
    };
    Ok(BinaryWitness {
        classification: cls,
        canonical,
        forward,
        backward,
    })
}

fn inverse_unary(u: &FnTable) -> FnTable {
    un(u.get(0).recip(), u.get(1).recip())
}

/// `IMP_α(x1, x2) = Σ_y IMP(x1, y) F1(y, x2)` with
/// `F1(y, x2) = A1(y) A2(x2) IMP(x2, y)`, then `G = U1⁻¹ U2⁻¹ IMP_α`.
fn imp_alpha_atoms(alpha: &Rational, a: &str, b: &str, y: &str) -> (Vec<Atom>, Env) {
    if alpha.is_zero() {
        return (
            vec![Atom::new("IMP", &[a, b])],
            env_of(vec![("IMP", pbf::imp())]),
        );
    }
    let a1 = un(alpha.recip() - Rational::one(), Rational::one());
    let a2 = un(alpha.clone(), Rational::one());
    (
        vec![
            Atom::new("IMP", &[a, y]),
            Atom::new("A1", &[y]),
            Atom::new("A2", &[b]),
            Atom::new("IMP", &[b, y]),
        ],
        env_of(vec![("IMP", pbf::imp()), ("A1", a1), ("A2", a2)]),
    )
}

fn imp_to_g(
    alpha: &Rational,
    u1: &FnTable,
    u2: &FnTable,
    f_free: &[String],
    f: &FnTable,
) -> GadgetPlan {
    let (mut atoms, mut env) = imp_alpha_atoms(alpha, "g1", "g2", "y");
    atoms.push(Atom::new("V1", &["g1"]));
    atoms.push(Atom::new("V2", &["g2"]));
    env.insert("V1".into(), inverse_unary(u1));
    env.insert("V2".into(), inverse_unary(u2));
    let bound = if alpha.is_zero() {
        vec![]
    } else {
        vars(&["y"])
    };
    GadgetPlan::exact(
        "F from IMP",
        f.clone(),
        Implementation {
            formula: PpsFormula {
                free: f_free.to_vec(),
                bound,
                atoms,
            },
            env,
        },
    )
}

/// `NEQ` approximated by `(W(a) W(b) OR(a, b))^k` with `W = (2, 1/2)`.
fn neq_from_or(a: &str, b: &str) -> Vec<Atom> {
    vec![
        Atom::new("W", &[a]),
        Atom::new("W", &[b]),
        Atom::new("OR", &[a, b]),
    ]
}

fn or_to_g_case_a(
    alpha: &Rational,
    u1: &FnTable,
    u2: &FnTable,
    f_free: &[String],
    f: &FnTable,
) -> Result<GadgetPlan, GadgetError> {
    let v1 = inverse_unary(u1);
    let v2 = inverse_unary(u2);
    if alpha.is_zero() {
        let imp = Implementation {
            formula: PpsFormula {
                free: f_free.to_vec(),
                bound: vec![],
                atoms: vec![
                    Atom::new("V1", &["g1"]),
                    Atom::new("V2", &["g2"]),
                    Atom::new("OR", &["g1", "g2"]),
                ],
            },
            env: env_of(vec![("OR", pbf::or()), ("V1", v1), ("V2", v2)]),
        };
        return Ok(GadgetPlan::exact("F from OR", f.clone(), imp));
    }
    // OR_α(g1,g2) = Σ_y NEQ(g1,y) IMP_α(y,g2);
    // IMP(u,v) = Σ_t NEQ(u,t) OR(t,v) wherever IMP appears.
    let a1 = un(alpha.recip() - Rational::one(), Rational::one());
    let a2 = un(alpha.clone(), Rational::one());
    let atoms = vec![
        Atom::new("V1", &["g1"]),
        Atom::new("V2", &["g2"]),
        Atom::new("NEQ", &["g1", "y"]),
        Atom::new("NEQ", &["y", "t"]),
        Atom::new("OR", &["t", "z"]),
        Atom::new("A1", &["z"]),
        Atom::new("A2", &["g2"]),
        Atom::new("NEQ", &["g2", "s"]),
        Atom::new("OR", &["s", "z"]),
    ];
    let outer = PpsFormula {
        free: f_free.to_vec(),
        bound: vars(&["y", "t", "z", "s"]),
        atoms,
    };
    let base = vec![
        ("OR", pbf::or()),
        ("V1", v1),
        ("V2", v2),
        ("A1", a1),
        ("A2", a2),
    ];
    let mut exact_env = env_of(base.clone());
    exact_env.insert("NEQ".into(), pbf::neq());
    let mut env = env_of(base);
    env.insert("W".into(), un(Rational::from(2), Rational::new(1, 2)));
    plan_with_neq_groups("F from OR", f.clone(), outer, exact_env, env, neq_from_or)
}

fn or_to_g_case_b(
    u1: &FnTable,
    u2: &FnTable,
    f_free: &[String],
    f: &FnTable,
) -> Result<GadgetPlan, GadgetError> {
    // NAND = NEQ · OR · NEQ as matrices; G = U1⁻¹ U2⁻¹ NAND.
    let atoms = vec![
        Atom::new("V1", &["g1"]),
        Atom::new("V2", &["g2"]),
        Atom::new("NEQ", &["g1", "y"]),
        Atom::new("OR", &["y", "z"]),
        Atom::new("NEQ", &["z", "g2"]),
    ];
    let outer = PpsFormula {
        free: f_free.to_vec(),
        bound: vars(&["y", "z"]),
        atoms,
    };
    let base = vec![
        ("OR", pbf::or()),
        ("V1", inverse_unary(u1)),
        ("V2", inverse_unary(u2)),
    ];
    let mut exact_env = env_of(base.clone());
    exact_env.insert("NEQ".into(), pbf::neq());
    let mut env = env_of(base);
    env.insert("W".into(), un(Rational::from(2), Rational::new(1, 2)));
    plan_with_neq_groups("F from OR", f.clone(), outer, exact_env, env, neq_from_or)
}

fn nand_g_to_or(
    u1: &FnTable,
    u2: &FnTable,
    o: &Orient,
    f: &FnTable,
) -> Result<GadgetPlan, GadgetError> {
    // OR = NEQ · NAND · NEQ; NAND(a,b) = U1(a) U2(b) G(a,b);
    // NEQ approximated by (W(a) W(b) NAND(a,b))^k with W = (1/2, 2).
    let atoms = vec![
        Atom::new("NEQ", &["g1", "y"]),
        Atom::new("U1", &["y"]),
        Atom::new("U2", &["z"]),
        o.g("y", "z"),
        Atom::new("NEQ", &["z", "g2"]),
    ];
    let outer = PpsFormula {
        free: vars(&["g1", "g2"]),
        bound: vars(&["y", "z"]),
        atoms,
    };
    let base = vec![("F", f.clone()), ("U1", u1.clone()), ("U2", u2.clone())];
    let mut exact_env = env_of(base.clone());
    exact_env.insert("NEQ".into(), pbf::neq());
    let mut env = env_of(base);
    env.insert("W".into(), un(Rational::new(1, 2), Rational::from(2)));
    let transposed = o.transposed;
    plan_with_neq_groups(
        "OR from F",
        pbf::or(),
        outer,
        exact_env,
        env,
        move |a, b| {
            let o = Orient { transposed };
            vec![
                Atom::new("W", &[a]),
                Atom::new("W", &[b]),
                Atom::new("U1", &[a]),
                Atom::new("U2", &[b]),
                o.g(a, b),
            ]
        },
    )
}

/// Runs `F → canonical` with `F` itself replaced by the `canonical → F`
/// plan, and returns the sup-norm distance to the canonical function.
///
/// The inner plan is instantiated tightly enough that the total error stays
/// below `1.5 ε`.
pub fn round_trip_error(w: &BinaryWitness, eps: &Rational) -> Result<Rational, GadgetError> {
    let (_, fwd) = w.forward.instantiate_for(eps)?;
    let f_atoms: Vec<usize> = fwd
        .formula
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.func == "F")
        .map(|(i, _)| i)
        .collect();
    let delta = tolerance_budget(&fwd.formula, &fwd.env, &f_atoms, eps)?.delta;
    let (_, bwd) = w.backward.instantiate_for(&delta.min(eps.clone()))?;
    let mut env = fwd.env.clone();
    env.remove("F");
    let map = merge_env(&mut env, &bwd.env);
    let mut inner = bwd.formula;
    rename_functions(&mut inner, &map);
    let composed = flatten(&fwd.formula, "F", &inner)?;
    let t = evaluate(&composed, &env)?;
    Ok(t.max_abs_diff(&w.forward.target)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::q;

    fn m(a: i64, b: i64, c: i64, d: i64) -> FnTable {
        FnTable::from_matrix([[a.into(), b.into()], [c.into(), d.into()]])
    }

    #[test]
    fn case_examples() {
        let c = classify_binary(&pbf::imp()).unwrap();
        assert_eq!(c.label(), "iv");
        assert!(matches!(&c.case, BinaryCase::ImpLike { alpha, .. } if alpha.is_zero()));
        let c = classify_binary(&pbf::eq_weighted()).unwrap();
        assert!(matches!(&c.case, BinaryCase::ImpLike { alpha, .. } if *alpha == q(1, 4)));
        assert_eq!(classify_binary(&m(1, 2, 2, 4)).unwrap().label(), "i");
        let c = classify_binary(&pbf::or()).unwrap();
        assert!(matches!(&c.case, BinaryCase::OrLike { alpha, .. } if alpha.is_zero()));
        assert_eq!(classify_binary(&pbf::nand()).unwrap().label(), "v(b)");
        assert_eq!(classify_binary(&pbf::neq()).unwrap().label(), "iii");
        assert_eq!(classify_binary(&pbf::eq()).unwrap().label(), "ii");
        assert!(classify_binary(&pbf::xor3()).is_err());
    }

    #[test]
    fn imp_transposed() {
        let c = classify_binary(&pbf::imp().transpose()).unwrap();
        assert!(c.transposed);
        assert_eq!(c.reconstruct(), pbf::imp().transpose());
    }

    #[test]
    fn reconstruct_all_cases() {
        for f in [
            m(1, 2, 2, 4),
            m(0, 0, 3, 5),
            m(2, 0, 0, 3),
            m(0, 2, 3, 0),
            m(2, 1, 1, 2),
            m(0, 1, 1, 1),
            m(1, 1, 1, 0),
            m(1, 3, 2, 1),
        ] {
            let c = classify_binary(&f).unwrap();
            assert_eq!(c.reconstruct(), f, "case {}", c.label());
        }
    }

    #[test]
    fn imp_half_schedule_is_strict() {
        let f = pbf::imp_alpha(&q(1, 2));
        let w = binary_witness(&f).unwrap();
        let eps = Rational::pow2(-10);
        assert_eq!(w.forward.repetitions(&eps).unwrap(), 11);
        assert_eq!(w.forward.error_of(10).unwrap(), Rational::pow2(-10));
        assert!(w.forward.error_of(11).unwrap() < eps);
    }

    #[test]
    fn exact_backward_plans() {
        for f in [pbf::eq_weighted(), m(2, 1, 1, 3), m(0, 2, 3, 0)] {
            let w = binary_witness(&f).unwrap();
            assert!(w.backward.is_exact());
            assert_eq!(w.backward.error_of(1).unwrap(), Rational::zero());
        }
    }

    #[test]
    fn or_limit_entry() {
        let f1 = FnTable::from_matrix([[q(0, 1), q(1, 1)], [q(1, 1), q(1, 4)]]);
        assert_eq!(f1.powi(10).entry(1, 1), &q(1, 4).pow(10));
    }
}
