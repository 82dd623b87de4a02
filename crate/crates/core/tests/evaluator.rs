mod common;

use common::{brute_evaluate, rng};
use fclone_core::analysis::is_lsm;
use fclone_core::formula::*;
use fclone_core::pbf::{self, FnTable};
use fclone_core::random::{self, FormulaShape};
use fclone_core::{q, Rational};
use proptest::prelude::*;
use rand::Rng;

fn shape<R: Rng>(r: &mut R) -> FormulaShape {
    let free = r.gen_range(0..=4);
    FormulaShape {
        free,
        bound: r.gen_range(0..=12 - free),
        atoms: r.gen_range(0..=10),
        max_atom_arity: 3,
        zero_prob: 0.2,
    }
}

#[test]
fn matches_brute_force_on_random_formulas() {
    let mut r = rng(0x5eed_0001);
    for case in 0..200 {
        let (psi, env) = {
            let s = shape(&mut r);
            random::formula(&mut r, s)
        };
        assert_eq!(
            evaluate(&psi, &env).unwrap(),
            brute_evaluate(&psi, &env),
            "case {case}: {psi:?}"
        );
    }
}

#[test]
fn equality_atoms_are_contracted() {
    let mut r = rng(7);
    for _ in 0..50 {
        let (mut psi, mut env) = {
            let s = shape(&mut r);
            random::formula(&mut r, s)
        };
        env.insert("EQ".into(), pbf::eq());
        let vars: Vec<String> = psi.variables().cloned().collect();
        if vars.len() >= 2 {
            for _ in 0..3 {
                let a = vars[r.gen_range(0..vars.len())].clone();
                let b = vars[r.gen_range(0..vars.len())].clone();
                psi.atoms.push(Atom::from_strings("EQ", vec![a, b]));
            }
        }
        assert_eq!(evaluate(&psi, &env).unwrap(), brute_evaluate(&psi, &env));
    }
}

#[test]
fn order_independent() {
    let mut r = rng(11);
    for _ in 0..100 {
        let (psi, env) = {
            let s = shape(&mut r);
            random::formula(&mut r, s)
        };
        let mut rev = psi.clone();
        rev.bound.reverse();
        rev.atoms.reverse();
        let a = plan_elimination(&psi, &env, DEFAULT_INTERMEDIATE_CAP).unwrap();
        let b = plan_elimination(&rev, &env, DEFAULT_INTERMEDIATE_CAP).unwrap();
        assert_eq!(a.steps.len(), b.steps.len());
        assert_eq!(evaluate(&psi, &env).unwrap(), evaluate(&rev, &env).unwrap());
    }
}

#[test]
fn parallel_fill_matches_serial() {
    let mut r = rng(12);
    let serial = EvalOptions {
        parallel_threshold: usize::MAX,
        ..EvalOptions::default()
    };
    let parallel = EvalOptions {
        parallel_threshold: 1,
        ..EvalOptions::default()
    };
    for _ in 0..30 {
        let (psi, env) = {
            let s = shape(&mut r);
            random::formula(&mut r, s)
        };
        assert_eq!(
            evaluate_with(&psi, &env, &serial).unwrap(),
            evaluate_with(&psi, &env, &parallel).unwrap()
        );
    }
}

#[test]
fn flatten_preserves_value() {
    let mut r = rng(13);
    for _ in 0..100 {
        let (psi, mut env) = random::formula(
            &mut r,
            FormulaShape {
                free: 2,
                bound: 3,
                atoms: 4,
                max_atom_arity: 2,
                zero_prob: 0.1,
            },
        );
        let (inner, inner_env) = random::formula(
            &mut r,
            FormulaShape {
                free: 2,
                bound: 2,
                atoms: 3,
                max_atom_arity: 3,
                zero_prob: 0.1,
            },
        );
        for (k, v) in inner_env {
            env.insert(format!("H{k}"), v);
        }
        let mut inner = inner;
        for a in &mut inner.atoms {
            a.func = format!("H{}", a.func);
        }
        env.insert("G".into(), evaluate(&inner, &env).unwrap());
        let mut outer = psi.clone();
        let vars: Vec<String> = outer.variables().cloned().collect();
        for _ in 0..2 {
            let a = vars[r.gen_range(0..vars.len())].clone();
            let b = vars[r.gen_range(0..vars.len())].clone();
            outer.atoms.push(Atom::from_strings("G", vec![a, b]));
        }
        let flat = flatten(&outer, "G", &inner).unwrap();
        assert_eq!(
            evaluate(&flat, &env).unwrap(),
            evaluate(&outer, &env).unwrap()
        );
        assert_eq!(flat.bound.len(), outer.bound.len() + 2 * inner.bound.len());
    }
}

#[test]
fn sums_of_lsm_products_stay_lsm() {
    let mut r = rng(14);
    let mut checked = 0;
    while checked < 40 {
        let (psi, env) = random::formula(
            &mut r,
            FormulaShape {
                free: 3,
                bound: 2,
                atoms: 4,
                max_atom_arity: 2,
                zero_prob: 0.0,
            },
        );
        if !env.values().all(|t| is_lsm(t).is_member()) {
            continue;
        }
        checked += 1;
        assert!(is_lsm(&evaluate(&psi, &env).unwrap()).is_member());
    }
}

#[test]
fn imp_path_counts_up_sets() {
    for n in 1..=10 {
        let vars: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let atoms = vars
            .windows(2)
            .map(|w| Atom::from_strings("IMP", w.to_vec()))
            .collect();
        let inst = CspInstance {
            variables: vars,
            atoms,
        };
        let env: Env = [("IMP".to_string(), pbf::imp())].into_iter().collect();
        let z = partition_function(&inst, &env).unwrap();
        assert_eq!(z, brute_evaluate(&inst.as_formula(), &env).get(0).clone());
        assert_eq!(z, Rational::from(n as i64 + 1));
    }
}

#[test]
fn chain_width_is_two() {
    let env: Env = [("IMP".to_string(), pbf::imp())].into_iter().collect();
    let psi = PpsFormula::new(
        &["a", "d"],
        &["b", "c"],
        vec![
            Atom::new("IMP", &["a", "b"]),
            Atom::new("IMP", &["b", "c"]),
            Atom::new("IMP", &["c", "d"]),
        ],
    );
    assert_eq!(plan_elimination(&psi, &env, 22).unwrap().width(), 2);
}

#[test]
fn worked_gadgets() {
    let env: Env = [
        ("IMP".to_string(), pbf::imp()),
        ("NAND".to_string(), pbf::nand()),
        ("XOR3".to_string(), pbf::xor3()),
        ("U".to_string(), FnTable::unary(q(1, 1), q(2, 1))),
    ]
    .into_iter()
    .collect();
    let h = PpsFormula::new(
        &["x1", "x2"],
        &["y1", "y2"],
        vec![
            Atom::new("IMP", &["y1", "x1"]),
            Atom::new("IMP", &["y1", "x2"]),
            Atom::new("IMP", &["x1", "y2"]),
            Atom::new("IMP", &["x2", "y2"]),
        ],
    );
    assert_eq!(
        evaluate(&h, &env).unwrap(),
        FnTable::from_ints(2, &[2, 1, 1, 2]).unwrap()
    );
    let g = PpsFormula::new(
        &["x", "z"],
        &["y"],
        vec![Atom::new("XOR3", &["x", "y", "z"]), Atom::new("U", &["y"])],
    );
    assert_eq!(
        evaluate(&g, &env).unwrap(),
        FnTable::from_ints(2, &[1, 2, 2, 1]).unwrap()
    );
    let u = PpsFormula::new(&["x"], &["y"], vec![Atom::new("NAND", &["x", "y"])]);
    assert_eq!(
        evaluate(&u, &env).unwrap(),
        FnTable::from_ints(1, &[2, 1]).unwrap()
    );
}

#[test]
fn errors_are_reported() {
    let env: Env = [("IMP".to_string(), pbf::imp())].into_iter().collect();
    let bad = PpsFormula::new(&["x"], &[], vec![Atom::new("NOPE", &["x"])]);
    assert!(matches!(
        evaluate(&bad, &env),
        Err(FormulaError::UndefinedFunction(_))
    ));
    let arity = PpsFormula::new(&["x"], &[], vec![Atom::new("IMP", &["x"])]);
    assert!(matches!(
        evaluate(&arity, &env),
        Err(FormulaError::ArityMismatch { .. })
    ));
    let unknown = PpsFormula::new(&["x"], &[], vec![Atom::new("IMP", &["x", "w"])]);
    assert!(matches!(
        evaluate(&unknown, &env),
        Err(FormulaError::UnknownVariable { .. })
    ));
    let names: Vec<String> = (0..30).map(|i| format!("v{i}")).collect();
    let mut atoms = Vec::new();
    for i in 0..30 {
        for j in i + 1..30 {
            atoms.push(Atom::from_strings(
                "IMP",
                vec![names[i].clone(), names[j].clone()],
            ));
        }
    }
    let clique = CspInstance {
        variables: names,
        atoms,
    };
    assert!(matches!(
        partition_function(&clique, &env),
        Err(FormulaError::IntermediateArity { .. })
    ));
}

#[test]
fn perturbation_stays_within_half_eps() {
    let mut r = rng(15);
    for _ in 0..60 {
        let (psi, env) = random::formula(
            &mut r,
            FormulaShape {
                free: 2,
                bound: 3,
                atoms: 4,
                max_atom_arity: 2,
                zero_prob: 0.2,
            },
        );
        if psi.atoms.is_empty() {
            continue;
        }
        let replaced: Vec<usize> = (0..psi.atoms.len()).filter(|_| r.gen_bool(0.5)).collect();
        let eps = q(1, r.gen_range(2..64));
        let budget = tolerance_budget(&psi, &env, &replaced, &eps).unwrap();
        // Rename replaced atoms to perturbed copies, each entry moved by at most delta.
        let mut psi2 = psi.clone();
        let mut env2 = env.clone();
        for &j in &replaced {
            let t = &env[&psi.atoms[j].func];
            let moved = FnTable::from_fn(t.arity(), |x| {
                let d = &budget.delta * q(r.gen_range(0..=8), 8);
                if r.gen_bool(0.5) || t.get(x) < &d {
                    t.get(x) + d
                } else {
                    t.get(x) - d
                }
            });
            let name = format!("P{j}");
            env2.insert(name.clone(), moved);
            psi2.atoms[j].func = name;
        }
        let a = evaluate(&psi, &env).unwrap();
        let b = evaluate(&psi2, &env2).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < &eps / &Rational::from(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluator_agrees_with_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (psi, env) = { let s = shape(&mut r); random::formula(&mut r, s) };
        prop_assert_eq!(evaluate(&psi, &env).unwrap(), brute_evaluate(&psi, &env));
    }
}
