mod common;

use common::{brute_evaluate, brute_ising, count_solutions, random_lsm3, rng};
use fclone_core::analysis::is_lsm;
use fclone_core::formula::{
    ordinal_multiple, partition_function, power_of_two, Env, Implementation,
};
use fclone_core::gadgets::*;
use fclone_core::pbf::{self, FnTable};
use fclone_core::random;
use fclone_core::{q, Rational};
use proptest::prelude::*;
use rand::Rng;

/// The binary case split read straight off the conditions.
fn binary_oracle(f: &FnTable) -> (&'static str, bool) {
    let (f00, mut f01, mut f10, f11) = (f.entry(0, 0), f.entry(0, 1), f.entry(1, 0), f.entry(1, 1));
    let transposed = f01 < f10;
    if transposed {
        std::mem::swap(&mut f01, &mut f10);
    }
    let z = |v: &Rational| v.is_zero();
    let p = |v: &Rational| v.is_positive();
    let label = if f00 * f11 == f01 * f10 {
        "i"
    } else if z(f01) && z(f10) && p(f00) && p(f11) {
        "ii"
    } else if z(f00) && z(f11) && p(f01) && p(f10) {
        "iii"
    } else if p(f00) && p(f01) && p(f11) && f00 * f11 > f01 * f10 {
        "iv"
    } else if z(f11) {
        "v(b)"
    } else {
        "v(a)"
    };
    (label, transposed)
}

fn apply_unaries(f: &FnTable, u1: &FnTable, u2: &FnTable) -> FnTable {
    FnTable::from_fn(2, |m| f.get(m) * u1.get(m & 1) * u2.get(m >> 1))
}

fn check_binary(f: &FnTable) {
    let c = classify_binary(f).unwrap();
    let (label, transposed) = binary_oracle(f);
    assert_eq!(c.label(), label, "{f}");
    assert_eq!(c.transposed, transposed, "{f}");
    assert_eq!(c.reconstruct(), *f, "{f}");
    let g = if transposed { f.transpose() } else { f.clone() };
    let one = Rational::one();
    match &c.case {
        BinaryCase::ImpLike { alpha, u1, u2 } => {
            let h = apply_unaries(&g, u1, u2);
            assert_eq!(
                h.values(),
                &[one.clone(), alpha.clone(), one.clone(), one][..]
            );
            assert!(!alpha.is_negative() && *alpha < Rational::one());
        }
        BinaryCase::OrLike { alpha, u1, u2 } => {
            let h = apply_unaries(&g, u1, u2);
            assert_eq!(
                h.values(),
                &[alpha.clone(), one.clone(), one.clone(), one][..]
            );
            assert!(*alpha < Rational::one());
        }
        BinaryCase::NandLike { u1, u2 } => {
            assert_eq!(apply_unaries(&g, u1, u2), pbf::nand());
        }
        _ => {}
    }
}

#[test]
fn binary_case_split_matches_conditions() {
    let grid = [
        q(0, 1),
        q(0, 1),
        q(1, 1),
        q(2, 1),
        q(3, 1),
        q(1, 2),
        q(3, 2),
    ];
    let mut r = rng(0xb1);
    let mut seen = std::collections::BTreeMap::new();
    for _ in 0..10_000 {
        let f = random::table_from_grid(&mut r, 2, &grid);
        check_binary(&f);
        *seen.entry(binary_oracle(&f).0).or_insert(0) += 1;
    }
    for label in ["i", "ii", "iii", "iv", "v(a)", "v(b)"] {
        assert!(
            seen.get(label).copied().unwrap_or(0) > 0,
            "case {label} never sampled: {seen:?}"
        );
    }
}

#[test]
fn binary_boundaries() {
    let cases: [[i64; 4]; 10] = [
        [0, 0, 0, 0],
        [1, 1, 1, 1],
        [2, 1, 2, 1],
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 2, 1, 0],
        [1, 1, 0, 1],
        [1, 0, 1, 1],
        [1, 1, 1, 0],
        [0, 1, 1, 1],
    ];
    for v in cases {
        check_binary(&FnTable::from_ints(2, &v).unwrap());
    }
    // f00 f11 = f01 f10 with one zero row.
    check_binary(&FnTable::from_ints(2, &[0, 3, 0, 5]).unwrap());
    check_binary(&FnTable::from_ints(2, &[4, 0, 7, 0]).unwrap());
    assert!(matches!(
        classify_binary(&pbf::xor3()),
        Err(GadgetError::WrongArity { .. })
    ));
}

fn eps_grid() -> [Rational; 3] {
    [Rational::pow2(-4), Rational::pow2(-10), Rational::pow2(-20)]
}

fn assert_plan_within(plan: &GadgetPlan, eps: &Rational) {
    let (k, imp) = plan.instantiate_for(eps).unwrap();
    let got = imp.evaluate().unwrap();
    let err = got.max_abs_diff(&plan.target).unwrap();
    assert!(&err < eps, "{}: k = {k}, error {err} vs {eps}", plan.label);
    if !plan.is_exact() {
        assert!(
            plan.error_of(k + 1).unwrap() <= err,
            "{}: error grew past k = {k}",
            plan.label
        );
    }
}

#[test]
fn binary_witness_plans_meet_eps() {
    let grid = [q(0, 1), q(1, 1), q(2, 1), q(3, 1), q(1, 2)];
    let mut r = rng(0xb2);
    let mut checked = 0;
    while checked < 40 {
        let f = random::table_from_grid(&mut r, 2, &grid);
        let Ok(w) = binary_witness(&f) else { continue };
        checked += 1;
        for eps in eps_grid() {
            assert_plan_within(&w.forward, &eps);
            assert_plan_within(&w.backward, &eps);
        }
    }
}

#[test]
fn binary_round_trip_within_two_eps() {
    let grid = [q(0, 1), q(1, 1), q(2, 1), q(3, 1), q(1, 2)];
    let mut r = rng(0xb3);
    let mut checked = 0;
    while checked < 20 {
        let f = random::table_from_grid(&mut r, 2, &grid);
        let Ok(w) = binary_witness(&f) else { continue };
        checked += 1;
        for eps in [Rational::pow2(-4), Rational::pow2(-10)] {
            let err = round_trip_error(&w, &eps).unwrap();
            assert!(err < &eps * &Rational::from(2), "{f}: {err}");
        }
    }
}

#[test]
fn or_universal_stages_and_plan() {
    let mut r = rng(0x0b);
    for case in 0..30 {
        let n = r.gen_range(1..=3);
        let f = random::table(&mut r, n, 0.3);
        let u = or_universal(&f).unwrap();
        if f.is_all_zero() {
            assert_eq!(u.plan.instantiate(1).evaluate().unwrap(), f);
            continue;
        }
        assert_eq!(u.psi1.evaluate().unwrap(), stage1_oracle(&f), "case {case}");
        let psi2 = u.psi2.evaluate().unwrap();
        assert!(psi2.values().iter().all(|v| *v == q(1, 1) || *v == q(2, 1)));
        assert_eq!(
            psi2,
            FnTable::from_fn(n, |x| q(if f.get(x).is_zero() { 1 } else { 2 }, 1))
        );
        assert_eq!(u.plan.is_exact(), f.is_permissive());
        for eps in eps_grid() {
            assert_plan_within(&u.plan, &eps);
        }
    }
}

/// `2F(A)/μ` on the support and 1 elsewhere, μ the least positive value.
fn stage1_oracle(f: &FnTable) -> FnTable {
    let mu = f
        .values()
        .iter()
        .filter(|v| v.is_positive())
        .min()
        .unwrap()
        .clone();
    FnTable::from_fn(f.arity(), |x| {
        if f.get(x).is_zero() {
            q(1, 1)
        } else {
            f.get(x) * q(2, 1) / &mu
        }
    })
}

#[test]
fn or_universal_worked_example() {
    let f = FnTable::from_ints(2, &[0, 1, 2, 4]).unwrap();
    let u = or_universal(&f).unwrap();
    assert_eq!(
        u.psi1.evaluate().unwrap(),
        FnTable::from_ints(2, &[1, 2, 4, 8]).unwrap()
    );
    assert_eq!(
        u.psi2.evaluate().unwrap(),
        FnTable::from_ints(2, &[1, 2, 2, 2]).unwrap()
    );
}

#[test]
fn lsm3_decompositions_reconstruct() {
    let mut r = rng(0x13);
    let (mut plain, mut comp) = (0, 0);
    for _ in 0..500 {
        let f = random_lsm3(&mut r);
        let d = lsm3_decompose(&f).unwrap();
        assert_eq!(d.reconstruct(), f);
        assert!(d
            .factors
            .iter()
            .all(|c| c.mask.count_ones() < 2 || c.weight >= q(1, 1)));
        if d.complemented {
            comp += 1;
        } else {
            plain += 1;
        }
    }
    assert!(plain > 0 && comp > 0, "plain {plain}, complemented {comp}");
}

#[test]
fn lsm3_implementations_evaluate() {
    let mut r = rng(0x14);
    for _ in 0..60 {
        let f = random_lsm3(&mut r);
        let d = lsm3_decompose(&f).unwrap();
        let imp = d.implementation().unwrap();
        assert_eq!(brute_evaluate(&imp.formula, &imp.env), f);
    }
}

#[test]
fn chi_builder_matches_table() {
    for arity in 0..=3usize {
        for y0 in 0..1usize << arity {
            for c in [q(1, 1), q(5, 2), q(4, 1)] {
                let want =
                    FnTable::from_fn(arity, |x| if x & y0 == y0 { c.clone() } else { q(1, 1) });
                let imp = chi_builder(arity, y0, &c, false).unwrap();
                assert_eq!(brute_evaluate(&imp.formula, &imp.env), want);
                let rev = chi_builder(arity, y0, &c, true).unwrap();
                assert_eq!(brute_evaluate(&rev.formula, &rev.env), want.bar());
            }
        }
    }
}

#[test]
fn ising_identity_on_random_matrices() {
    let mut r = rng(0x15);
    let y = q(3, 1);
    for _ in 0..100 {
        let rows = r.gen_range(1..=4);
        let cols = r.gen_range(1..=5);
        let m = random::gf2_matrix(&mut r, rows, cols);
        let red = ising_reduction(&m, &y).unwrap();
        let z = brute_evaluate(&red.instance.as_formula(), &red.env)
            .get(0)
            .clone();
        assert_eq!(brute_ising(&m, &y), &red.scale * z, "{m:?}");
        assert_eq!(ising_partition_function(&m, &y), brute_ising(&m, &y));
    }
}

#[test]
fn ising_all_ones_square() {
    let m = Gf2Matrix::from_ints(&[&[1, 1], &[1, 1]]).unwrap();
    assert_eq!(brute_ising(&m, &q(3, 1)), q(20, 1));
    let red = ising_reduction(&m, &q(3, 1)).unwrap();
    assert_eq!(red.scale, q(16, 1));
    assert_eq!(
        &red.scale * partition_function(&red.instance, &red.env).unwrap(),
        q(20, 1)
    );
}

#[test]
fn topkis_lift_postconditions() {
    let mut r = rng(0x16);
    let mut checked = 0;
    while checked < 200 {
        let n = r.gen_range(1..=4);
        let f = random::table(&mut r, n, 0.4);
        if !is_lsm(&f).is_member() {
            assert!(matches!(topkis_lift(&f), Err(GadgetError::NotLsm)));
            continue;
        }
        checked += 1;
        let g = topkis_lift(&f).unwrap();
        assert!(g.is_permissive(), "{f}");
        assert!(is_lsm(&g).is_member(), "{f} -> {g}");
        assert_eq!(f.underlying_relation().mul_pointwise(&g).unwrap(), f);
    }
}

#[test]
fn nonlsm_extraction() {
    let mut r = rng(0x17);
    let mut checked = 0;
    while checked < 40 {
        let n = r.gen_range(2..=4);
        let f = random::table(&mut r, n, 0.3);
        if is_lsm(&f).is_member() {
            assert!(matches!(
                extract_nonlsm_binary(&f),
                Err(GadgetError::AlreadyLsm)
            ));
            continue;
        }
        checked += 1;
        let w = extract_nonlsm_binary(&f).unwrap();
        let t = &w.table;
        assert!(t.is_permissive());
        assert!(
            t.entry(0, 0) * t.entry(1, 1) < t.entry(0, 1) * t.entry(1, 0),
            "{f}"
        );
        // The pinning is read off the smoothed function.
        let h = smoothed(&f, w.k);
        let base = w
            .pins
            .iter()
            .filter(|&&(c, _)| c != w.i && c != w.j)
            .fold(0usize, |x, &(p, c)| x | (c as usize) << p);
        let direct = FnTable::from_fn(2, |m| {
            h.get(base | (m & 1) << w.i | (m >> 1) << w.j).clone()
        });
        assert_eq!(&direct, t);
    }
}

#[test]
fn counting_instances_by_enumeration() {
    let env: Env = [("IMP".to_string(), pbf::imp())].into_iter().collect();
    for a in 1..=5usize {
        for l in 1..=5usize {
            let inst = ordinal_multiple(a, &power_of_two(l, "v"), "IMP", &env).unwrap();
            let want = (a << l) - a + 1;
            assert_eq!(
                count_solutions(&inst, &env),
                want as u64,
                "a = {a}, l = {l}"
            );
            assert_eq!(
                partition_function(&inst, &env).unwrap(),
                Rational::from(want as i64)
            );
        }
    }
}

#[test]
fn synthesised_weights() {
    let eval = |imp: &Implementation| brute_evaluate(&imp.formula, &imp.env);
    let imp = synth_unary(&q(3, 8), &q(5, 8), SynthRoute::Imp, 3).unwrap();
    assert_eq!(eval(&imp), FnTable::unary(q(3, 8), q(5, 8)));
    let or = synth_unary(&q(1, 4), &q(3, 4), SynthRoute::Or, 2).unwrap();
    assert_eq!(eval(&or), FnTable::unary(q(1, 4), q(3, 4)));
    let nand = synth_unary(&q(3, 4), &q(1, 4), SynthRoute::Nand, 2).unwrap();
    assert_eq!(eval(&nand), FnTable::unary(q(3, 4), q(1, 4)));
    assert!(matches!(
        synth_unary(&q(1, 3), &q(1, 2), SynthRoute::Imp, 4),
        Err(GadgetError::NonDyadic(_))
    ));
    assert!(matches!(
        synth_unary(&q(3, 4), &q(1, 4), SynthRoute::Or, 2),
        Err(GadgetError::NotMonotone)
    ));
}

#[test]
fn shifted_weight_within_eps() {
    let g = FnTable::unary(q(2, 1), q(1, 1));
    for (h, eps) in [
        (FnTable::unary(q(1, 3), q(1, 5)), Rational::pow2(-4)),
        (FnTable::unary(q(1, 2), q(1, 1)), Rational::pow2(-3)),
    ] {
        let s = shift_monotone(&h, &g, &eps).unwrap();
        assert_eq!(
            s.h_prime,
            FnTable::from_fn(1, |x| h.get(x) / g.get(x).pow(s.k as i64))
        );
        assert!(s.h_prime.get(0) < s.h_prime.get(1));
        let got = s.plan.instantiate(1).evaluate().unwrap();
        assert_eq!(got, s.plan.target);
        let err = got.max_abs_diff(&h).unwrap();
        assert_eq!(err, s.error);
        assert!(err < eps);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classify_binary_reconstructs(vals in prop::array::uniform4(0i64..5), den in 1i64..4) {
        let f = FnTable::new(2, vals.iter().map(|&v| q(v, den)).collect()).unwrap();
        check_binary(&f);
    }

    #[test]
    fn smoothing_is_positive_combination(seed in any::<u64>(), k in 0u64..6) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let f = random::table(&mut r, n, 0.3);
        let h = smoothed(&f, k);
        let kern = |a: usize, b: usize| if a == b { Rational::pow2(k as i64) } else { Rational::one() };
        for x in 0..f.len() {
            let want: Rational = (0..f.len())
                .map(|y| (0..n).fold(f.get(y).clone(), |acc, i| acc * kern(x >> i & 1, y >> i & 1)))
                .sum();
            prop_assert_eq!(h.get(x), &want);
        }
    }
}
