mod common;

use common::{brute_fourier, brute_lsm, rng};
use fclone_core::analysis::*;
use fclone_core::pbf::{self, FnTable, Pinning};
use fclone_core::random;
use fclone_core::transforms::*;
use fclone_core::{q, Rational};
use proptest::prelude::*;
use rand::Rng;

fn arb_table(max_arity: usize, zero_prob: f64) -> impl Strategy<Value = FnTable> {
    (1..=max_arity, any::<u64>())
        .prop_map(move |(n, seed)| random::table(&mut rng(seed), n, zero_prob))
}

fn arb_permissive(max_arity: usize) -> impl Strategy<Value = FnTable> {
    arb_table(max_arity, 0.0)
}

fn arb_pair(max_arity: usize, zero_prob: f64) -> impl Strategy<Value = (FnTable, FnTable)> {
    (1..=max_arity, any::<u64>()).prop_map(move |(n, seed)| {
        let mut r = rng(seed);
        (
            random::table(&mut r, n, zero_prob),
            random::table(&mut r, n, zero_prob),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bar_commutes_with_sum_out(f in arb_table(6, 0.3), pick in any::<usize>()) {
        let i = pick % f.arity();
        prop_assert_eq!(f.sum_out(i).unwrap().bar(), f.bar().sum_out(i).unwrap());
    }

    #[test]
    fn star_is_multiplicative((f, g) in arb_pair(6, 0.3)) {
        prop_assert_eq!(f.mul_pointwise(&g).unwrap().star(), f.star().mul_pointwise(&g.star()).unwrap());
    }

    #[test]
    fn pinning_is_sum_against_delta(f in arb_table(5, 0.3), pick in any::<usize>(), c in any::<bool>()) {
        let i = pick % f.arity();
        let direct = f.pin(&Pinning::new([(i, c)]).unwrap()).unwrap();
        // Multiply by delta_c on position i, then sum it out.
        let delta = pbf::delta(c);
        let weighted = FnTable::from_fn(f.arity(), |x| f.get(x) * delta.get(x >> i & 1));
        prop_assert_eq!(weighted.sum_out(i).unwrap(), direct);
    }

    #[test]
    fn fourier_round_trip(f in arb_table(8, 0.3)) {
        prop_assert_eq!(fourier(&f).inverse().unwrap(), f);
    }

    #[test]
    fn fourier_matches_definition(f in arb_table(4, 0.3)) {
        let hat = fourier(&f);
        for y in 0..f.len() {
            prop_assert_eq!(hat.get(y), &brute_fourier(&f, y));
        }
    }

    #[test]
    fn mobius_round_trip(f in arb_permissive(8)) {
        prop_assert_eq!(inverse_mobius(&mobius(&f).unwrap()).unwrap(), f);
    }

    #[test]
    fn convolution_theorem((f, g) in arb_pair(6, 0.3)) {
        prop_assert!(convolution_check(&f, &g));
    }

    #[test]
    fn lsm_matches_definition(f in arb_table(4, 0.3)) {
        prop_assert_eq!(is_lsm(&f).is_member(), brute_lsm(&f));
    }

    #[test]
    fn lsm_invariant_under_bar(f in arb_table(5, 0.3)) {
        prop_assert_eq!(is_lsm(&f).is_member(), is_lsm(&f.bar()).is_member());
    }

    #[test]
    fn topkis_agrees_with_lsm(f in arb_permissive(6)) {
        prop_assert_eq!(is_lsm_topkis(&f).unwrap().is_member(), is_lsm(&f).is_member());
    }

    #[test]
    fn product_form_certificates_reconstruct(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = product_form_member(&mut r);
        let cert = product_form_test(&f).unwrap();
        prop_assert_eq!(cert.reconstruct(), f);
    }
}

/// A random member of the NEQ/unary clone: pins, EQ/NEQ classes, weights.
fn product_form_member<R: Rng>(r: &mut R) -> FnTable {
    let n = r.gen_range(1..=5);
    let mut rep: Vec<(usize, bool)> = Vec::new();
    let mut pins: Vec<Option<bool>> = vec![None; n];
    for i in 0..n {
        match r.gen_range(0..4) {
            0 => pins[i] = Some(r.gen_bool(0.5)),
            1 if i > 0 => rep.push((r.gen_range(0..i), r.gen_bool(0.5))),
            _ => {}
        }
        if rep.len() < i + 1 {
            rep.push((i, false));
        }
    }
    let w: Vec<(Rational, Rational)> = (0..n)
        .map(|_| {
            (
                random::positive_rational(r, 5, 3),
                random::positive_rational(r, 5, 3),
            )
        })
        .collect();
    FnTable::from_fn(n, |x| {
        let bit = |i: usize| x >> i & 1 == 1;
        for i in 0..n {
            if pins[i].is_some_and(|c| bit(i) != c) {
                return Rational::zero();
            }
            let (p, flip) = rep[i];
            if bit(i) != (bit(p) ^ flip) {
                return Rational::zero();
            }
        }
        (0..n)
            .map(|i| {
                if bit(i) {
                    w[i].1.clone()
                } else {
                    w[i].0.clone()
                }
            })
            .product()
    })
}

#[test]
fn lsm_iff_topkis_exhaustive_small() {
    let grid = [q(1, 1), q(2, 1), q(3, 1)];
    for n in 1..=3usize {
        let len = 1usize << n;
        for code in 0..3usize.pow(len as u32) {
            let mut c = code;
            let f = FnTable::from_fn(n, |_| {
                let v = grid[c % 3].clone();
                c /= 3;
                v
            });
            assert_eq!(
                is_lsm(&f).is_member(),
                is_lsm_topkis(&f).unwrap().is_member(),
                "{f}"
            );
        }
    }
}

#[test]
fn class_p_closure() {
    let mut r = rng(21);
    let mut members = Vec::new();
    while members.len() < 60 {
        let f = random::table(&mut r, 3, 0.2);
        if in_class_p(&f).is_member() {
            members.push(f);
        }
    }
    for pair in members.chunks(2) {
        let (f, g) = (&pair[0], &pair[1]);
        assert!(in_class_p(&f.add_pointwise(g).unwrap()).is_member());
        assert!(in_class_p(&f.mul_pointwise(g).unwrap()).is_member());
        assert!(in_class_p(&f.sum_out(0).unwrap()).is_member());
    }
}

#[test]
fn class_c_closure() {
    let mut r = rng(22);
    let mut members = Vec::new();
    while members.len() < 40 {
        let f = random::table(&mut r, 3, 0.2);
        if in_class_c(&f).is_member() {
            members.push(f);
        }
    }
    for pair in members.chunks(2) {
        let (f, g) = (&pair[0], &pair[1]);
        assert!(in_class_c(&f.mul_pointwise(g).unwrap()).is_member());
        assert!(in_class_c(&f.sum_out(r.gen_range(0..3)).unwrap()).is_member());
    }
}

#[test]
fn named_examples() {
    assert!(!is_lsm(&pbf::xor3()).is_member());
    let w = is_lsm(&pbf::xor3());
    let PairWitness { x, y } = *w.witness().unwrap();
    let f = pbf::xor3();
    assert!(f.get(x) * f.get(y) > f.get(x & y) * f.get(x | y));
    // The pair (1,1,0), (0,1,1) also violates.
    let (a, b) = (0b011, 0b110);
    assert!(f.get(a) * f.get(b) > f.get(a & b) * f.get(a | b));
    assert!(is_lsm(&pbf::imp()).is_member());
    assert!(in_class_p(&pbf::eq_weighted()).is_member());
    assert_eq!(
        fourier(&pbf::xor3()).coeffs,
        pbf::eq3().scale(&q(1, 2)).values().to_vec()
    );
    assert!(matches!(
        relation_trichotomy(&pbf::imp()).unwrap(),
        RelationClass::NonAffine { .. }
    ));
    assert_eq!(
        relation_trichotomy(&pbf::neq()).unwrap(),
        RelationClass::WithinId1
    );
    assert!(matches!(
        relation_trichotomy(&pbf::xor3()).unwrap(),
        RelationClass::AffineIl2 { .. }
    ));
}
