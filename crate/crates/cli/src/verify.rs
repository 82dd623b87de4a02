use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use fclone_core::analysis::{is_lsm, is_lsm_topkis};
use fclone_core::formula::{evaluate, flatten, partition_function, Atom, Env, PpsFormula};
use fclone_core::gadgets::{chi_table, ising_partition_function, ising_reduction, lsm3_decompose};
use fclone_core::random::{self, FormulaShape};
use fclone_core::transforms::{
    convolution_check, fourier, in_class_c, in_class_p, inverse_mobius, mobius,
};
use fclone_core::{pbf, q, FnTable, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::dsl::Document;
use crate::{json_string, Global, Outcome};

/// Largest number of tables an exhaustive grid search may visit.
const EXHAUSTIVE_LIMIT: usize = 1 << 20;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub lemma: Lemma,
    /// Arity of the generated functions (or matrix size for `ising`).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of random cases.
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    /// lsm agrees with the 2-pinning test on permissive functions.
    Topkis,
    /// A permissive lsm arity-4 function whose `F*` has a negative Fourier coefficient.
    Lsm4Counterexample,
    /// The Fourier transform turns products into convolutions.
    Convolution,
    /// `P` is closed under sums, products and summing out a variable.
    PClosure,
    /// `C` is closed under products and summing out a variable.
    CClosure,
    /// Arity-3 lsm decompositions reconstruct and evaluate to the input.
    Lsm3,
    /// The cycle-space instance times its scale is the Ising partition function.
    Ising,
    /// Substituting a formula for a function symbol keeps the value.
    Flatten,
    /// Möbius transform followed by its inverse is the identity.
    Mobius,
    /// Fourier transform followed by its inverse is the identity.
    Fourier,
}

/// One generated input: its DSL dump and what to check.
struct Case {
    doc: Document,
    kind: Check,
}

enum Check {
    Topkis(FnTable),
    Convolution(FnTable, FnTable),
    PClosure(FnTable, FnTable, usize),
    CClosure(FnTable, FnTable, usize),
    Lsm3(FnTable),
    Ising {
        matrix: String,
        y: Rational,
    },
    Flatten {
        outer: PpsFormula,
        inner: PpsFormula,
        env: Env,
    },
    Mobius(FnTable),
    Fourier(FnTable),
}

fn functions(tables: &[&FnTable]) -> Document {
    let names = ["F", "G", "H"];
    Document {
        functions: tables
            .iter()
            .zip(names)
            .map(|(t, n)| (n.to_string(), (*t).clone()))
            .collect(),
        ..Document::default()
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

impl Case {
    fn tables(tables: &[&FnTable], kind: Check) -> Self {
        Case {
            doc: functions(tables),
            kind,
        }
    }

    fn check(&self) -> Result<(), String> {
        match &self.kind {
            Check::Topkis(f) => {
                let a = is_lsm(f).is_member();
                let b = is_lsm_topkis(f).map_err(|e| e.to_string())?.is_member();
                ensure(a == b, || {
                    format!("is_lsm = {a} but the 2-pinning test says {b}")
                })
            }
            Check::Convolution(f, g) => ensure(convolution_check(f, g), || {
                "(FG)^ differs from F^ * G^".into()
            }),
            Check::PClosure(f, g, i) => {
                let sum = f.add_pointwise(g).map_err(|e| e.to_string())?;
                let prod = f.mul_pointwise(g).map_err(|e| e.to_string())?;
                let marg = f.sum_out(*i).map_err(|e| e.to_string())?;
                ensure(in_class_p(&sum).is_member(), || "F + G is not in P".into())?;
                ensure(in_class_p(&prod).is_member(), || "F G is not in P".into())?;
                ensure(in_class_p(&marg).is_member(), || {
                    format!("F summed over x{} is not in P", i + 1)
                })
            }
            Check::CClosure(f, g, i) => {
                let prod = f.mul_pointwise(g).map_err(|e| e.to_string())?;
                let marg = f.sum_out(*i).map_err(|e| e.to_string())?;
                ensure(in_class_c(&prod).is_member(), || "F G is not in C".into())?;
                ensure(in_class_c(&marg).is_member(), || {
                    format!("F summed over x{} is not in C", i + 1)
                })
            }
            Check::Lsm3(f) => {
                let d = lsm3_decompose(f).map_err(|e| e.to_string())?;
                ensure(&d.reconstruct() == f, || {
                    "factors do not multiply back to F".into()
                })?;
                let imp = d.implementation().map_err(|e| e.to_string())?;
                let got = evaluate(&imp.formula, &imp.env).map_err(|e| e.to_string())?;
                ensure(&got == f, || format!("implementation evaluates to {got}"))
            }
            Check::Ising { matrix, y } => {
                let m = crate::input::matrix(matrix).map_err(|e| e.to_string())?;
                let r = ising_reduction(&m, y).map_err(|e| e.to_string())?;
                let z = partition_function(&r.instance, &r.env).map_err(|e| e.to_string())?;
                let want = ising_partition_function(&m, y);
                let got = &r.scale * z;
                ensure(got == want, || {
                    format!("matrix {matrix}, y = {y}: scale * Z = {got}, Ising sum = {want}")
                })
            }
            Check::Flatten { outer, inner, env } => {
                let flat = flatten(outer, "G", inner).map_err(|e| e.to_string())?;
                let a = evaluate(outer, env).map_err(|e| e.to_string())?;
                let b = evaluate(&flat, env).map_err(|e| e.to_string())?;
                ensure(a == b, || format!("outer gives {a}, flattened gives {b}"))
            }
            Check::Mobius(f) => {
                let m = mobius(f).map_err(|e| e.to_string())?;
                let back = inverse_mobius(&m).map_err(|e| e.to_string())?;
                ensure(&back == f, || format!("round trip gives {back}"))
            }
            Check::Fourier(f) => {
                let back = fourier(f).inverse().map_err(|e| e.to_string())?;
                ensure(&back == f, || format!("round trip gives {back}"))
            }
        }
    }
}

/// Every table of arity `n` with entries from `grid`, in base-|grid| order.
fn grid_tables(n: usize, grid: &[Rational]) -> impl Iterator<Item = FnTable> + '_ {
    let len = 1usize << n;
    let count = grid.len().pow(len as u32);
    (0..count).map(move |code| {
        let mut c = code;
        FnTable::from_fn(n, |_| {
            let v = grid[c % grid.len()].clone();
            c /= grid.len();
            v
        })
    })
}

fn grid_size(n: usize, k: usize) -> Option<usize> {
    k.checked_pow(u32::try_from(1usize << n).ok()?)
}

/// Rejection sampling with a bound on attempts.
fn sample_until<T>(
    rng: &mut ChaCha8Rng,
    what: &str,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> T,
    accept: impl Fn(&T) -> bool,
) -> Result<T> {
    for _ in 0..100_000 {
        let t = draw(rng);
        if accept(&t) {
            return Ok(t);
        }
    }
    bail!("could not sample {what}; try a smaller --n")
}

fn random_lsm3(rng: &mut ChaCha8Rng) -> Result<FnTable> {
    if rng.gen_bool(0.3) {
        let grid = [q(1, 1), q(2, 1), q(3, 1), q(4, 1)];
        return sample_until(
            rng,
            "an lsm table",
            |r| random::table_from_grid(r, 3, &grid),
            |f| is_lsm(f).is_member(),
        );
    }
    let mut f = pbf::ones(3);
    for y in 0..8usize {
        if rng.gen_bool(0.5) {
            let c = if y.count_ones() >= 2 {
                q(rng.gen_range(1..=4), 1)
            } else {
                random::positive_rational(rng, 5, 3)
            };
            f = f.mul_pointwise(&chi_table(3, y, &c))?;
        }
    }
    Ok(if rng.gen_bool(0.5) { f.bar() } else { f })
}

fn matrix_text(m: &fclone_core::gadgets::Gf2Matrix) -> String {
    m.rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn flatten_case(rng: &mut ChaCha8Rng, n: usize) -> Result<Case> {
    let (mut outer, mut env) = random::formula(
        rng,
        FormulaShape {
            free: n.min(3),
            bound: 3,
            atoms: 4,
            max_atom_arity: 2,
            zero_prob: 0.1,
        },
    );
    let (mut inner, inner_env) = random::formula(
        rng,
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
    for a in &mut inner.atoms {
        a.func = format!("H{}", a.func);
    }
    env.insert("G".into(), evaluate(&inner, &env)?);
    let vars: Vec<String> = outer.variables().cloned().collect();
    for _ in 0..2 {
        let a = vars[rng.gen_range(0..vars.len())].clone();
        let b = vars[rng.gen_range(0..vars.len())].clone();
        outer.atoms.push(Atom::from_strings("G", vec![a, b]));
    }
    let doc = Document {
        functions: env.clone().into_iter().collect(),
        formulas: vec![
            ("outer".into(), outer.clone()),
            ("inner".into(), inner.clone()),
        ],
        ..Document::default()
    };
    Ok(Case {
        doc,
        kind: Check::Flatten { outer, inner, env },
    })
}

/// Builds the cases for a lemma; `exhaustive` is set when they cover every input.
fn cases(
    lemma: Lemma,
    n: Option<usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Case>, bool)> {
    let arity = |default: usize, max: usize| -> Result<usize> {
        let n = n.unwrap_or(default);
        if n == 0 || n > max {
            bail!("--n must be between 1 and {max} for this lemma");
        }
        Ok(n)
    };
    let mut out = Vec::with_capacity(trials);
    match lemma {
        Lemma::Topkis => {
            let n = arity(3, 10)?;
            for grid in [vec![q(1, 1), q(2, 1), q(3, 1)], vec![q(1, 1), q(2, 1)]] {
                if grid_size(n, grid.len()).is_some_and(|s| s <= EXHAUSTIVE_LIMIT) {
                    let all = grid_tables(n, &grid)
                        .map(|f| Case::tables(&[&f], Check::Topkis(f.clone())))
                        .collect();
                    return Ok((all, true));
                }
            }
            for _ in 0..trials {
                let f = random::permissive_table(rng, n);
                out.push(Case::tables(&[&f], Check::Topkis(f.clone())));
            }
        }
        Lemma::Lsm4Counterexample => unreachable!("handled without cases"),
        Lemma::Convolution => {
            let n = arity(4, 10)?;
            for _ in 0..trials {
                let (f, g) = (random::table(rng, n, 0.2), random::table(rng, n, 0.2));
                out.push(Case::tables(
                    &[&f, &g],
                    Check::Convolution(f.clone(), g.clone()),
                ));
            }
        }
        Lemma::PClosure | Lemma::CClosure => {
            let n = arity(3, 6)?;
            let is_c = lemma == Lemma::CClosure;
            let member = |f: &FnTable| {
                if is_c {
                    in_class_c(f).is_member()
                } else {
                    in_class_p(f).is_member()
                }
            };
            for _ in 0..trials {
                let f = sample_until(rng, "a class member", |r| random::table(r, n, 0.2), member)?;
                let g = sample_until(rng, "a class member", |r| random::table(r, n, 0.2), member)?;
                let i = rng.gen_range(0..n);
                let kind = if is_c {
                    Check::CClosure(f.clone(), g.clone(), i)
                } else {
                    Check::PClosure(f.clone(), g.clone(), i)
                };
                out.push(Case::tables(&[&f, &g], kind));
            }
        }
        Lemma::Lsm3 => {
            for _ in 0..trials {
                let f = random_lsm3(rng)?;
                out.push(Case::tables(&[&f], Check::Lsm3(f.clone())));
            }
        }
        Lemma::Ising => {
            let n = arity(4, 8)?;
            for _ in 0..trials {
                let rows = rng.gen_range(1..=n);
                let cols = rng.gen_range(1..=n + 1);
                let m = random::gf2_matrix(rng, rows, cols);
                let y = Rational::one() + random::positive_rational(rng, 7, 3);
                let r = ising_reduction(&m, &y)?;
                let doc = Document {
                    functions: r.env.clone().into_iter().collect(),
                    instances: vec![("reduced".into(), r.instance.clone())],
                    ..Document::default()
                };
                out.push(Case {
                    doc,
                    kind: Check::Ising {
                        matrix: matrix_text(&m),
                        y,
                    },
                });
            }
        }
        Lemma::Flatten => {
            let n = arity(2, 3)?;
            for _ in 0..trials {
                out.push(flatten_case(rng, n)?);
            }
        }
        Lemma::Mobius => {
            let n = arity(4, 10)?;
            for _ in 0..trials {
                let f = random::permissive_table(rng, n);
                out.push(Case::tables(&[&f], Check::Mobius(f.clone())));
            }
        }
        Lemma::Fourier => {
            let n = arity(4, 10)?;
            for _ in 0..trials {
                let f = random::table(rng, n, 0.2);
                out.push(Case::tables(&[&f], Check::Fourier(f.clone())));
            }
        }
    }
    Ok((out, false))
}

/// The arity-4 function equal to 4 on the top point, 2 one step below it and
/// 1 elsewhere: lsm and permissive, yet `F*` has a negative coefficient.
fn lsm4_counterexample(g: &Global) -> Result<Outcome> {
    let f = FnTable::from_fn(4, |m| match m.count_ones() {
        4 => q(4, 1),
        3 => q(2, 1),
        _ => q(1, 1),
    });
    let lsm = is_lsm(&f).is_member();
    let coeff = fourier(&f.star()).get(0b1111).clone();
    let passed = lsm && f.is_permissive() && coeff.is_negative();
    let doc = functions(&[&f]);
    let output = if g.json {
        json_string(&json!({
            "lemma": "lsm4-counterexample",
            "passed": passed,
            "lsm": lsm,
            "coefficient": g.render(&coeff),
            "function": doc.to_string(),
        }))?
    } else {
        format!(
            "lemma: lsm4-counterexample\n{doc}lsm: {lsm}\nFourier coefficient of F* at 1111: {}\n{}\n",
            g.render(&coeff),
            if passed { "PASS" } else { "FAIL" }
        )
    };
    Ok(Outcome { output, passed })
}

pub fn run(args: &VerifyArgs, g: &Global) -> Result<Outcome> {
    if args.lemma == Lemma::Lsm4Counterexample {
        return lsm4_counterexample(g);
    }
    let name = args
        .lemma
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    let trials = args.trials.unwrap_or(200);
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let (cases, exhaustive) = cases(args.lemma, args.n, trials, &mut rng)?;
    report(&name, &cases, exhaustive, g)
}

fn report(name: &str, cases: &[Case], exhaustive: bool, g: &Global) -> Result<Outcome> {
    // Checks run in parallel; the reported failure is the first in generation order.
    let failure = cases
        .par_iter()
        .enumerate()
        .filter_map(|(i, c)| c.check().err().map(|e| (i, e)))
        .min_by_key(|(i, _)| *i);
    let mode = if exhaustive { "exhaustive" } else { "sampled" };
    let passed = failure.is_none();
    let output = if g.json {
        let fail = failure.as_ref().map(
            |(i, e)| json!({ "case": i, "reason": e, "counterexample": cases[*i].doc.to_string() }),
        );
        json_string(&json!({
            "lemma": name,
            "seed": g.seed,
            "cases": cases.len(),
            "mode": mode,
            "passed": passed,
            "failure": fail,
        }))?
    } else {
        let mut s = format!(
            "lemma: {name}\nseed: {}\ncases: {} ({mode})\n",
            g.seed,
            cases.len()
        );
        match &failure {
            None => s.push_str("PASS\n"),
            Some((i, e)) => {
                s.push_str(&format!(
                    "FAIL at case {i}: {e}\n# counterexample\n{}",
                    cases[*i].doc
                ));
            }
        }
        s
    };
    Ok(Outcome { output, passed })
}
