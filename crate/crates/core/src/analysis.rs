//! Structural tests: log-supermodularity, log-modularity, product form and
//! the affine/IM2/ID1-style trichotomy for relations.

use serde::Serialize;

use crate::pbf::FnTable;
use crate::transforms::ClassCheck;
use crate::value::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("function is not permissive (zero at mask {0})")]
    NotPermissive(usize),
    #[error("table is not a 0/1 relation (value {value} at mask {mask})")]
    NotRelation { mask: usize, value: Rational },
    #[error("relation is empty")]
    EmptyRelation,
}

/// A pair of assignments (as masks) violating a lattice inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub x: usize,
    pub y: usize,
}

/// Pairs `x < y` that are incomparable, in lexicographic mask order.
fn incomparable_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    let len = 1usize << n;
    (0..len)
        .flat_map(move |x| (x + 1..len).map(move |y| (x, y)))
        .filter(|&(x, y)| {
            let m = x & y;
            m != x && m != y
        })
}

/// `F(x ∨ y) F(x ∧ y) ≥ F(x) F(y)` for all `x, y`.
pub fn is_lsm(f: &FnTable) -> ClassCheck<PairWitness> {
    for (x, y) in incomparable_pairs(f.arity()) {
        let fx = f.get(x);
        let fy = f.get(y);
        if fx.is_zero() || fy.is_zero() {
            continue;
        }
        if f.get(x | y) * f.get(x & y) < fx * fy {
            return ClassCheck::NotMember(PairWitness { x, y });
        }
    }
    ClassCheck::Member
}

/// `F(x ∨ y) F(x ∧ y) = F(x) F(y)` for all `x, y`.
pub fn is_logmodular(f: &FnTable) -> ClassCheck<PairWitness> {
    for (x, y) in incomparable_pairs(f.arity()) {
        if f.get(x | y) * f.get(x & y) != f.get(x) * f.get(y) {
            return ClassCheck::NotMember(PairWitness { x, y });
        }
    }
    ClassCheck::Member
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoPinWitness {
    pub i: usize,
    pub j: usize,
    pub pins: Vec<(usize, bool)>,
}

/// The local test on binary pinnings, valid for permissive functions:
/// `f00 f11 ≥ f01 f10` on every 2-pinning.
pub fn is_lsm_topkis(f: &FnTable) -> Result<ClassCheck<TwoPinWitness>, AnalysisError> {
    if let Some(m) = f.values().iter().position(|v| !v.is_positive()) {
        return Err(AnalysisError::NotPermissive(m));
    }
    if f.arity() < 2 {
        return Ok(ClassCheck::Member);
    }
    for p in f.two_pinnings().expect("arity at least 2") {
        let t = &p.table;
        if t.entry(0, 0) * t.entry(1, 1) < t.entry(0, 1) * t.entry(1, 0) {
            return Ok(ClassCheck::NotMember(TwoPinWitness {
                i: p.i,
                j: p.j,
                pins: p.pins.iter().collect(),
            }));
        }
    }
    Ok(ClassCheck::Member)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Eq,
    Neq,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkClass {
    pub representative: usize,
    /// Other members and how they relate to the representative.
    pub members: Vec<(usize, Polarity)>,
    /// Weight at 1 of the class's unary `U = (1, w)`.
    pub weight: Rational,
}

/// `F(x) = c · Π δ_{pin} · Π EQ/NEQ(x_i, x_rep) · Π U_rep(x_rep)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductFormCertificate {
    pub arity: usize,
    pub pins: Vec<(usize, bool)>,
    pub classes: Vec<LinkClass>,
    pub constant: Rational,
}

impl ProductFormCertificate {
    pub fn reconstruct(&self) -> FnTable {
        FnTable::from_fn(self.arity, |x| {
            if self.pins.iter().any(|&(p, c)| (x >> p & 1 == 1) != c) {
                return Rational::zero();
            }
            let mut v = self.constant.clone();
            for cl in &self.classes {
                let r = x >> cl.representative & 1;
                for &(i, pol) in &cl.members {
                    let xi = x >> i & 1;
                    if (pol == Polarity::Eq) != (xi == r) {
                        return Rational::zero();
                    }
                }
                if r == 1 {
                    v *= &cl.weight;
                }
            }
            v
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ProductFormFailure {
    /// The projection onto `(i, j)` is neither EQ, NEQ nor full.
    ProjectionShape {
        i: usize,
        j: usize,
        pairs: Vec<(u8, u8)>,
    },
    /// The support is smaller than the conjunction its projections imply.
    SupportMismatch { expected: usize, actual: usize },
    /// The weight on the support is not log-modular.
    NotLogModular { x: usize, y: usize },
}

/// Support structure: pinned coordinates and EQ/NEQ links between the rest.
struct SupportShape {
    pins: Vec<(usize, bool)>,
    /// For each coordinate: (representative, polarity) when unpinned.
    link: Vec<Option<(usize, Polarity)>>,
    reps: Vec<usize>,
}

fn support_shape(f: &FnTable, support: &[usize]) -> Result<SupportShape, ProductFormFailure> {
    let n = f.arity();
    let mut pins = Vec::new();
    let mut unpinned = Vec::new();
    for i in 0..n {
        let ones = support.iter().any(|&x| x >> i & 1 == 1);
        let zeros = support.iter().any(|&x| x >> i & 1 == 0);
        match (zeros, ones) {
            (true, true) => unpinned.push(i),
            (_, one) => pins.push((i, one)),
        }
    }
    let mut link: Vec<Option<(usize, Polarity)>> = vec![None; n];
    for &i in &unpinned {
        link[i] = Some((i, Polarity::Eq));
    }
    for (a, &i) in unpinned.iter().enumerate() {
        for &j in &unpinned[a + 1..] {
            let mut seen = [false; 4];
            for &x in support {
                seen[(x >> i & 1) | (x >> j & 1) << 1] = true;
            }
            let count = seen.iter().filter(|&&s| s).count();
            let pol = match (count, seen) {
                (4, _) => continue,
                (2, [true, false, false, true]) => Polarity::Eq,
                (2, [false, true, true, false]) => Polarity::Neq,
                _ => {
                    let pairs = (0..4)
                        .filter(|&k| seen[k])
                        .map(|k| ((k & 1) as u8, (k >> 1) as u8))
                        .collect();
                    return Err(ProductFormFailure::ProjectionShape { i, j, pairs });
                }
            };
            // `i < j` and i is visited first, so i's representative is final.
            if link[j].map(|(r, _)| r) == Some(j) {
                let (ri, pi) = link[i].unwrap();
                let composed = if pi == pol {
                    Polarity::Eq
                } else {
                    Polarity::Neq
                };
                link[j] = Some((ri, composed));
            }
        }
    }
    let reps = unpinned
        .iter()
        .copied()
        .filter(|&i| link[i].unwrap().0 == i)
        .collect();
    Ok(SupportShape { pins, link, reps })
}

/// Decides membership in the clone generated by NEQ and unary weights.
/// The identically zero function is in product form.
pub fn product_form_test(f: &FnTable) -> Result<ProductFormCertificate, ProductFormFailure> {
    let n = f.arity();
    let support: Vec<usize> = f.support().collect();
    if support.is_empty() {
        return Ok(ProductFormCertificate {
            arity: n,
            pins: Vec::new(),
            classes: Vec::new(),
            constant: Rational::zero(),
        });
    }
    let shape = support_shape(f, &support)?;
    let k = shape.reps.len();
    if support.len() != 1 << k {
        return Err(ProductFormFailure::SupportMismatch {
            expected: 1 << k,
            actual: support.len(),
        });
    }
    let lift = |z: usize| -> usize {
        let mut x = 0;
        for &(p, c) in &shape.pins {
            if c {
                x |= 1 << p;
            }
        }
        for i in 0..n {
            if let Some((r, pol)) = shape.link[i] {
                let rz = z >> shape.reps.iter().position(|&q| q == r).unwrap() & 1;
                let bit = if pol == Polarity::Eq { rz } else { rz ^ 1 };
                x |= bit << i;
            }
        }
        x
    };
    let g = FnTable::from_fn(k, |z| f.get(lift(z)).clone());
    let constant = g.get(0).clone();
    let weights: Vec<Rational> = (0..k).map(|t| g.get(1 << t) / &constant).collect();
    for z in 0..1usize << k {
        let predicted: Rational = (0..k)
            .filter(|&t| z >> t & 1 == 1)
            .fold(constant.clone(), |acc, t| acc * &weights[t]);
        if &predicted != g.get(z) {
            let w = is_logmodular(&g)
                .witness()
                .copied()
                .expect("not log-modular");
            return Err(ProductFormFailure::NotLogModular {
                x: lift(w.x),
                y: lift(w.y),
            });
        }
    }
    let classes = shape
        .reps
        .iter()
        .zip(weights)
        .map(|(&r, weight)| LinkClass {
            representative: r,
            members: (0..n)
                .filter(|&i| i != r)
                .filter_map(|i| match shape.link[i] {
                    Some((q, pol)) if q == r => Some((i, pol)),
                    _ => None,
                })
                .collect(),
            weight,
        })
        .collect();
    Ok(ProductFormCertificate {
        arity: n,
        pins: shape.pins,
        classes,
        constant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AffineViolation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// `a ⊕ b ⊕ c`, which lies outside the relation.
    pub xor: usize,
}

fn check_relation(r: &FnTable) -> Result<(), AnalysisError> {
    match r.values().iter().position(|v| !(v.is_zero() || v.is_one())) {
        None => Ok(()),
        Some(mask) => Err(AnalysisError::NotRelation {
            mask,
            value: r.get(mask).clone(),
        }),
    }
}

/// `R` is affine iff `a ⊕ b ⊕ c ∈ R` for all `a, b, c ∈ R`.
pub fn is_affine_relation(r: &FnTable) -> Result<ClassCheck<AffineViolation>, AnalysisError> {
    check_relation(r)?;
    let tuples: Vec<usize> = r.support().collect();
    if tuples.len() <= 2 {
        return Ok(ClassCheck::Member);
    }
    // Affine iff the translate by one tuple spans exactly |R| vectors.
    let a0 = tuples[0];
    let mut basis: Vec<usize> = Vec::new();
    for &t in &tuples {
        let mut v = t ^ a0;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    if tuples.len() == 1 << basis.len() {
        return Ok(ClassCheck::Member);
    }
    for (ia, &a) in tuples.iter().enumerate() {
        for (ib, &b) in tuples.iter().enumerate().skip(ia + 1) {
            for &c in &tuples[ib + 1..] {
                let x = a ^ b ^ c;
                if r.get(x).is_zero() {
                    return Ok(ClassCheck::NotMember(AffineViolation { a, b, c, xor: x }));
                }
            }
        }
    }
    unreachable!("span larger than relation implies a violating triple")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum RelationClass {
    NonAffine {
        witness: AffineViolation,
    },
    /// Equal to the conjunction of its pins and EQ/NEQ projections.
    WithinId1,
    /// Affine but not captured by binary projections; `witness` satisfies
    /// the projections yet lies outside the relation.
    AffineIl2 {
        witness: usize,
    },
}

pub fn relation_trichotomy(r: &FnTable) -> Result<RelationClass, AnalysisError> {
    check_relation(r)?;
    let support: Vec<usize> = r.support().collect();
    if support.is_empty() {
        return Err(AnalysisError::EmptyRelation);
    }
    if let ClassCheck::NotMember(witness) = is_affine_relation(r)? {
        return Ok(RelationClass::NonAffine { witness });
    }
    // Affine relations have only EQ, NEQ or full pairwise projections.
    let shape = support_shape(r, &support).expect("affine projections");
    let satisfies = |x: usize| {
        shape.pins.iter().all(|&(p, c)| (x >> p & 1 == 1) == c)
            && (0..r.arity()).all(|i| match shape.link[i] {
                None => true,
                Some((q, pol)) => ((x >> i & 1) == (x >> q & 1)) == (pol == Polarity::Eq),
            })
    };
    match (0..r.len()).find(|&x| satisfies(x) && r.get(x).is_zero()) {
        None => Ok(RelationClass::WithinId1),
        Some(witness) => Ok(RelationClass::AffineIl2 { witness }),
    }
}
