//! The Ising partition function of a binary matrix as a weighted parity
//! instance over `⊕₃` and one unary weight.

use serde::Serialize;

use super::GadgetError;
use crate::formula::{Atom, CspInstance, Env};
use crate::pbf::{self, FnTable};
use crate::value::Rational;

/// A dense matrix over GF(2). Rows are spins, columns are edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gf2Matrix {
    rows: Vec<Vec<bool>>,
    cols: usize,
}

impl Gf2Matrix {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self, GadgetError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(GadgetError::InvalidParameter("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(GadgetError::InvalidParameter(
                "rows have different lengths".into(),
            ));
        }
        Ok(Gf2Matrix { rows, cols })
    }

    pub fn from_ints(rows: &[&[u8]]) -> Result<Self, GadgetError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&b| b != 0).collect())
                .collect(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }
}

/// `Σ_σ Π_e y^{1 ⊕ δ_e(σ)}` with `δ_e(σ) = ⊕_i M[i][e] σ(i)`, by enumeration.
pub fn ising_partition_function(m: &Gf2Matrix, y: &Rational) -> Rational {
    assert!(m.n_rows() < 31, "too many rows to enumerate");
    (0..1usize << m.n_rows())
        .map(|sigma| {
            let agree = (0..m.n_cols())
                .filter(|&e| {
                    (0..m.n_rows())
                        .filter(|&i| m.get(i, e) && sigma >> i & 1 == 1)
                        .count()
                        % 2
                        == 0
                })
                .count();
            y.pow(agree as i64)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsingReduction {
    pub instance: CspInstance,
    #[serde(skip)]
    pub env: Env,
    /// `(y − 1) / (y + 1)`.
    pub w: Rational,
    /// `Z_Ising = scale · Z(instance)`.
    pub scale: Rational,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

/// Builds an instance whose partition function is the weighted cycle-space
/// sum `Σ_A w^{|A|}`, over column subsets `A` meeting every row evenly.
pub fn ising_reduction(m: &Gf2Matrix, y: &Rational) -> Result<IsingReduction, GadgetError> {
    let one = Rational::one();
    if *y <= one {
        return Err(GadgetError::InvalidParameter(format!(
            "y = {y} must exceed 1"
        )));
    }
    let w = (y - &one) / (y + &one);
    let cols = m.n_cols();

    // Rows of width two identify their columns.
    let mut parent: Vec<usize> = (0..cols).collect();
    for row in m.rows() {
        let ones: Vec<usize> = (0..cols).filter(|&c| row[c]).collect();
        if let [a, b] = ones[..] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let var = |parent: &mut Vec<usize>, c: usize| format!("e{}", find(parent, c));

    let mut variables: Vec<String> = Vec::new();
    for c in 0..cols {
        if find(&mut parent, c) == c {
            variables.push(format!("e{c}"));
        }
    }
    let mut atoms: Vec<Atom> = (0..cols)
        .map(|c| Atom::from_strings("Uw", vec![var(&mut parent, c)]))
        .collect();
    let mut aux = 0usize;
    for row in m.rows() {
        let ones: Vec<String> = (0..cols)
            .filter(|&c| row[c])
            .map(|c| var(&mut parent, c))
            .collect();
        match ones.len() {
            0 | 2 => {}
            1 => atoms.push(Atom::from_strings("XOR3", vec![ones[0].clone(); 3])),
            t => {
                let mut acc = ones[0].clone();
                for v in &ones[1..t - 2] {
                    let a = format!("p{aux}");
                    aux += 1;
                    variables.push(a.clone());
                    atoms.push(Atom::from_strings("XOR3", vec![acc, v.clone(), a.clone()]));
                    acc = a;
                }
                atoms.push(Atom::from_strings(
                    "XOR3",
                    vec![acc, ones[t - 2].clone(), ones[t - 1].clone()],
                ));
            }
        }
    }

    let mut env = Env::new();
    env.insert("XOR3".into(), pbf::xor3());
    env.insert("Uw".into(), FnTable::unary(one.clone(), w.clone()));
    let scale =
        ((y + &one) / Rational::from(2)).pow(cols as i64) * Rational::pow2(m.n_rows() as i64);
    Ok(IsingReduction {
        instance: CspInstance { variables, atoms },
        env,
        w,
        scale,
    })
}
