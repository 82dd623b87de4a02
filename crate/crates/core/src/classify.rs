//! The approximation-complexity trichotomy for finite languages of
//! nonnegative functions, with checkable witnesses.
//!
//! A language whose members are all in product form (the clone of NEQ and
//! unary weights) admits an FPRAS. Otherwise a member that is not
//! log-supermodular makes the language as hard as #SAT; if every member is
//! log-supermodular, the language is #BIS-hard. These are claims under the
//! classification theorem, not computed reductions.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    is_lsm, product_form_test, relation_trichotomy, PairWitness, ProductFormCertificate,
    ProductFormFailure, RelationClass,
};
use crate::gadgets::classify_binary;
use crate::pbf::FnTable;
use crate::transforms::{in_class_c, in_class_p, ClassCWitness, ClassCheck, NegativeCoefficient};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class")]
pub enum ComplexityClass {
    /// One certificate per member, in order.
    #[serde(rename = "ProductForm_FPRAS")]
    ProductFormFpras {
        certificates: Vec<ProductFormCertificate>,
    },
    /// Every member is lsm; `index` is the first member not in product form.
    #[serde(rename = "BISHard")]
    BisHard {
        index: usize,
        failure: ProductFormFailure,
    },
    /// `index` is the first member that is not lsm.
    #[serde(rename = "SATHard")]
    SatHard { index: usize, witness: PairWitness },
}

impl ComplexityClass {
    pub fn label(&self) -> &'static str {
        match self {
            ComplexityClass::ProductFormFpras { .. } => "ProductForm_FPRAS",
            ComplexityClass::BisHard { .. } => "BISHard",
            ComplexityClass::SatHard { .. } => "SATHard",
        }
    }

    /// Re-checks the witnesses against `language`.
    pub fn verify(&self, language: &[FnTable]) -> bool {
        match self {
            ComplexityClass::ProductFormFpras { certificates } => {
                certificates.len() == language.len()
                    && certificates
                        .iter()
                        .zip(language)
                        .all(|(c, f)| c.reconstruct() == *f)
            }
            ComplexityClass::BisHard { index, .. } => {
                language.iter().all(|f| is_lsm(f).is_member())
                    && language
                        .get(*index)
                        .is_some_and(|f| product_form_test(f).is_err())
                    && language[..*index]
                        .iter()
                        .all(|f| product_form_test(f).is_ok())
            }
            ComplexityClass::SatHard { index, witness } => language.get(*index).is_some_and(|f| {
                let (x, y) = (witness.x, witness.y);
                f.get(x) * f.get(y) > f.get(x & y) * f.get(x | y)
            }),
        }
    }
}

/// Classifies `language`. The empty language is vacuously in product form.
pub fn classify_language(language: &[FnTable]) -> ComplexityClass {
    let tests: Vec<_> = language.par_iter().map(product_form_test).collect();
    if tests.iter().all(Result::is_ok) {
        let certificates = tests.into_iter().map(Result::unwrap).collect();
        return ComplexityClass::ProductFormFpras { certificates };
    }
    for (index, f) in language.iter().enumerate() {
        if let ClassCheck::NotMember(witness) = is_lsm(f) {
            return ComplexityClass::SatHard { index, witness };
        }
    }
    let (index, failure) = tests
        .into_iter()
        .enumerate()
        .find_map(|(i, t)| t.err().map(|e| (i, e)))
        .expect("some member failed");
    ComplexityClass::BisHard { index, failure }
}

/// One result with the statements it rests on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding<T> {
    pub value: T,
    pub basis: Vec<&'static str>,
}

fn finding<T>(value: T, basis: &[&'static str]) -> Finding<T> {
    Finding {
        value,
        basis: basis.to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionReport {
    pub index: usize,
    pub arity: usize,
    pub lsm: Finding<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lsm_witness: Option<PairWitness>,
    #[serde(rename = "productForm")]
    pub product_form: Finding<bool>,
    #[serde(rename = "inP")]
    pub in_p: Finding<bool>,
    #[serde(rename = "inP_witness", skip_serializing_if = "Option::is_none")]
    pub in_p_witness: Option<NegativeCoefficient>,
    #[serde(rename = "inC")]
    pub in_c: Finding<bool>,
    #[serde(rename = "inC_witness", skip_serializing_if = "Option::is_none")]
    pub in_c_witness: Option<ClassCWitness>,
    #[serde(rename = "binaryCase", skip_serializing_if = "Option::is_none")]
    pub binary_case: Option<Finding<&'static str>>,
    #[serde(rename = "relationClass", skip_serializing_if = "Option::is_none")]
    pub relation_class: Option<Finding<RelationClass>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageReport {
    pub functions: Vec<FunctionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Finding<ComplexityClass>>,
    pub notes: Vec<&'static str>,
}

pub fn function_report(index: usize, f: &FnTable) -> FunctionReport {
    let lsm = is_lsm(f);
    let p = in_class_p(f);
    let c = in_class_c(f);
    let binary_case = (f.arity() == 2)
        .then(|| classify_binary(f).ok())
        .flatten()
        .map(|b| finding(b.label(), &["binary case analysis under transposition"]));
    let relation_class = (f.is_relation() && !f.is_all_zero())
        .then(|| relation_trichotomy(f).ok())
        .flatten()
        .map(|r| finding(r, &["affine check", "pairwise projections"]));
    FunctionReport {
        index,
        arity: f.arity(),
        lsm: finding(lsm.is_member(), &["F(x)F(y) <= F(x and y)F(x or y)"]),
        lsm_witness: lsm.witness().copied(),
        product_form: finding(
            product_form_test(f).is_ok(),
            &["clone of NEQ and unary weights"],
        ),
        in_p: finding(p.is_member(), &["nonnegative Fourier coefficients"]),
        in_p_witness: p.witness().cloned(),
        in_c: finding(c.is_member(), &["star of every pinning of arity >= 2 in P"]),
        in_c_witness: c.witness().cloned(),
        binary_case,
        relation_class,
    }
}

/// Per-function analyses plus the language classification (absent for the
/// empty language).
pub fn witness_report(language: &[FnTable]) -> LanguageReport {
    let functions = language
        .par_iter()
        .enumerate()
        .map(|(i, f)| function_report(i, f))
        .collect();
    let classification = (!language.is_empty()).then(|| {
        finding(
            classify_language(language),
            &["classification trichotomy for weighted Boolean #CSP with unary weights"],
        )
    });
    let notes = if language.is_empty() {
        Vec::new()
    } else {
        vec![
            "complexity labels are claims under the classification theorem; no reduction is run",
            "the theorem allows some finite set of unary weights, which is not synthesised here",
        ]
    };
    LanguageReport {
        functions,
        classification,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbf;
    use crate::value::q;

    #[test]
    fn examples() {
        let c = classify_language(&[pbf::eq_weighted()]);
        assert_eq!(c.label(), "BISHard");
        assert!(c.verify(&[pbf::eq_weighted()]));
        let anti = FnTable::from_matrix([[q(1, 2), q(1, 1)], [q(1, 1), q(1, 2)]]);
        let c = classify_language(std::slice::from_ref(&anti));
        assert_eq!(c.label(), "SATHard");
        assert!(c.verify(&[anti]));
        let lang = vec![pbf::neq(), FnTable::unary(q(2, 1), q(3, 1))];
        let c = classify_language(&lang);
        assert_eq!(c.label(), "ProductForm_FPRAS");
        assert!(c.verify(&lang));
    }

    #[test]
    fn report_fields() {
        let r = witness_report(&[pbf::imp()]);
        let f = &r.functions[0];
        assert!(f.lsm.value);
        assert!(!f.product_form.value);
        assert!(!f.in_p.value);
        assert!(!witness_report(&[pbf::xor3()]).functions[0].lsm.value);
        let empty = witness_report(&[]);
        assert!(empty.functions.is_empty() && empty.classification.is_none());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["functions"][0]["inP"]["value"], false);
    }
}
