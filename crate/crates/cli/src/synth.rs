use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use fclone_core::formula::{merge_env, rename_functions, Atom, CspInstance, Env, Implementation};
use fclone_core::gadgets::{
    binary_witness, chi_builder, chi_table, ising_reduction, lsm3_decompose, or_universal,
    synth_unary, GadgetPlan, SynthRoute,
};
use fclone_core::pbf::bits_to_mask;
use fclone_core::{FnTable, Rational};
use serde_json::{json, Value};

use crate::dsl::Document;
use crate::workspace::Workspace;
use crate::{input, json_string, Global, Outcome};

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub kind: Kind,
    /// Write the formula file here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Where a target function comes from.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Values in index order, e.g. "0 1 2 4".
    #[arg(long, conflicts_with = "file")]
    pub table: Option<String>,
    /// A function file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Function to take from `--file` (needed when it defines several).
    #[arg(long, requires = "file")]
    pub function: Option<String>,
}

impl Source {
    fn load(&self) -> Result<FnTable> {
        if let Some(t) = &self.table {
            return input::table(t);
        }
        let Some(path) = &self.file else {
            bail!("give the target with --table or --file")
        };
        let ws = Workspace::load(std::slice::from_ref(path))?;
        match (&self.function, ws.functions()) {
            (Some(name), _) => ws
                .function(name)
                .cloned()
                .with_context(|| format!("no function `{name}`")),
            (None, [only]) => Ok(only.value.clone()),
            (None, fs) => bail!(
                "{} defines {} functions; choose one with --function",
                path.display(),
                fs.len()
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Route {
    Imp,
    Or,
    Nand,
}

#[derive(Debug, Subcommand)]
pub enum Kind {
    /// Two exact stages and the limit plan for any nonnegative function.
    OrUniversal(Source),
    /// The weight that multiplies by `c` exactly on inputs above `y0`.
    Chi {
        /// Threshold point as a bit string `x1 x2 …`.
        #[arg(long)]
        y0: String,
        #[arg(long, value_parser = input::rational)]
        c: Rational,
        /// Use the complemented construction.
        #[arg(long)]
        reversed: bool,
    },
    /// The cycle-space instance for the Ising model on a GF(2) matrix.
    Ising {
        /// Rows separated by `;`, e.g. "11;11".
        #[arg(long)]
        matrix: String,
        #[arg(long, value_parser = input::rational)]
        y: Rational,
    },
    /// Plans between a binary function and its canonical relation.
    Binary(Source),
    /// Product-of-weights formula for a permissive lsm arity-3 function.
    Lsm3(Source),
    /// A unary weight from a relation and dyadic constants.
    Unary {
        #[arg(long, value_parser = input::rational)]
        g0: Rational,
        #[arg(long, value_parser = input::rational)]
        g1: Rational,
        #[arg(long, value_enum)]
        route: Route,
        /// Largest power of two allowed in the denominators.
        #[arg(long, default_value_t = 8)]
        bits: u32,
    },
}

/// Collects items into one document, renaming tables whose names clash.
#[derive(Default)]
struct Builder {
    env: Env,
    doc: Document,
}

impl Builder {
    fn merge(&mut self, env: &Env) -> BTreeMap<String, String> {
        merge_env(&mut self.env, env)
    }

    fn formula(&mut self, name: &str, imp: &Implementation) {
        let map = self.merge(&imp.env);
        let mut f = imp.formula.clone();
        rename_functions(&mut f, &map);
        self.doc.formulas.push((name.into(), f));
    }

    fn instance(&mut self, name: &str, inst: &CspInstance, env: &Env) {
        let map = self.merge(env);
        let mut inst = inst.clone();
        rename(&mut inst.atoms, &map);
        self.doc.instances.push((name.into(), inst));
    }

    fn plan(&mut self, name: &str, plan: &GadgetPlan) {
        let map = self.merge(&plan.env);
        let mut p = plan.clone();
        p.env = Env::new();
        rename(&mut p.atoms, &map);
        for g in &mut p.repeated {
            rename(&mut g.atoms, &map);
        }
        self.doc.plans.push((name.into(), p));
    }

    fn finish(mut self) -> Document {
        self.doc.functions = self.env.into_iter().collect();
        self.doc
    }
}

fn rename(atoms: &mut [Atom], map: &BTreeMap<String, String>) {
    for a in atoms {
        if let Some(n) = map.get(&a.func) {
            a.func = n.clone();
        }
    }
}

fn values(g: &Global, t: &FnTable) -> Value {
    t.values()
        .iter()
        .map(|v| Value::String(g.render(v)))
        .collect()
}

pub fn run(args: &SynthArgs, g: &Global) -> Result<Outcome> {
    let mut b = Builder::default();
    let details = match &args.kind {
        Kind::OrUniversal(src) => {
            let f = src.load()?;
            let u = or_universal(&f)?;
            b.formula("stage1", &u.psi1);
            b.formula("stage2", &u.psi2);
            b.plan("or_universal", &u.plan);
            json!({
                "kind": "or-universal",
                "mu": g.render(&u.mu),
                "stage1": values(g, &u.expected_psi1()),
                "stage2": values(g, &u.expected_psi2()),
            })
        }
        Kind::Chi { y0, c, reversed } => {
            let bits = input::bits(y0)?;
            if bits.is_empty() {
                bail!("--y0 needs at least one bit");
            }
            let (n, mask) = (bits.len(), bits_to_mask(&bits));
            let imp = chi_builder(n, mask, c, *reversed)?;
            let target = if *reversed {
                chi_table(n, mask, c).bar()
            } else {
                chi_table(n, mask, c)
            };
            b.plan("chi", &GadgetPlan::exact("chi", target.clone(), imp));
            json!({ "kind": "chi", "table": values(g, &target) })
        }
        Kind::Ising { matrix, y } => {
            let m = input::matrix(matrix)?;
            let r = ising_reduction(&m, y)?;
            b.instance("reduced", &r.instance, &r.env);
            // The same instance with the scale folded in as a nullary factor.
            let mut scaled = r.instance.clone();
            scaled.atoms.insert(0, Atom::new("Scale", &[]));
            let mut env = r.env.clone();
            env.insert("Scale".into(), FnTable::nullary(r.scale.clone()));
            b.instance("ising", &scaled, &env);
            json!({ "kind": "ising", "w": g.render(&r.w), "scale": g.render(&r.scale) })
        }
        Kind::Binary(src) => {
            let f = src.load()?;
            let w = binary_witness(&f)?;
            b.plan("forward", &w.forward);
            b.plan("backward", &w.backward);
            json!({ "kind": "binary", "case": w.classification.label(), "canonical": w.canonical })
        }
        Kind::Lsm3(src) => {
            let f = src.load()?;
            let d = lsm3_decompose(&f)?;
            b.plan("lsm3", &GadgetPlan::exact("lsm3", f, d.implementation()?));
            json!({ "kind": "lsm3", "complemented": d.complemented, "factors": d.factors })
        }
        Kind::Unary {
            g0,
            g1,
            route,
            bits,
        } => {
            let route = match route {
                Route::Imp => SynthRoute::Imp,
                Route::Or => SynthRoute::Or,
                Route::Nand => SynthRoute::Nand,
            };
            let imp = synth_unary(g0, g1, route, *bits)?;
            let target = FnTable::unary(g0.clone(), g1.clone());
            b.plan("unary", &GadgetPlan::exact("unary", target, imp));
            json!({ "kind": "unary", "route": route })
        }
    };
    let doc = b.finish();
    let text = doc.to_string();
    if let Some(path) = &args.out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    let output = match (g.json, &args.out) {
        (true, _) => {
            let mut d = details;
            d["document"] = json!(text);
            json_string(&d)?
        }
        (false, Some(_)) => String::new(),
        (false, None) => text,
    };
    Ok(Outcome::pass(output))
}
