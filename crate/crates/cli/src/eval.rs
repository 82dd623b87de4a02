use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use fclone_core::formula::{evaluate_with, partition_function_with};
use fclone_core::gadgets::GadgetError;
use fclone_core::{FnTable, Rational};
use serde::Serialize;

use crate::workspace::{Target, Workspace};
use crate::{input, json_string, Global, Outcome};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Files holding the target and every function it uses.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Evaluate only this formula, instance or plan.
    #[arg(long)]
    pub target: Option<String>,
    /// Repetitions for plans.
    #[arg(long, conflicts_with = "eps")]
    pub reps: Option<u64>,
    /// Tolerance for plans; picks the repetition count from the schedule.
    #[arg(long, value_parser = input::rational)]
    pub eps: Option<Rational>,
}

#[derive(Serialize)]
struct Evaluated {
    name: String,
    kind: &'static str,
    arity: usize,
    values: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    repetitions: Option<u64>,
    /// Sup-norm distance from the plan's target.
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn run(args: &EvalArgs, g: &Global) -> Result<Outcome> {
    let ws = Workspace::load(&args.files)?;
    let env = ws.env();
    let opts = g.eval_options();
    let selected: Vec<_> = match &args.target {
        Some(name) => vec![ws
            .target(name)
            .with_context(|| format!("no formula, instance or plan named `{name}`"))?],
        None => ws.targets.iter().collect(),
    };
    if selected.is_empty() {
        bail!("nothing to evaluate: the files declare no formula, instance or plan");
    }

    let mut results = Vec::new();
    for item in selected {
        let ctx = || format!("evaluating `{}`", item.name);
        let (kind, table, repetitions, error) = match &item.value {
            Target::Formula(f) => (
                "formula",
                evaluate_with(f, &env, &opts).with_context(ctx)?,
                None,
                None,
            ),
            Target::Instance(i) => {
                let z = partition_function_with(i, &env, &opts).with_context(ctx)?;
                ("instance", FnTable::nullary(z), None, None)
            }
            Target::Plan(p) => {
                let k = match (args.reps, &args.eps) {
                    (Some(k), _) => k,
                    (None, Some(eps)) => p.repetitions(eps).with_context(ctx)?,
                    (None, None) => 1,
                };
                let t = evaluate_with(&p.instantiate(k).formula, &env, &opts).with_context(ctx)?;
                let err = t
                    .max_abs_diff(&p.target)
                    .map_err(GadgetError::from)
                    .with_context(ctx)?;
                ("plan", t, Some(k), Some(err))
            }
        };
        results.push(Evaluated {
            name: item.name.clone(),
            kind,
            arity: table.arity(),
            values: table.values().iter().map(|v| g.render(v)).collect(),
            repetitions,
            error: error.map(|e| g.render(&e)),
        });
    }

    if g.json {
        return Ok(Outcome::pass(json_string(&results)?));
    }
    let single = results.len() == 1;
    let mut out = String::new();
    for r in &results {
        if !single {
            out.push_str(&r.name);
            out.push_str(": ");
        }
        out.push_str(&r.values.join(" "));
        out.push('\n');
    }
    Ok(Outcome::pass(out))
}
