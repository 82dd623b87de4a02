use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use fclone_core::analysis::is_logmodular;
use fclone_core::classify::{function_report, witness_report};
use fclone_core::transforms::{fourier, mobius};
use fclone_core::FnTable;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::workspace::Workspace;
use crate::{files_or_dir, json_string, Global, Outcome};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Function files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Analyse only this function.
    #[arg(long)]
    pub function: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// A directory of function files, or the files themselves.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
}

fn values(g: &Global, vs: &[fclone_core::Rational]) -> Value {
    vs.iter().map(|v| Value::String(g.render(v))).collect()
}

fn analyze_one(g: &Global, index: usize, name: &str, f: &FnTable) -> Result<Value> {
    let mut report = serde_json::to_value(function_report(index, f))?;
    let obj = report.as_object_mut().expect("report is an object");
    let logmod = is_logmodular(f);
    obj.insert("name".into(), json!(name));
    obj.insert("values".into(), values(g, f.values()));
    obj.insert("permissive".into(), json!(f.is_permissive()));
    obj.insert("relation".into(), json!(f.is_relation()));
    obj.insert(
        "logModular".into(),
        json!({ "value": logmod.is_member(), "basis": ["F(x)F(y) = F(x and y)F(x or y)"] }),
    );
    if let Some(w) = logmod.witness() {
        obj.insert("logModular_witness".into(), serde_json::to_value(w)?);
    }
    obj.insert("fourier".into(), values(g, &fourier(f).coeffs));
    // The multiplicative Möbius transform needs strictly positive values.
    let m = mobius(f)
        .ok()
        .map(|m| values(g, &m.coeffs))
        .unwrap_or(Value::Null);
    obj.insert("mobius".into(), m);
    Ok(report)
}

pub fn run_analyze(args: &AnalyzeArgs, g: &Global) -> Result<Outcome> {
    let ws = Workspace::load(&args.files)?;
    let chosen: Vec<(usize, &str, &FnTable)> = match &args.function {
        Some(name) => {
            let i = ws
                .functions()
                .iter()
                .position(|f| &f.name == name)
                .with_context(|| format!("no function `{name}`"))?;
            vec![(i, name.as_str(), &ws.functions()[i].value)]
        }
        None => ws
            .functions()
            .iter()
            .enumerate()
            .map(|(i, f)| (i, f.name.as_str(), &f.value))
            .collect(),
    };
    if chosen.is_empty() {
        bail!("no functions to analyse");
    }
    let reports: Vec<Value> = chosen
        .par_iter()
        .map(|&(i, name, f)| analyze_one(g, i, name, f))
        .collect::<Result<_>>()?;
    Ok(Outcome::pass(json_string(
        &json!({ "functions": reports }),
    )?))
}

pub fn run_classify(args: &ClassifyArgs, _g: &Global) -> Result<Outcome> {
    let ws = files_or_dir(&args.paths)?;
    let names: Vec<&str> = ws.functions().iter().map(|f| f.name.as_str()).collect();
    let language: Vec<FnTable> = ws.functions().iter().map(|f| f.value.clone()).collect();
    let report = witness_report(&language);
    let verified = report
        .classification
        .as_ref()
        .is_none_or(|c| c.value.verify(&language));
    let mut value = serde_json::to_value(&report)?;
    let obj = value.as_object_mut().expect("report is an object");
    obj.insert("names".into(), json!(names));
    obj.insert("verified".into(), json!(verified));
    Ok(Outcome {
        output: json_string(&value)?,
        passed: verified,
    })
}
