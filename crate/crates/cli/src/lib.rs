//! The `fclone` command-line tool.
//!
//! Exit codes: 0 when the command succeeds or the checked property holds,
//! 1 when a property fails (a witness is printed), 2 on usage, parse or
//! evaluation errors.

pub mod analyze;
pub mod dsl;
pub mod eval;
pub mod input;
pub mod synth;
pub mod verify;
pub mod workspace;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fclone_core::formula::{EvalOptions, DEFAULT_INTERMEDIATE_CAP};
use fclone_core::Rational;

#[derive(Debug, Parser)]
#[command(
    name = "fclone",
    version,
    about = "Exact evaluation, analysis and synthesis of pps-formulas"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Print values as decimals with this many digits instead of exact rationals.
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    /// Largest intermediate table arity during elimination.
    #[arg(long, global = true, default_value_t = DEFAULT_INTERMEDIATE_CAP)]
    pub arity_cap: usize,
    /// Seed for randomised checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (the output does not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl Global {
    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            intermediate_cap: self.arity_cap,
            ..EvalOptions::default()
        }
    }

    pub fn render(&self, v: &Rational) -> String {
        match self.precision {
            Some(d) => v.to_decimal(d),
            None => v.to_string(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate formulas, instances and plans.
    Eval(eval::EvalArgs),
    /// Report the properties of each function in a file.
    Analyze(analyze::AnalyzeArgs),
    /// Classify the language made of every function in a directory or files.
    Classify(analyze::ClassifyArgs),
    /// Build a gadget and print it in the formula format.
    Synth(synth::SynthArgs),
    /// Run a randomised or exhaustive check of a structural identity.
    Verify(verify::VerifyArgs),
}

/// What a command printed and whether its property held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub passed: bool,
}

impl Outcome {
    pub fn pass(output: String) -> Self {
        Outcome {
            output,
            passed: true,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let go = || match &cli.command {
        Command::Eval(a) => eval::run(a, &cli.global),
        Command::Analyze(a) => analyze::run_analyze(a, &cli.global),
        Command::Classify(a) => analyze::run_classify(a, &cli.global),
        Command::Synth(a) => synth::run(a, &cli.global),
        Command::Verify(a) => verify::run(a, &cli.global),
    };
    match cli.global.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(go),
        None => go(),
    }
}

pub(crate) fn json_string<T: serde::Serialize>(v: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn files_or_dir(
    paths: &[PathBuf],
) -> Result<workspace::Workspace, workspace::LoadError> {
    match paths {
        [dir] if dir.is_dir() => workspace::Workspace::load_dir(dir),
        _ => workspace::Workspace::load(paths),
    }
}
