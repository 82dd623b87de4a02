//! Text format for function tables, formulas, instances and gadget plans.
//!
//! ```text
//! # comments run to the end of the line
//! fn IMP arity 2
//! table 1 0 1 1
//!
//! formula H(x1, x2) := sum y1 y2 . IMP(y1, x1) * IMP(y1, x2) * IMP(x1, y2) * IMP(x2, y2)
//! instance path := IMP(a, b) * IMP(b, c)
//!
//! plan half(x) := Half() * IMP(x, z)
//!   label "example"
//!   repeat sum z . IMP(z, x)
//!   target 1 1/2
//!   schedule geometric coefficient 1 ratio 1/2 budget 1
//! ```
//!
//! Layout is free: tokens may be split across lines in any way. Statements
//! start with a keyword. A product is `1` (empty) or atoms joined by `*`.
//! An instance lists its variables in parentheses only when they differ from
//! the order of first appearance in its atoms.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use fclone_core::formula::{Atom, CspInstance, Env, PpsFormula};
use fclone_core::gadgets::{GadgetPlan, RepeatGroup, Schedule};
use fclone_core::pbf::DEFAULT_ARITY_CAP;
use fclone_core::{FnTable, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Everything declared in one file, in declaration order per kind.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub functions: Vec<(String, FnTable)>,
    pub formulas: Vec<(String, PpsFormula)>,
    pub instances: Vec<(String, CspInstance)>,
    /// Plans with an empty `env`; tables are resolved by name.
    pub plans: Vec<(String, GadgetPlan)>,
}

impl Document {
    pub fn env(&self) -> Env {
        self.functions.iter().cloned().collect()
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(is_ident_char)
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '~' | '\'' | '′')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Star,
    Define,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Define => f.write_str("`:=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let at = |i: usize| chars.get(i).copied();
    while let Some(c) = at(i) {
        let (l, k) = (line, col);
        let err = |message: &str| ParseError {
            line: l,
            col: k,
            message: message.to_string(),
        };
        let start = i;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            _ if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while at(i).is_some_and(|c| c != '\n') {
                    i += 1;
                }
                continue;
            }
            '(' | ')' | ',' | '.' | '*' => {
                i += 1;
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    _ => Tok::Star,
                }
            }
            ':' if at(i + 1) == Some('=') => {
                i += 2;
                Tok::Define
            }
            ':' => return Err(err("expected `:=`")),
            '"' => {
                i += 1;
                let mut s = String::new();
                loop {
                    match at(i) {
                        Some('"') => break,
                        Some('\\') => match at(i + 1) {
                            Some(e @ ('"' | '\\')) => {
                                s.push(e);
                                i += 1;
                            }
                            _ => return Err(err("bad escape in string")),
                        },
                        Some('\n') | None => return Err(err("unterminated string")),
                        Some(c) => s.push(c),
                    }
                    i += 1;
                }
                i += 1;
                Tok::Str(s)
            }
            _ if c.is_ascii_digit() || c == '-' => {
                i += 1;
                while let Some(d) = at(i) {
                    // A dot belongs to the number only when a digit follows.
                    let dot = d == '.' && at(i + 1).is_some_and(|e| e.is_ascii_digit());
                    if !(d.is_ascii_digit() || d == '/' || dot) {
                        break;
                    }
                    i += 1;
                }
                Tok::Number(chars[start..i].iter().collect())
            }
            _ if c.is_alphabetic() || c == '_' => {
                while at(i).is_some_and(is_ident_char) {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            _ => return Err(err(&format!("unexpected character {c:?}"))),
        };
        col += i - start;
        out.push(Token {
            tok,
            line: l,
            col: k,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn next(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        if self.at_keyword(kw) {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{kw}`, found {}", self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.error_here(format!("expected {what}, found {other}"))),
        }
    }

    fn number<T: FromStr>(&mut self, what: &str) -> PResult<T> {
        match self.peek().clone() {
            Tok::Number(s) => s
                .parse()
                .map_err(|_| self.error_here(format!("invalid {what} `{s}`")))
                .inspect(|_| {
                    self.next();
                }),
            other => Err(self.error_here(format!("expected {what}, found {other}"))),
        }
    }

    fn rationals(&mut self) -> PResult<Vec<Rational>> {
        let mut values = Vec::new();
        while matches!(self.peek(), Tok::Number(_)) {
            values.push(self.number("rational")?);
        }
        Ok(values)
    }

    /// `(a, b, …)`, possibly empty.
    fn var_list(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LParen)?;
        let mut vars = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                vars.push(self.ident("variable")?);
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.next();
            }
        }
        self.expect(Tok::RParen)?;
        Ok(vars)
    }

    /// Optional `sum v… .` prefix.
    fn bound(&mut self) -> PResult<Vec<String>> {
        if !self.at_keyword("sum") {
            return Ok(Vec::new());
        }
        self.next();
        let mut vars = Vec::new();
        while *self.peek() != Tok::Dot {
            if *self.peek() == Tok::Comma {
                self.next();
                continue;
            }
            vars.push(self.ident("bound variable or `.`")?);
        }
        self.next();
        Ok(vars)
    }

    fn product(&mut self) -> PResult<Vec<Atom>> {
        if matches!(self.peek(), Tok::Number(s) if s == "1") {
            self.next();
            return Ok(Vec::new());
        }
        let mut atoms = Vec::new();
        loop {
            let func = self.ident("function name")?;
            let args = self.var_list()?;
            atoms.push(Atom::from_strings(func, args));
            if *self.peek() != Tok::Star {
                return Ok(atoms);
            }
            self.next();
        }
    }

    fn table(&mut self, arity: usize) -> PResult<FnTable> {
        let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
        let values = self.rationals()?;
        FnTable::new(arity, values).map_err(|e| ParseError {
            line,
            col,
            message: e.to_string(),
        })
    }

    fn schedule(&mut self) -> PResult<Schedule> {
        self.keyword("schedule")?;
        if self.at_keyword("exact") {
            self.next();
            return Ok(Schedule::Exact);
        }
        self.keyword("geometric")?;
        self.keyword("coefficient")?;
        let coefficient = self.number("rational")?;
        self.keyword("ratio")?;
        let ratio = self.number("rational")?;
        self.keyword("budget")?;
        let budget = self.number("rational")?;
        let cap = if self.at_keyword("cap") {
            self.next();
            Some(self.number("rational")?)
        } else {
            None
        };
        Ok(Schedule::Geometric {
            coefficient,
            ratio,
            budget,
            cap,
        })
    }

    fn plan(&mut self, name: &str) -> PResult<GadgetPlan> {
        let free = self.var_list()?;
        self.expect(Tok::Define)?;
        let bound = self.bound()?;
        let atoms = self.product()?;
        let mut label = name.to_string();
        if self.at_keyword("label") {
            self.next();
            match self.peek().clone() {
                Tok::Str(s) => {
                    self.next();
                    label = s;
                }
                other => {
                    return Err(self.error_here(format!("expected quoted label, found {other}")))
                }
            }
        }
        let mut repeated = Vec::new();
        while self.at_keyword("repeat") {
            self.next();
            let bound = self.bound()?;
            let atoms = self.product()?;
            repeated.push(RepeatGroup { bound, atoms });
        }
        self.keyword("target")?;
        let target = self.table(free.len())?;
        let schedule = self.schedule()?;
        Ok(GadgetPlan {
            label,
            target,
            free,
            bound,
            atoms,
            repeated,
            env: Env::new(),
            schedule,
        })
    }

    fn document(&mut self) -> PResult<Document> {
        let mut doc = Document::default();
        let mut names = std::collections::HashSet::new();
        loop {
            let start = self.pos;
            let kw = match self.peek().clone() {
                Tok::Eof => return Ok(doc),
                Tok::Ident(kw) => kw,
                other => {
                    return Err(self.error_here(format!("expected a declaration, found {other}")))
                }
            };
            self.next();
            let name = self.ident("name")?;
            match kw.as_str() {
                "fn" => {
                    self.keyword("arity")?;
                    let arity: usize = self.number("arity")?;
                    if arity > DEFAULT_ARITY_CAP {
                        return Err(self.error_here(format!(
                            "arity {arity} exceeds the cap of {DEFAULT_ARITY_CAP}"
                        )));
                    }
                    self.keyword("table")?;
                    let t = self.table(arity)?;
                    doc.functions.push((name.clone(), t));
                }
                "formula" => {
                    let free = self.var_list()?;
                    self.expect(Tok::Define)?;
                    let bound = self.bound()?;
                    let atoms = self.product()?;
                    doc.formulas
                        .push((name.clone(), PpsFormula { free, bound, atoms }));
                }
                "instance" => {
                    let vars = if *self.peek() == Tok::LParen {
                        Some(self.var_list()?)
                    } else {
                        None
                    };
                    self.expect(Tok::Define)?;
                    let atoms = self.product()?;
                    let inst = match vars {
                        Some(variables) => CspInstance { variables, atoms },
                        None => CspInstance::from_atoms(atoms),
                    };
                    doc.instances.push((name.clone(), inst));
                }
                "plan" => {
                    let plan = self.plan(&name)?;
                    doc.plans.push((name.clone(), plan));
                }
                _ => {
                    self.pos = start;
                    return Err(self.error_here(format!(
                        "unknown declaration `{kw}` (expected fn, formula, instance or plan)"
                    )));
                }
            }
            if !names.insert((kind_of(&kw), name.clone())) {
                let t = &self.toks[start + 1];
                return Err(ParseError {
                    line: t.line,
                    col: t.col,
                    message: format!("`{name}` is declared twice"),
                });
            }
        }
    }
}

fn kind_of(kw: &str) -> u8 {
    // Functions share a namespace; the other kinds share another.
    u8::from(kw != "fn")
}

pub fn parse(src: &str) -> Result<Document, ParseError> {
    let toks = lex(src)?;
    Parser { toks, pos: 0 }.document()
}

fn write_product(out: &mut String, atoms: &[Atom]) {
    if atoms.is_empty() {
        out.push('1');
        return;
    }
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            out.push_str(" * ");
        }
        let _ = write!(out, "{}({})", a.func, a.args.join(", "));
    }
}

fn write_body(out: &mut String, bound: &[String], atoms: &[Atom]) {
    if !bound.is_empty() {
        let _ = write!(out, "sum {} . ", bound.join(" "));
    }
    write_product(out, atoms);
}

fn write_values(out: &mut String, t: &FnTable) {
    for v in t.values() {
        let _ = write!(out, " {v}");
    }
}

pub fn write_function(out: &mut String, name: &str, t: &FnTable) {
    let _ = write!(out, "fn {name} arity {}\ntable", t.arity());
    write_values(out, t);
    out.push('\n');
}

pub fn write_formula(out: &mut String, name: &str, f: &PpsFormula) {
    let _ = write!(out, "formula {name}({}) := ", f.free.join(", "));
    write_body(out, &f.bound, &f.atoms);
    out.push('\n');
}

pub fn write_instance(out: &mut String, name: &str, inst: &CspInstance) {
    let _ = write!(out, "instance {name}");
    if CspInstance::from_atoms(inst.atoms.clone()).variables != inst.variables {
        let _ = write!(out, "({})", inst.variables.join(", "));
    }
    out.push_str(" := ");
    write_product(out, &inst.atoms);
    out.push('\n');
}

pub fn write_plan(out: &mut String, name: &str, p: &GadgetPlan) {
    let _ = write!(out, "plan {name}({}) := ", p.free.join(", "));
    write_body(out, &p.bound, &p.atoms);
    out.push('\n');
    if p.label != name {
        let escaped = p.label.replace('\\', "\\\\").replace('"', "\\\"");
        let _ = writeln!(out, "  label \"{escaped}\"");
    }
    for g in &p.repeated {
        out.push_str("  repeat ");
        write_body(out, &g.bound, &g.atoms);
        out.push('\n');
    }
    out.push_str("  target");
    write_values(out, &p.target);
    out.push('\n');
    match &p.schedule {
        Schedule::Exact => out.push_str("  schedule exact\n"),
        Schedule::Geometric {
            coefficient,
            ratio,
            budget,
            cap,
        } => {
            let _ = write!(
                out,
                "  schedule geometric coefficient {coefficient} ratio {ratio} budget {budget}"
            );
            if let Some(c) = cap {
                let _ = write!(out, " cap {c}");
            }
            out.push('\n');
        }
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (name, t) in &self.functions {
            write_function(&mut out, name, t);
        }
        let sections: [&dyn Fn(&mut String); 3] = [
            &|out| {
                self.formulas
                    .iter()
                    .for_each(|(n, x)| write_formula(out, n, x))
            },
            &|out| {
                self.instances
                    .iter()
                    .for_each(|(n, x)| write_instance(out, n, x))
            },
            &|out| self.plans.iter().for_each(|(n, x)| write_plan(out, n, x)),
        ];
        for write in sections {
            let mut part = String::new();
            write(&mut part);
            if !part.is_empty() {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(&part);
            }
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_numbers_next_to_dots() {
        let doc = parse("formula F(x) := sum y. A(x, y)\nfn A arity 2 table 1 0.5 1/2 3").unwrap();
        assert_eq!(doc.formulas[0].1.bound, vec!["y"]);
        assert_eq!(doc.functions[0].1.values()[1], fclone_core::q(1, 2));
    }

    #[test]
    fn positions_count_characters() {
        let e = parse("fn F′ arity 1\ntable 1 2\nformula G(x) := F′(x) *").unwrap_err();
        assert_eq!((e.line, e.col), (3, 24));
    }
}
