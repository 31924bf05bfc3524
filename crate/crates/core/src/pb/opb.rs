//! OPB files and solver solution logs.
//!
//! Emission is canonical: header `* #variable= N #constraint= M`, then
//! `min: <terms> ;`, then one `<terms> >= <bound> ;` line per constraint.
//! Terms are `<±coef> x<idx>` over positive literals only, so negated
//! literals are folded into the coefficient and the bound.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Lit, PBConstraint, PBInstance, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpbError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("variable x{var} has no value in the solution")]
    MissingValue { var: u32 },
}

fn syntax(line: usize, message: impl Into<String>) -> OpbError {
    OpbError::Syntax {
        line,
        message: message.into(),
    }
}

/// Positive-literal terms and adjusted bound of a normalized constraint.
fn positive_form(c: &PBConstraint) -> (Vec<(i64, Var)>, i64) {
    let mut bound = c.bound();
    let terms = c
        .terms()
        .iter()
        .map(|&(coef, l)| {
            if l.is_negated() {
                // a·¬x = a − a·x
                bound -= coef;
                (-coef, l.var())
            } else {
                (coef, l.var())
            }
        })
        .collect();
    (terms, bound)
}

fn write_terms(out: &mut String, terms: &[(i64, Var)]) {
    for &(c, v) in terms {
        let _ = write!(out, "{c:+} x{} ", v.index());
    }
}

pub fn emit_opb(inst: &PBInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "* #variable= {} #constraint= {}",
        inst.num_vars(),
        inst.num_constraints()
    );
    out.push_str("min: ");
    write_terms(&mut out, inst.objective());
    out.push_str(";\n");
    for c in inst.constraints() {
        let (terms, bound) = positive_form(c);
        write_terms(&mut out, &terms);
        let _ = writeln!(out, ">= {bound} ;");
    }
    out
}

fn parse_var(tok: &str, line: usize) -> Result<Lit, OpbError> {
    let (neg, rest) = match tok.strip_prefix('~') {
        Some(r) => (true, r),
        None => (false, tok),
    };
    let idx: u32 = rest
        .strip_prefix('x')
        .and_then(|s| s.parse().ok())
        .filter(|&i| i > 0)
        .ok_or_else(|| syntax(line, format!("expected a variable, found {tok:?}")))?;
    let v = Var::new(idx);
    Ok(if neg { v.neg() } else { v.pos() })
}

/// Parses `<coef> <lit>` pairs; a bare literal counts as coefficient 1.
fn parse_terms(tokens: &[&str], line: usize) -> Result<Vec<(i64, Lit)>, OpbError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let tok = tokens[i];
        if let Ok(c) = tok.parse::<i64>() {
            let lit = tokens
                .get(i + 1)
                .ok_or_else(|| syntax(line, "coefficient without variable"))?;
            out.push((c, parse_var(lit, line)?));
            i += 2;
        } else {
            out.push((1, parse_var(tok, line)?));
            i += 1;
        }
    }
    Ok(out)
}

/// Reads a linear OPB file. `>=`, `<=` and `=` rows are accepted and
/// normalized into `≥` constraints (an `=` row becomes two).
pub fn parse_opb(text: &str) -> Result<PBInstance, OpbError> {
    let mut inst = PBInstance::new();
    let mut declared_vars = 0u32;
    let mut statement = String::new();
    let mut start_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if statement.is_empty() {
            if let Some(comment) = trimmed.strip_prefix('*') {
                if let Some(pos) = comment.find("#variable=") {
                    declared_vars = comment[pos + 10..]
                        .split_whitespace()
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line, "bad #variable= header"))?;
                }
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
            start_line = line;
        }
        statement.push(' ');
        statement.push_str(trimmed);
        while let Some(end) = statement.find(';') {
            let stmt: String = statement[..end].to_string();
            statement = statement[end + 1..].to_string();
            parse_statement(&mut inst, stmt.trim(), start_line)?;
            start_line = line;
        }
        if statement.trim().is_empty() {
            statement.clear();
        }
    }
    if !statement.trim().is_empty() {
        return Err(syntax(start_line, "statement is missing its ';'"));
    }
    inst.reserve_vars(declared_vars);
    Ok(inst)
}

fn parse_statement(inst: &mut PBInstance, stmt: &str, line: usize) -> Result<(), OpbError> {
    if stmt.is_empty() {
        return Ok(());
    }
    if let Some(rest) = stmt.strip_prefix("min:") {
        let toks: Vec<&str> = rest.split_whitespace().collect();
        let terms = parse_terms(&toks, line)?;
        let mut constant = 0;
        let mut obj = Vec::with_capacity(terms.len());
        for (c, l) in terms {
            if l.is_negated() {
                constant += c;
                obj.push((-c, l.var()));
            } else {
                obj.push((c, l.var()));
            }
        }
        if constant != 0 {
            return Err(syntax(
                line,
                "objective with negated literals has a constant offset",
            ));
        }
        inst.set_objective(obj);
        return Ok(());
    }
    if stmt.starts_with("max:") {
        return Err(syntax(line, "only minimization objectives are supported"));
    }
    let toks: Vec<&str> = stmt.split_whitespace().collect();
    let op_pos = toks
        .iter()
        .position(|t| matches!(*t, ">=" | "<=" | "="))
        .ok_or_else(|| syntax(line, "expected >=, <= or ="))?;
    if op_pos + 2 != toks.len() {
        return Err(syntax(line, "expected a single bound after the relation"));
    }
    let terms = parse_terms(&toks[..op_pos], line)?;
    let bound: i64 = toks[op_pos + 1]
        .parse()
        .map_err(|_| syntax(line, format!("bad bound {:?}", toks[op_pos + 1])))?;
    let negated = || terms.iter().map(|&(c, l)| (-c, l));
    match toks[op_pos] {
        ">=" => inst.add(PBConstraint::new(terms.iter().copied(), bound)),
        "<=" => inst.add(PBConstraint::new(negated(), -bound)),
        _ => {
            inst.add(PBConstraint::new(terms.iter().copied(), bound));
            inst.add(PBConstraint::new(negated(), -bound));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionStatus {
    Optimum,
    Satisfiable,
    Unsatisfiable,
    Unknown,
}

/// A parsed solver log: status line, last objective line, `v` values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub status: SolutionStatus,
    pub objective: Option<i64>,
    values: Vec<Option<bool>>,
}

impl Solution {
    pub fn new(
        status: SolutionStatus,
        objective: Option<i64>,
        assignment: Option<&[bool]>,
    ) -> Self {
        let values = assignment.map_or_else(Vec::new, |a| a.iter().map(|&b| Some(b)).collect());
        Self {
            status,
            objective,
            values,
        }
    }

    pub fn value(&self, v: Var) -> Option<bool> {
        self.values.get(v.slot()).copied().flatten()
    }

    /// Total assignment over `num_vars` variables; every variable must appear.
    pub fn to_assignment(&self, num_vars: u32) -> Result<Vec<bool>, OpbError> {
        (1..=num_vars)
            .map(|i| {
                self.value(Var::new(i))
                    .ok_or(OpbError::MissingValue { var: i })
            })
            .collect()
    }
}

pub fn parse_solution(text: &str) -> Result<Solution, OpbError> {
    let mut status = SolutionStatus::Unknown;
    let mut objective = None;
    let mut values: Vec<Option<bool>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            Some("s") => {
                let rest: Vec<&str> = toks.collect();
                status = match rest.join(" ").as_str() {
                    "OPTIMUM FOUND" => SolutionStatus::Optimum,
                    "SATISFIABLE" => SolutionStatus::Satisfiable,
                    "UNSATISFIABLE" => SolutionStatus::Unsatisfiable,
                    _ => SolutionStatus::Unknown,
                };
            }
            Some("o") => {
                let v = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line, "bad objective line"))?;
                objective = Some(v);
            }
            Some("v") => {
                for tok in toks {
                    let (neg, name) = match tok.strip_prefix('-').or_else(|| tok.strip_prefix('~'))
                    {
                        Some(r) => (true, r),
                        None => (false, tok),
                    };
                    let lit = parse_var(name, line)?;
                    let slot = lit.var().slot();
                    if values.len() <= slot {
                        values.resize(slot + 1, None);
                    }
                    values[slot] = Some(!neg);
                }
            }
            _ => {}
        }
    }
    Ok(Solution {
        status,
        objective,
        values,
    })
}

/// Solver log in the competition style: `s`, `o` and `v` lines.
pub fn emit_solution(sol: &Solution) -> String {
    let mut out = String::new();
    let status = match sol.status {
        SolutionStatus::Optimum => "OPTIMUM FOUND",
        SolutionStatus::Satisfiable => "SATISFIABLE",
        SolutionStatus::Unsatisfiable => "UNSATISFIABLE",
        SolutionStatus::Unknown => "UNKNOWN",
    };
    if let Some(o) = sol.objective {
        let _ = writeln!(out, "o {o}");
    }
    let _ = writeln!(out, "s {status}");
    if !sol.values.is_empty() {
        out.push('v');
        for (i, v) in sol.values.iter().enumerate() {
            if let Some(b) = v {
                let _ = write!(out, " {}x{}", if *b { "" } else { "-" }, i + 1);
            }
        }
        out.push('\n');
    }
    out
}
