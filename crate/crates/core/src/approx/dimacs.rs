//! DIMACS CNF with comment annotations.
//!
//! Recognised comment lines (a trailing `0` on variable lists is optional):
//!
//! ```text
//! c ind 1 2 3          trace variables x, in order
//! c cost y 5 6 7       cost bits, most significant first
//! c label bits 4       label bits, most significant first
//! c aux z 8 9          auxiliary variables (optional)
//! c labels 2           number of labels (default 2^|label bits|)
//! c section hard       following clauses belong to hard | label | cost
//! ```
//!
//! Clauses before any `c section` line go to the hard constraint. Other
//! comments are ignored.

use std::fmt::Write as _;

use super::cnf::{Clause, CnfError, CnfSpec, Formula, Lit};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("header declares {declared} clauses but {found} were given")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
    #[error(transparent)]
    Spec(#[from] CnfError),
}

#[derive(Clone, Copy)]
enum Section {
    Hard,
    Label,
    Cost,
}

fn syntax(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError::Syntax {
        line,
        message: message.into(),
    }
}

fn var_list<'a>(
    line: usize,
    tokens: impl Iterator<Item = &'a str>,
) -> Result<Vec<u32>, DimacsError> {
    let mut out = Vec::new();
    for t in tokens {
        let v: u32 = t
            .parse()
            .map_err(|_| syntax(line, format!("bad variable `{t}`")))?;
        if v == 0 {
            break;
        }
        out.push(v);
    }
    Ok(out)
}

/// Parses an annotated DIMACS document into a validated [`CnfSpec`].
pub fn parse_dimacs(text: &str) -> Result<CnfSpec, DimacsError> {
    let mut spec = CnfSpec::default();
    let mut header: Option<(u32, usize)> = None;
    let mut labels: Option<usize> = None;
    let mut section = Section::Hard;
    let mut current: Clause = Vec::new();
    let mut found = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match tokens.clone().next() {
            Some("c") => {
                tokens.next();
                let words: Vec<&str> = tokens.collect();
                match words.as_slice() {
                    ["ind", rest @ ..] => spec.x.extend(var_list(line, rest.iter().copied())?),
                    ["cost", "y", rest @ ..] => {
                        spec.y.extend(var_list(line, rest.iter().copied())?)
                    }
                    ["label", "bits", rest @ ..] => spec
                        .label_bits
                        .extend(var_list(line, rest.iter().copied())?),
                    ["aux", "z", rest @ ..] => spec.z.extend(var_list(line, rest.iter().copied())?),
                    ["labels", n] => {
                        labels = Some(n.parse().map_err(|_| syntax(line, "bad label count"))?)
                    }
                    ["section", name] => {
                        section = match *name {
                            "hard" => Section::Hard,
                            "label" => Section::Label,
                            "cost" => Section::Cost,
                            other => {
                                return Err(syntax(line, format!("unknown section `{other}`")))
                            }
                        }
                    }
                    _ => {}
                }
            }
            Some("p") => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate header"));
                }
                let parts: Vec<&str> = tokens.collect();
                let parsed = match parts.as_slice() {
                    ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                    _ => None,
                };
                header =
                    Some(parsed.ok_or_else(|| syntax(line, "expected `p cnf <vars> <clauses>`"))?);
            }
            Some(_) => {
                if header.is_none() {
                    return Err(DimacsError::MissingHeader);
                }
                for t in tokens {
                    let lit: Lit = t
                        .parse()
                        .map_err(|_| syntax(line, format!("bad literal `{t}`")))?;
                    if lit == 0 {
                        let clause = std::mem::take(&mut current);
                        match section {
                            Section::Hard => spec.hard.push(clause),
                            Section::Label => spec.label.push(clause),
                            Section::Cost => spec.cost.push(clause),
                        }
                        found += 1;
                    } else {
                        current.push(lit);
                    }
                }
            }
            None => {}
        }
    }
    let (num_vars, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if declared != found {
        return Err(DimacsError::ClauseCount { declared, found });
    }
    spec.num_vars = num_vars;
    spec.labels = match labels {
        Some(n) => n,
        None => {
            1usize
                .checked_shl(spec.label_bits.len() as u32)
                .ok_or(CnfError::TooManyLabels {
                    labels: usize::MAX,
                    bits: spec.label_bits.len(),
                })?
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn write_vars(out: &mut String, prefix: &str, vars: &[u32]) {
    if vars.is_empty() {
        return;
    }
    out.push_str(prefix);
    for v in vars {
        let _ = write!(out, " {v}");
    }
    out.push_str(" 0\n");
}

fn write_clauses(out: &mut String, clauses: &[Clause]) {
    for c in clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
}

/// Writes `spec` in the annotated format read by [`parse_dimacs`].
pub fn write_dimacs(spec: &CnfSpec) -> String {
    let mut out = String::new();
    let total = spec.hard.len() + spec.label.len() + spec.cost.len();
    let _ = writeln!(out, "p cnf {} {}", spec.num_vars, total);
    write_vars(&mut out, "c ind", &spec.x);
    write_vars(&mut out, "c cost y", &spec.y);
    write_vars(&mut out, "c label bits", &spec.label_bits);
    write_vars(&mut out, "c aux z", &spec.z);
    let _ = writeln!(out, "c labels {}", spec.labels);
    for (name, clauses) in [
        ("hard", &spec.hard),
        ("label", &spec.label),
        ("cost", &spec.cost),
    ] {
        let _ = writeln!(out, "c section {name}");
        write_clauses(&mut out, clauses);
    }
    out
}

/// Writes a single formula with its projection as a `c ind` line; this is
/// the request body sent to external oracles.
pub fn write_formula(formula: &Formula) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", formula.num_vars, formula.clauses.len());
    write_vars(&mut out, "c ind", &formula.projection);
    write_clauses(&mut out, &formula.clauses);
    out
}

/// Reads a formula written by [`write_formula`] (or any DIMACS file with a
/// `c ind` line).
pub fn parse_formula(text: &str) -> Result<Formula, DimacsError> {
    let mut spec = parse_dimacs_unchecked(text)?;
    let mut clauses = std::mem::take(&mut spec.hard);
    clauses.append(&mut spec.label);
    clauses.append(&mut spec.cost);
    Ok(Formula {
        num_vars: spec.num_vars,
        clauses,
        projection: spec.x,
    })
}

fn parse_dimacs_unchecked(text: &str) -> Result<CnfSpec, DimacsError> {
    // A bare formula declares no labels; one label keeps validation happy.
    parse_dimacs(&format!("c labels 1\n{text}"))
}
