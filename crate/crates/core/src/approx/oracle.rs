//! Counting and sampling oracles.
//!
//! A counter returns the number of projected models within a factor
//! `1 + tau` with probability at least `1 - delta`; a generator returns a
//! projected model whose probability is within `1 + epsilon` of uniform.
//! [`ExactEnumerationOracle`] meets both with `tau = epsilon = 0` by
//! enumerating models; [`ExecOracle`] forwards requests to an external
//! program.

use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Stdio};
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use rand::{Rng, RngCore};

use super::cnf::{Formula, Lit};
use super::dimacs::write_formula;
use super::solver::Dpll;
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{bits} projected bits exceeds the enumeration cap of {max} bits")]
    CapExceeded { bits: usize, max: usize },
    #[error("oracle process failed: {0}")]
    Exec(String),
    #[error("oracle protocol error: {0}")]
    Protocol(String),
    #[error("oracle reported models for a formula it then could not sample")]
    Inconsistent,
}

/// An assignment to the projection variables, in projection order.
pub type Assignment = Vec<bool>;

pub trait CounterOracle {
    fn count(
        &self,
        formula: &Formula,
        tau: &Rational,
        delta: &Rational,
    ) -> Result<BigUint, OracleError>;
}

pub trait GeneratorOracle {
    /// `Ok(None)` when the formula has no models.
    fn sample(
        &self,
        formula: &Formula,
        epsilon: &Rational,
        rng: &mut dyn RngCore,
    ) -> Result<Option<Assignment>, OracleError>;
}

/// Exact projected counting and exactly uniform projected sampling by
/// enumeration. Model lists are cached per formula.
#[derive(Debug)]
pub struct ExactEnumerationOracle {
    max_x_bits: usize,
    cache: Mutex<HashMap<Formula, Arc<Vec<u64>>>>,
}

impl ExactEnumerationOracle {
    pub const DEFAULT_MAX_BITS: usize = 24;

    pub fn new(max_x_bits: usize) -> Self {
        ExactEnumerationOracle {
            max_x_bits: max_x_bits.min(63),
            cache: Mutex::default(),
        }
    }

    /// Projected models, packed big-endian (see [`unpack`]) and ascending.
    pub fn models(&self, formula: &Formula) -> Result<Arc<Vec<u64>>, OracleError> {
        let bits = formula.projection.len();
        if bits > self.max_x_bits {
            return Err(OracleError::CapExceeded {
                bits,
                max: self.max_x_bits,
            });
        }
        if let Some(hit) = self.cache.lock().expect("cache lock").get(formula) {
            return Ok(Arc::clone(hit));
        }
        let models = Arc::new(
            Dpll::new(formula.num_vars, &formula.clauses).enumerate_projected(&formula.projection),
        );
        self.cache
            .lock()
            .expect("cache lock")
            .insert(formula.clone(), Arc::clone(&models));
        Ok(models)
    }
}

impl Default for ExactEnumerationOracle {
    fn default() -> Self {
        Self::new(Self::DEFAULT_MAX_BITS)
    }
}

/// Unpacks a model from [`ExactEnumerationOracle::models`] into `width` bits.
pub fn unpack(model: u64, width: usize) -> Assignment {
    (0..width)
        .map(|j| model >> (width - 1 - j) & 1 == 1)
        .collect()
}

/// Inverse of [`unpack`].
pub fn pack(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| acc << 1 | u64::from(b))
}

impl CounterOracle for ExactEnumerationOracle {
    fn count(&self, formula: &Formula, _: &Rational, _: &Rational) -> Result<BigUint, OracleError> {
        Ok(BigUint::from(self.models(formula)?.len()))
    }
}

impl GeneratorOracle for ExactEnumerationOracle {
    fn sample(
        &self,
        formula: &Formula,
        _: &Rational,
        rng: &mut dyn RngCore,
    ) -> Result<Option<Assignment>, OracleError> {
        let models = self.models(formula)?;
        if models.is_empty() {
            return Ok(None);
        }
        let pick = models[rng.gen_range(0..models.len())];
        Ok(Some(unpack(pick, formula.projection.len())))
    }
}

/// Serialises calls to an oracle that is not safe to call concurrently.
#[derive(Debug)]
pub struct SerializedOracle<O>(Mutex<O>);

impl<O> SerializedOracle<O> {
    pub fn new(inner: O) -> Self {
        SerializedOracle(Mutex::new(inner))
    }

    pub fn into_inner(self) -> O {
        self.0.into_inner().expect("oracle lock")
    }
}

impl<O: CounterOracle> CounterOracle for SerializedOracle<O> {
    fn count(&self, f: &Formula, tau: &Rational, delta: &Rational) -> Result<BigUint, OracleError> {
        self.0.lock().expect("oracle lock").count(f, tau, delta)
    }
}

impl<O: GeneratorOracle> GeneratorOracle for SerializedOracle<O> {
    fn sample(
        &self,
        f: &Formula,
        epsilon: &Rational,
        rng: &mut dyn RngCore,
    ) -> Result<Option<Assignment>, OracleError> {
        self.0.lock().expect("oracle lock").sample(f, epsilon, rng)
    }
}

/// External oracle reached through a subprocess.
///
/// Counting runs `<cmd> count --tau T --delta D`; sampling runs
/// `<cmd> sample --epsilon E --seed S`. Both receive the formula as DIMACS
/// with a `c ind` line on stdin. A count response is one decimal integer.
/// A sample response is one line of signed literals over the projection
/// variables, optionally ending in `0`; a line reading `UNSAT` (or an empty
/// response) means no models. Rationals are passed as `p/q` or integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecOracle {
    program: String,
    args: Vec<String>,
}

impl ExecOracle {
    /// `command` is split on whitespace into program and leading arguments.
    pub fn new(command: &str) -> Result<Self, OracleError> {
        let mut parts = command.split_whitespace().map(str::to_owned);
        let program = parts
            .next()
            .ok_or_else(|| OracleError::Exec("empty oracle command".into()))?;
        Ok(ExecOracle {
            program,
            args: parts.collect(),
        })
    }

    fn run(&self, extra: &[String], stdin: &str) -> Result<String, OracleError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .args(extra)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| OracleError::Exec(format!("{}: {e}", self.program)))?;
        child
            .stdin
            .take()
            .expect("piped stdin")
            .write_all(stdin.as_bytes())
            .map_err(|e| OracleError::Exec(e.to_string()))?;
        let output = child
            .wait_with_output()
            .map_err(|e| OracleError::Exec(e.to_string()))?;
        if !output.status.success() {
            return Err(OracleError::Exec(format!(
                "{} exited with {}: {}",
                self.program,
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        String::from_utf8(output.stdout).map_err(|e| OracleError::Protocol(e.to_string()))
    }
}

impl CounterOracle for ExecOracle {
    fn count(&self, f: &Formula, tau: &Rational, delta: &Rational) -> Result<BigUint, OracleError> {
        let args = [
            "count".into(),
            "--tau".into(),
            format_rational(tau),
            "--delta".into(),
            format_rational(delta),
        ];
        let out = self.run(&args, &write_formula(f))?;
        out.trim()
            .parse()
            .map_err(|_| OracleError::Protocol(format!("expected a count, got `{}`", out.trim())))
    }
}

impl GeneratorOracle for ExecOracle {
    fn sample(
        &self,
        f: &Formula,
        epsilon: &Rational,
        rng: &mut dyn RngCore,
    ) -> Result<Option<Assignment>, OracleError> {
        let args = [
            "sample".into(),
            "--epsilon".into(),
            format_rational(epsilon),
            "--seed".into(),
            rng.next_u64().to_string(),
        ];
        let out = self.run(&args, &write_formula(f))?;
        parse_assignment(out.lines().next().unwrap_or(""), &f.projection)
    }
}

/// Parses a sample response line against the projection variables.
pub fn parse_assignment(line: &str, projection: &[u32]) -> Result<Option<Assignment>, OracleError> {
    let line = line.trim();
    if line.is_empty() || line.eq_ignore_ascii_case("unsat") {
        return Ok(None);
    }
    let mut values: HashMap<u32, bool> = HashMap::new();
    for t in line.split_whitespace() {
        let lit: Lit = t
            .parse()
            .map_err(|_| OracleError::Protocol(format!("bad literal `{t}`")))?;
        if lit == 0 {
            break;
        }
        values.insert(lit.unsigned_abs(), lit > 0);
    }
    projection
        .iter()
        .map(|v| {
            values
                .get(v)
                .copied()
                .ok_or_else(|| OracleError::Protocol(format!("variable {v} missing from sample")))
        })
        .collect::<Result<Vec<bool>, _>>()
        .map(Some)
}

/// Formats an assignment as a response line for [`parse_assignment`].
pub fn format_assignment(assignment: &[bool], projection: &[u32]) -> String {
    let mut parts: Vec<String> = projection
        .iter()
        .zip(assignment)
        .map(|(&v, &b)| if b { v.to_string() } else { format!("-{v}") })
        .collect();
    parts.push("0".into());
    parts.join(" ")
}
