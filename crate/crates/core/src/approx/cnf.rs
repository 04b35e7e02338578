//! CNF specifications: variable groups, the three constraint formulas, and
//! the per-label, per-bucket formulas handed to the oracles.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::solver::Dpll;

/// DIMACS literal: `v` or `-v` for variable `v >= 1`.
pub type Lit = i32;
pub type Clause = Vec<Lit>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CnfError {
    #[error("variable {var} is outside 1..={num_vars}")]
    VarOutOfRange { var: u32, num_vars: u32 },
    #[error("variable {0} belongs to more than one group")]
    Overlap(u32),
    #[error("no trace (x) variables declared")]
    NoTraceVars,
    #[error("{labels} labels do not fit in {bits} label bits")]
    TooManyLabels { labels: usize, bits: usize },
    #[error("at least one label is required")]
    NoLabels,
    #[error("{bits} cost bits is too wide")]
    CostTooWide { bits: usize },
}

/// A Boolean-formula instance.
///
/// Traces are assignments to `x`. The hard constraint is `hard`, the label
/// of a trace is the big-endian value of `label_bits` forced by `label`,
/// and its cost is the big-endian value of `y` plus one (so `|y|` bits
/// cover the costs `1..=2^|y|`), forced by `cost`. Any other variable is
/// auxiliary and existentially quantified.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfSpec {
    pub num_vars: u32,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub label_bits: Vec<u32>,
    pub z: Vec<u32>,
    pub hard: Vec<Clause>,
    pub label: Vec<Clause>,
    pub cost: Vec<Clause>,
    pub labels: usize,
}

/// A formula with a projection set, as passed to counters and generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    pub num_vars: u32,
    pub clauses: Vec<Clause>,
    /// Variables whose assignments are counted and sampled.
    pub projection: Vec<u32>,
}

impl CnfSpec {
    pub fn validate(&self) -> Result<(), CnfError> {
        if self.x.is_empty() {
            return Err(CnfError::NoTraceVars);
        }
        if self.labels == 0 {
            return Err(CnfError::NoLabels);
        }
        if self.y.len() > 4096 {
            return Err(CnfError::CostTooWide { bits: self.y.len() });
        }
        let bits = self.label_bits.len();
        if bits < usize::BITS as usize && self.labels > 1usize << bits {
            return Err(CnfError::TooManyLabels {
                labels: self.labels,
                bits,
            });
        }
        let mut seen = HashSet::new();
        for &v in self
            .x
            .iter()
            .chain(&self.y)
            .chain(&self.label_bits)
            .chain(&self.z)
        {
            self.check_var(v)?;
            if !seen.insert(v) {
                return Err(CnfError::Overlap(v));
            }
        }
        for clause in self.hard.iter().chain(&self.label).chain(&self.cost) {
            for &lit in clause {
                self.check_var(lit.unsigned_abs())?;
            }
        }
        Ok(())
    }

    fn check_var(&self, var: u32) -> Result<(), CnfError> {
        if var == 0 || var > self.num_vars {
            Err(CnfError::VarOutOfRange {
                var,
                num_vars: self.num_vars,
            })
        } else {
            Ok(())
        }
    }

    /// Largest representable cost, `2^|y|`.
    pub fn max_cost(&self) -> BigUint {
        BigUint::one() << self.y.len()
    }

    fn all_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.hard.iter().chain(&self.label).chain(&self.cost)
    }

    /// Traces with label `label` and cost in `lo..=hi`, projected onto `x`.
    pub fn phi(&self, label: usize, lo: &BigUint, hi: &BigUint) -> Formula {
        let mut clauses: Vec<Clause> = self.all_clauses().cloned().collect();
        clauses.extend(value_clauses(&self.label_bits, &BigUint::from(label)));
        clauses.extend(cost_interval_clauses(&self.y, lo, hi));
        Formula {
            num_vars: self.num_vars,
            clauses,
            projection: self.x.clone(),
        }
    }

    /// Traces satisfying the hard constraint, projected onto `x`.
    pub fn hard_formula(&self) -> Formula {
        Formula {
            num_vars: self.num_vars,
            clauses: self.hard.clone(),
            projection: self.x.clone(),
        }
    }

    /// Label index and cost of trace `x` (one bit per `x` variable), or
    /// `None` if no extension satisfies all three constraints.
    pub fn evaluate(&self, x: &[bool]) -> Option<(usize, BigUint)> {
        assert_eq!(x.len(), self.x.len(), "trace width mismatch");
        let mut clauses: Vec<Clause> = self.all_clauses().cloned().collect();
        for (&v, &b) in self.x.iter().zip(x) {
            clauses.push(vec![if b { v as Lit } else { -(v as Lit) }]);
        }
        let model = Dpll::new(self.num_vars, &clauses).solve()?;
        let label = read_value(&self.label_bits, &model);
        let cost = read_value(&self.y, &model) + 1u32;
        Some((usize::try_from(label).ok()?, cost))
    }
}

fn read_value(vars: &[u32], model: &[bool]) -> BigUint {
    vars.iter().fold(BigUint::zero(), |acc, &v| {
        (acc << 1u32) + u32::from(model[v as usize])
    })
}

/// Unit clauses fixing the big-endian value of `vars` to `value`.
pub fn value_clauses(vars: &[u32], value: &BigUint) -> Vec<Clause> {
    let w = vars.len() as u64;
    vars.iter()
        .enumerate()
        .map(|(j, &v)| {
            if value.bit(w - 1 - j as u64) {
                vec![v as Lit]
            } else {
                vec![-(v as Lit)]
            }
        })
        .collect()
}

/// Clauses over the cost bits `y` satisfied exactly when the cost
/// (big-endian value plus one) lies in `lo..=hi`.
///
/// Both comparisons are expressed directly: for `y >= L`, one clause per
/// set bit of `L` rules out "agrees with `L` above this bit and has 0
/// here"; `y <= U` is symmetric on the clear bits of `U`. No auxiliary
/// variables are needed.
pub fn cost_interval_clauses(y: &[u32], lo: &BigUint, hi: &BigUint) -> Vec<Clause> {
    assert!(!lo.is_zero() && lo <= hi && *hi <= BigUint::one() << y.len());
    let lower = lo - 1u32;
    let upper = hi - 1u32;
    let w = y.len() as u64;
    let bit = |value: &BigUint, j: usize| value.bit(w - 1 - j as u64);
    let lit = |v: u32, positive: bool| if positive { v as Lit } else { -(v as Lit) };
    let mut out = Vec::new();
    for j in 0..y.len() {
        if bit(&lower, j) {
            let mut clause: Clause = (0..j).map(|i| lit(y[i], !bit(&lower, i))).collect();
            clause.push(lit(y[j], true));
            out.push(clause);
        }
        if !bit(&upper, j) {
            let mut clause: Clause = (0..j).map(|i| lit(y[i], !bit(&upper, i))).collect();
            clause.push(lit(y[j], false));
            out.push(clause);
        }
    }
    out
}

/// Clauses forcing `outputs` (big-endian) to `f(inputs)` for every input
/// assignment where `f` is defined. Intended for small input widths.
pub fn function_table_clauses(
    inputs: &[u32],
    outputs: &[u32],
    f: impl Fn(u64) -> Option<u64>,
) -> Vec<Clause> {
    let w = inputs.len();
    assert!(w < 32, "function tables are for small inputs");
    let ow = outputs.len();
    let mut out = Vec::new();
    for a in 0..(1u64 << w) {
        let Some(value) = f(a) else { continue };
        // input != a
        let guard: Clause = inputs
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                if a >> (w - 1 - j) & 1 == 1 {
                    -(v as Lit)
                } else {
                    v as Lit
                }
            })
            .collect();
        for (j, &v) in outputs.iter().enumerate() {
            let mut clause = guard.clone();
            clause.push(if value >> (ow - 1 - j) & 1 == 1 {
                v as Lit
            } else {
                -(v as Lit)
            });
            out.push(clause);
        }
    }
    out
}

/// The toy instance as a CNF: three trace bits containing a 1, label 0 for
/// odd parity and 1 for even, cost equal to the binary value.
pub fn toy_cnf() -> CnfSpec {
    let x = vec![1, 2, 3];
    let label_bits = vec![4];
    let y = vec![5, 6, 7];
    let hard = vec![vec![1, 2, 3]];
    let label = function_table_clauses(&x, &label_bits, |a| {
        Some(u64::from(a.count_ones() % 2 == 0))
    });
    let cost = function_table_clauses(&x, &y, |a| a.checked_sub(1));
    CnfSpec {
        num_vars: 7,
        x,
        y,
        label_bits,
        z: vec![],
        hard,
        label,
        cost,
        labels: 2,
    }
}
