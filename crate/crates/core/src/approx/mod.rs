//! Improvisation over Boolean-formula specifications.
//!
//! Costs are grouped into geometric buckets, each bucket is counted with a
//! (possibly approximate) projected model counter, and the greedy
//! construction runs on bucket counts. Words are drawn from a bucket with
//! a (possibly approximate) uniform generator. The exact enumeration
//! oracle makes every step exact on small formulas.

mod cnf;
mod dimacs;
mod exact;
mod greedy;
mod improviser;
mod oracle;
mod params;
mod solver;

use serde::{Deserialize, Serialize};

use crate::lqci::LqciParams;

pub use cnf::{
    cost_interval_clauses, function_table_clauses, toy_cnf, value_clauses, Clause, CnfError,
    CnfSpec, Formula, Lit,
};
pub use dimacs::{parse_dimacs, parse_formula, write_dimacs, write_formula, DimacsError};
pub use exact::{enumerate_class_index, CnfClassIndex, CnfExactImproviser};
pub use greedy::{approximate_greedy_cost, bucket_probabilities, BucketEstimates, BucketOutcome};
pub use improviser::{
    build_approx_improviser, enumerate_distribution, ApproxError, ApproxImproviser, ApproxOutcome,
    ApproxReport, ApproxSample, LabelReport, Refusal,
};
pub use oracle::{
    format_assignment, pack, parse_assignment, unpack, Assignment, CounterOracle,
    ExactEnumerationOracle, ExecOracle, GeneratorOracle, OracleError, SerializedOracle,
};
pub use params::{
    cube_root_tolerance, per_count_failure, ApproxParams, ApproxParamsError, BucketPlan,
    DerivedParams,
};

/// JSON bundle for a CNF instance: annotated DIMACS text plus bounds.
/// Length bounds do not apply and default to 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfInstanceJson {
    pub cnf: String,
    #[serde(flatten)]
    pub params: LqciParams,
}

/// Renders trace bits as a `0`/`1` string.
pub fn render_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
