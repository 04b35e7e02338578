//! Exact cost classes of a small CNF instance, found by enumerating every
//! trace. Lets the exact and maximum-entropy constructions run on CNF
//! instances and gives the approximate scheme a reference to compare with.

use num_bigint::BigUint;
use rand::Rng;

use super::cnf::{CnfSpec, Formula};
use super::improviser::ApproxError;
use super::oracle::{unpack, Assignment, ExactEnumerationOracle};
use crate::lqci::{CostClassTable, ImprovisingDistributionSpec};
use crate::rational::{self, Rational};
use crate::sampling::{categorical_with_total, integer_weights};

/// The class table of a CNF instance together with every member trace.
#[derive(Debug, Clone)]
pub struct CnfClassIndex {
    pub table: CostClassTable,
    /// `members[i][k]`: traces with label `i` and cost `table.costs[k]`,
    /// in ascending bit order.
    pub members: Vec<Vec<Vec<Assignment>>>,
}

/// Enumerates the traces satisfying all three constraints and groups them
/// by label index and cost.
pub fn enumerate_class_index(
    spec: &CnfSpec,
    oracle: &ExactEnumerationOracle,
) -> Result<CnfClassIndex, ApproxError> {
    spec.validate()?;
    let all = Formula {
        num_vars: spec.num_vars,
        clauses: spec
            .hard
            .iter()
            .chain(&spec.label)
            .chain(&spec.cost)
            .cloned()
            .collect(),
        projection: spec.x.clone(),
    };
    let width = spec.x.len();
    let mut traces: Vec<(usize, BigUint, Assignment)> = Vec::new();
    for &m in oracle.models(&all)?.iter() {
        let x = unpack(m, width);
        let (label, cost) = spec
            .evaluate(&x)
            .expect("a model of the conjunction evaluates");
        if label >= spec.labels {
            return Err(ApproxError::LabelOutOfRange {
                label,
                labels: spec.labels,
            });
        }
        traces.push((label, cost, x));
    }
    let mut costs: Vec<BigUint> = traces.iter().map(|(_, c, _)| c.clone()).collect();
    costs.sort();
    costs.dedup();
    let mut members = vec![vec![Vec::new(); costs.len()]; spec.labels];
    for (label, cost, x) in traces {
        let k = costs.binary_search(&cost).expect("cost was collected");
        members[label][k].push(x);
    }
    let sizes = members
        .iter()
        .map(|row| row.iter().map(|m| BigUint::from(m.len())).collect())
        .collect();
    let table = CostClassTable::new(
        (0..spec.labels as u64).collect(),
        costs.iter().map(rational::from_biguint).collect(),
        sizes,
    )
    .expect("costs are sorted and distinct");
    Ok(CnfClassIndex { table, members })
}

/// Draws a class with its exact probability, then a uniform member.
#[derive(Debug, Clone)]
pub struct CnfExactImproviser {
    spec: ImprovisingDistributionSpec,
    index: CnfClassIndex,
    classes: Vec<(usize, usize)>,
    weights: Vec<BigUint>,
    total: BigUint,
}

impl CnfExactImproviser {
    pub fn new(spec: ImprovisingDistributionSpec, index: CnfClassIndex) -> Self {
        let mut classes = Vec::new();
        let mut probs: Vec<Rational> = Vec::new();
        for i in 0..spec.labels.len() {
            for k in 0..spec.costs.len() {
                let p = spec.joint(i, k);
                if p > Rational::from_integer(0.into()) {
                    assert!(
                        !index.members[i][k].is_empty(),
                        "positive probability on an empty class"
                    );
                    classes.push((i, k));
                    probs.push(p);
                }
            }
        }
        let (weights, total) = integer_weights(&probs);
        CnfExactImproviser {
            spec,
            index,
            classes,
            weights,
            total,
        }
    }

    pub fn spec(&self) -> &ImprovisingDistributionSpec {
        &self.spec
    }

    pub fn index(&self) -> &CnfClassIndex {
        &self.index
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ((usize, usize), Assignment) {
        let pick = categorical_with_total(&self.weights, &self.total, rng)
            .expect("distribution has positive mass");
        let (i, k) = self.classes[pick];
        let members = &self.index.members[i][k];
        ((i, k), members[rng.gen_range(0..members.len())].clone())
    }
}
