//! Greedy cost construction over cost buckets with approximate counts.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::cnf::CnfSpec;
use super::oracle::{CounterOracle, OracleError};
use super::params::BucketPlan;
use crate::rational::{self, Rational};

/// Per-bucket counts and probabilities for one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketEstimates {
    pub counts: Vec<BigUint>,
    /// Probability of each bucket; sums to exactly 1.
    pub probs: Vec<Rational>,
    /// `r^(k-1)` per bucket.
    pub low_costs: Vec<Rational>,
    /// `sum p_k r^(k-1)`, a lower bound on the label's expected cost.
    pub lo: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BucketOutcome {
    Plan(BucketEstimates),
    /// Minimum masses `alpha c_k / (1 + tau)` already exceed 1.
    TooManyWords {
        mass: Rational,
    },
    /// Maximum masses `(1 + tau) beta c_k` cannot reach 1.
    TooFewWords {
        mass: Rational,
    },
}

impl BucketOutcome {
    pub fn plan(&self) -> Option<&BucketEstimates> {
        match self {
            BucketOutcome::Plan(p) => Some(p),
            _ => None,
        }
    }
}

/// The probability assignment given bucket counts: start every bucket at
/// its minimum, then raise buckets cheapest-first to their maximum until
/// the total reaches 1.
pub fn bucket_probabilities(
    counts: &[BigUint],
    low_costs: &[Rational],
    alpha: &Rational,
    beta: &Rational,
    tau: &Rational,
) -> BucketOutcome {
    let one = Rational::one();
    let widen = &one + tau;
    let c: Vec<Rational> = counts.iter().map(rational::from_biguint).collect();
    let mut p: Vec<Rational> = c.iter().map(|ck| alpha * ck / &widen).collect();
    let mut sum: Rational = p.iter().sum();
    if sum > one {
        return BucketOutcome::TooManyWords { mass: sum };
    }
    for k in 0..p.len() {
        if sum == one {
            break;
        }
        let others = &sum - &p[k];
        let cap = &widen * beta * &c[k];
        let room = &one - &others;
        p[k] = if cap < room { cap } else { room };
        sum = others + &p[k];
    }
    if sum < one {
        return BucketOutcome::TooFewWords { mass: sum };
    }
    let lo = p.iter().zip(low_costs).map(|(pk, lk)| pk * lk).sum();
    BucketOutcome::Plan(BucketEstimates {
        counts: counts.to_vec(),
        probs: p,
        low_costs: low_costs.to_vec(),
        lo,
    })
}

/// Counts each bucket of `label` with the counter and runs
/// [`bucket_probabilities`]. Empty buckets are not sent to the counter.
#[allow(clippy::too_many_arguments)]
pub fn approximate_greedy_cost<C: CounterOracle + ?Sized>(
    spec: &CnfSpec,
    label: usize,
    alpha: &Rational,
    beta: &Rational,
    plan: &BucketPlan,
    tau: &Rational,
    d: &Rational,
    counter: &C,
) -> Result<BucketOutcome, OracleError> {
    let mut counts = Vec::with_capacity(plan.b);
    for k in 0..plan.b {
        if plan.is_empty_bucket(k) {
            counts.push(BigUint::zero());
            continue;
        }
        let (lo, hi) = &plan.bounds[k];
        counts.push(counter.count(&spec.phi(label, lo, hi), tau, d)?);
    }
    Ok(bucket_probabilities(
        &counts,
        &plan.low_costs,
        alpha,
        beta,
        tau,
    ))
}
