//! End-to-end approximate improviser for CNF specifications.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;
use serde::Serialize;

use super::cnf::{CnfError, CnfSpec, Formula};
use super::greedy::{approximate_greedy_cost, BucketEstimates, BucketOutcome};
use super::oracle::{
    unpack, Assignment, CounterOracle, ExactEnumerationOracle, GeneratorOracle, OracleError,
};
use super::params::{ApproxParams, ApproxParamsError, DerivedParams};
use crate::lqci::{greedy_label_construction, GreedyError, LqciParams, ParamsError};
use crate::rational::{self, format_rational, Rational};
use crate::sampling::{categorical_with_total, integer_weights};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApproxError {
    #[error(transparent)]
    Spec(#[from] CnfError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Tolerances(#[from] ApproxParamsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("instance has {spec} labels but bounds are given for {params}")]
    LabelCount { spec: usize, params: usize },
    #[error("a trace has label index {label} but the instance declares {labels} labels")]
    LabelOutOfRange { label: usize, labels: usize },
}

/// Why no improviser was produced. Each case certifies infeasibility with
/// the confidence of the counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refusal {
    TooManyWords { label: usize, mass: Rational },
    TooFewWords { label: usize, mass: Rational },
    LabelBounds(GreedyError),
    LowExceedsBound { low: Rational },
}

impl std::fmt::Display for Refusal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Refusal::TooManyWords { label, mass } => write!(
                f,
                "label {label}: minimum word mass {} exceeds 1",
                format_rational(mass)
            ),
            Refusal::TooFewWords { label, mass } => write!(
                f,
                "label {label}: maximum word mass {} is below 1",
                format_rational(mass)
            ),
            Refusal::LabelBounds(e) => write!(f, "{e}"),
            Refusal::LowExceedsBound { low } => write!(
                f,
                "lower bound {} on expected cost exceeds the cost bound",
                format_rational(low)
            ),
        }
    }
}

// Built once per run; boxing would only add indirection.
#[allow(clippy::large_enum_variant)]
#[derive(Debug)]
pub enum ApproxOutcome {
    Improviser(ApproxImproviser),
    Refused(Refusal),
}

impl ApproxOutcome {
    pub fn improviser(self) -> Option<ApproxImproviser> {
        match self {
            ApproxOutcome::Improviser(i) => Some(i),
            ApproxOutcome::Refused(_) => None,
        }
    }
}

/// One draw: label, bucket and the trace bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxSample {
    pub label: usize,
    pub bucket: usize,
    pub x: Assignment,
}

pub struct ApproxImproviser {
    spec: Arc<CnfSpec>,
    derived: DerivedParams,
    plans: Vec<BucketEstimates>,
    label_marginals: Vec<Rational>,
    low: Rational,
    /// `(label, bucket, formula)` for every choice of positive probability.
    choices: Vec<(usize, usize, Formula)>,
    weights: Vec<BigUint>,
    total: BigUint,
    generator: Arc<dyn GeneratorOracle + Send + Sync>,
}

impl std::fmt::Debug for ApproxImproviser {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ApproxImproviser")
            .field("plans", &self.plans)
            .field("label_marginals", &self.label_marginals)
            .field("low", &self.low)
            .finish_non_exhaustive()
    }
}

/// Runs the bucketed greedy construction for every label (concurrently),
/// then the label construction, and returns a sampler unless some phase
/// certifies infeasibility.
pub fn build_approx_improviser(
    spec: &CnfSpec,
    bounds: &LqciParams,
    params: &ApproxParams,
    counter: &(dyn CounterOracle + Sync),
    generator: Arc<dyn GeneratorOracle + Send + Sync>,
) -> Result<ApproxOutcome, ApproxError> {
    spec.validate()?;
    bounds.validate()?;
    if bounds.num_labels() != spec.labels {
        return Err(ApproxError::LabelCount {
            spec: spec.labels,
            params: bounds.num_labels(),
        });
    }
    let derived = params.derive(spec.labels, spec.y.len())?;

    let outcomes: Vec<Result<BucketOutcome, OracleError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..spec.labels)
            .map(|i| {
                let derived = &derived;
                scope.spawn(move || {
                    approximate_greedy_cost(
                        spec,
                        i,
                        &bounds.alpha[i],
                        &bounds.beta[i],
                        &derived.plan,
                        &derived.tau,
                        &derived.d,
                        counter,
                    )
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("label worker panicked"))
            .collect()
    });

    let mut plans = Vec::with_capacity(spec.labels);
    for (label, outcome) in outcomes.into_iter().enumerate() {
        match outcome? {
            BucketOutcome::Plan(p) => plans.push(p),
            BucketOutcome::TooManyWords { mass } => {
                return Ok(ApproxOutcome::Refused(Refusal::TooManyWords {
                    label,
                    mass,
                }))
            }
            BucketOutcome::TooFewWords { mass } => {
                return Ok(ApproxOutcome::Refused(Refusal::TooFewWords { label, mass }))
            }
        }
    }

    let los: Vec<Rational> = plans.iter().map(|p| p.lo.clone()).collect();
    let labels = match greedy_label_construction(&los, &bounds.lambda, &bounds.rho) {
        Ok(l) => l,
        Err(e) => return Ok(ApproxOutcome::Refused(Refusal::LabelBounds(e))),
    };
    let low: Rational = labels
        .marginals
        .iter()
        .zip(&los)
        .map(|(p, lo)| p * lo)
        .sum();
    if low > bounds.c {
        return Ok(ApproxOutcome::Refused(Refusal::LowExceedsBound { low }));
    }

    let mut choices = Vec::new();
    let mut probs = Vec::new();
    for (i, plan) in plans.iter().enumerate() {
        for (k, pk) in plan.probs.iter().enumerate() {
            let joint = &labels.marginals[i] * pk;
            if !joint.is_zero() {
                let (lo, hi) = &derived.plan.bounds[k];
                choices.push((i, k, spec.phi(i, lo, hi)));
                probs.push(joint);
            }
        }
    }
    let (weights, total) = integer_weights(&probs);
    Ok(ApproxOutcome::Improviser(ApproxImproviser {
        spec: Arc::new(spec.clone()),
        derived,
        plans,
        label_marginals: labels.marginals,
        low,
        choices,
        weights,
        total,
        generator,
    }))
}

impl ApproxImproviser {
    pub fn spec(&self) -> &CnfSpec {
        &self.spec
    }

    pub fn derived(&self) -> &DerivedParams {
        &self.derived
    }

    pub fn plans(&self) -> &[BucketEstimates] {
        &self.plans
    }

    pub fn label_marginals(&self) -> &[Rational] {
        &self.label_marginals
    }

    /// `sum_i P_i Lo_i`.
    pub fn low(&self) -> &Rational {
        &self.low
    }

    /// Exact probability of each `(label, bucket)` choice with positive mass.
    pub fn bucket_probabilities(&self) -> impl Iterator<Item = ((usize, usize), Rational)> + '_ {
        self.choices
            .iter()
            .zip(&self.weights)
            .map(|((i, k, _), w)| {
                (
                    (*i, *k),
                    Rational::new(w.clone().into(), self.total.clone().into()),
                )
            })
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Result<ApproxSample, OracleError> {
        let pick = categorical_with_total(&self.weights, &self.total, rng)
            .expect("distribution has positive mass");
        let (label, bucket, formula) = &self.choices[pick];
        let x = self
            .generator
            .sample(formula, &self.derived.epsilon, rng)?
            .ok_or(OracleError::Inconsistent)?;
        Ok(ApproxSample {
            label: *label,
            bucket: *bucket,
            x,
        })
    }

    pub fn report(&self) -> ApproxReport {
        let text = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
        ApproxReport {
            r: format_rational(&self.derived.r),
            b: self.derived.plan.b,
            tau: format_rational(&self.derived.tau),
            epsilon: format_rational(&self.derived.epsilon),
            d: format_rational(&self.derived.d),
            buckets: self
                .derived
                .plan
                .bounds
                .iter()
                .map(|(lo, hi)| [lo.to_string(), hi.to_string()])
                .collect(),
            labels: self
                .plans
                .iter()
                .zip(&self.label_marginals)
                .map(|(p, m)| LabelReport {
                    marginal: format_rational(m),
                    counts: p.counts.iter().map(|c| c.to_string()).collect(),
                    probs: text(&p.probs),
                    lo: format_rational(&p.lo),
                })
                .collect(),
            low: format_rational(&self.low),
            low_approx: rational::to_f64(&self.low),
        }
    }
}

/// Serializable summary of an approximate improviser.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    pub r: String,
    pub b: usize,
    pub tau: String,
    pub epsilon: String,
    pub d: String,
    pub buckets: Vec<[String; 2]>,
    pub labels: Vec<LabelReport>,
    pub low: String,
    pub low_approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelReport {
    pub marginal: String,
    pub counts: Vec<String>,
    pub probs: Vec<String>,
    pub lo: String,
}

/// Exact output distribution of an improviser whose generator is exactly
/// uniform, computed by enumerating every bucket formula with `oracle`.
pub fn enumerate_distribution(
    improviser: &ApproxImproviser,
    oracle: &ExactEnumerationOracle,
) -> Result<BTreeMap<Assignment, Rational>, OracleError> {
    let width = improviser.spec.x.len();
    let mut out: BTreeMap<Assignment, Rational> = BTreeMap::new();
    for (((_, _, formula), _), (_, p)) in improviser
        .choices
        .iter()
        .zip(&improviser.weights)
        .zip(improviser.bucket_probabilities())
    {
        let models = oracle.models(formula)?;
        if models.is_empty() {
            return Err(OracleError::Inconsistent);
        }
        let each = p / Rational::from_integer(models.len().into());
        for &m in models.iter() {
            *out.entry(unpack(m, width)).or_insert_with(Rational::zero) += &each;
        }
    }
    Ok(out)
}
