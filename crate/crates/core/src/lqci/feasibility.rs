use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::distribution::{combine, ImprovisingDistributionSpec};
use super::greedy::{greedy_cost_construction, greedy_label_construction, GreedyError};
use super::params::LqciParams;
use super::table::CostClassTable;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfeasibleReason {
    /// `|Omega| < 1/rho`
    LabelCountVsRho,
    /// `|Omega| > 1/lambda`
    LabelCountVsLambda,
    /// `|I_i| < 1/beta_i`
    ClassTooSmallForBeta,
    /// `|I_i| > 1/alpha_i`
    ClassTooBigForAlpha,
    /// The greedy (minimum) expected cost exceeds `c`.
    MinCostExceedsBound,
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Infeasibility {
    pub reason: InfeasibleReason,
    /// Offending label index for the per-label conditions.
    pub label: Option<usize>,
    /// Minimum achievable expected cost, for `MinCostExceedsBound`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_cost: Option<String>,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.reason)?;
        if let Some(label) = self.label {
            write!(f, " (label index {label})")?;
        }
        if let Some(cost) = &self.min_cost {
            write!(f, " (minimum expected cost {cost})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum FeasibilityReport {
    Feasible(ImprovisingDistributionSpec),
    Infeasible(Infeasibility),
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityReport::Feasible(_))
    }

    pub fn spec(&self) -> Option<&ImprovisingDistributionSpec> {
        match self {
            FeasibilityReport::Feasible(spec) => Some(spec),
            FeasibilityReport::Infeasible(_) => None,
        }
    }

    pub fn reason(&self) -> Option<InfeasibleReason> {
        match self {
            FeasibilityReport::Feasible(_) => None,
            FeasibilityReport::Infeasible(i) => Some(i.reason),
        }
    }
}

fn infeasible(reason: InfeasibleReason, label: Option<usize>) -> FeasibilityReport {
    FeasibilityReport::Infeasible(Infeasibility {
        reason,
        label,
        min_cost: None,
    })
}

/// Decides feasibility exactly and, when feasible, returns the greedy
/// (minimum expected cost) improvising distribution.
///
/// `params` and `table` must describe the same label set, in the same order.
pub fn feasibility_check(params: &LqciParams, table: &CostClassTable) -> FeasibilityReport {
    assert_eq!(
        params.num_labels(),
        table.num_labels(),
        "parameter and table label counts differ"
    );
    let one = Rational::one();
    let labels = rational::from_u64(table.num_labels() as u64);
    if &params.rho * &labels < one {
        return infeasible(InfeasibleReason::LabelCountVsRho, None);
    }
    if &params.lambda * &labels > one {
        return infeasible(InfeasibleReason::LabelCountVsLambda, None);
    }
    for label in 0..table.num_labels() {
        let size = rational::from_biguint(&table.label_total(label));
        if &params.beta[label] * &size < one {
            return infeasible(InfeasibleReason::ClassTooSmallForBeta, Some(label));
        }
        if !params.alpha[label].is_zero() && &params.alpha[label] * &size > one {
            return infeasible(InfeasibleReason::ClassTooBigForAlpha, Some(label));
        }
    }

    let mut per_label = Vec::with_capacity(table.num_labels());
    for label in 0..table.num_labels() {
        match greedy_cost_construction(
            &table.classes_for(label),
            &params.alpha[label],
            &params.beta[label],
        ) {
            Ok(d) => per_label.push(d),
            Err(e) => return infeasible(reason_for(&e), Some(label)),
        }
    }
    let costs: Vec<Rational> = per_label.iter().map(|d| d.expected_cost.clone()).collect();
    let marginal = match greedy_label_construction(&costs, &params.lambda, &params.rho) {
        Ok(m) => m,
        Err(e) => return infeasible(reason_for(&e), None),
    };
    let spec = combine(table, &marginal, &per_label);
    if spec.expected_cost > params.c {
        return FeasibilityReport::Infeasible(Infeasibility {
            reason: InfeasibleReason::MinCostExceedsBound,
            label: None,
            min_cost: Some(rational::format_rational(&spec.expected_cost)),
        });
    }
    FeasibilityReport::Feasible(spec)
}

fn reason_for(err: &GreedyError) -> InfeasibleReason {
    match err {
        GreedyError::AlphaTooLarge { .. } => InfeasibleReason::ClassTooBigForAlpha,
        GreedyError::AlphaBetaMismatch { product } if product > &Rational::one() => {
            InfeasibleReason::ClassTooBigForAlpha
        }
        GreedyError::BetaTooSmall { .. }
        | GreedyError::AlphaBetaMismatch { .. }
        | GreedyError::InvalidBounds => InfeasibleReason::ClassTooSmallForBeta,
        GreedyError::RhoTooSmall { .. } => InfeasibleReason::LabelCountVsRho,
        GreedyError::LambdaTooLarge { .. } => InfeasibleReason::LabelCountVsLambda,
    }
}
