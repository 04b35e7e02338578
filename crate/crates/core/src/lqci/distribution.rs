use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::greedy::{ClassDistribution, LabelDistribution};
use super::table::CostClassTable;
use crate::rational::{self, Rational};

/// A distribution over cost classes: a label marginal plus, per label, the
/// probability of each whole class. Words inside a class are uniform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImprovisingDistributionSpec {
    pub labels: Vec<u64>,
    #[serde(with = "rational::exact::vec")]
    pub costs: Vec<Rational>,
    /// `D^(i)`
    #[serde(with = "rational::exact::vec")]
    pub label_marginals: Vec<Rational>,
    /// `D_i(I_{i,k})`, rows aligned with `labels`, columns with `costs`.
    #[serde(with = "rational::exact::matrix")]
    pub class_probs: Vec<Vec<Rational>>,
    /// `E_i`, the expected cost conditioned on each label.
    #[serde(with = "rational::exact::vec")]
    pub label_expected_costs: Vec<Rational>,
    #[serde(with = "rational::exact")]
    pub expected_cost: Rational,
    pub diagnostics: GreedyDiagnostics,
}

/// Where the greedy phases overflowed; empty for distributions that did
/// not come from the greedy construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyDiagnostics {
    /// `o_i` per label (`None` in the forced case).
    pub overflow_counts: Vec<Option<String>>,
    /// Overflow class index per label.
    pub overflow_classes: Vec<Option<usize>>,
    /// `u`, the number of labels receiving `rho`.
    pub saturated_labels: Option<String>,
    pub overflow_label: Option<usize>,
}

impl ImprovisingDistributionSpec {
    /// Probability of the whole class `(i, k)`: `D^(i) * D_i(I_{i,k})`.
    pub fn joint(&self, label: usize, cost: usize) -> Rational {
        &self.label_marginals[label] * &self.class_probs[label][cost]
    }

    pub fn joint_matrix(&self) -> Vec<Vec<Rational>> {
        (0..self.labels.len())
            .map(|i| (0..self.costs.len()).map(|k| self.joint(i, k)).collect())
            .collect()
    }

    /// Probability of a single word in class `(i, k)`, or zero for an empty class.
    pub fn word_probability(&self, label: usize, cost: usize, size: &BigUint) -> Rational {
        if size.is_zero() {
            return Rational::zero();
        }
        self.joint(label, cost) / rational::from_biguint(size)
    }

    /// Conditional probability of one word within its label.
    pub fn word_conditional(&self, label: usize, cost: usize, size: &BigUint) -> Rational {
        if size.is_zero() {
            return Rational::zero();
        }
        &self.class_probs[label][cost] / rational::from_biguint(size)
    }

    /// Builds a spec from joint class probabilities `D(i,k)` (used by the
    /// maximum-entropy solver, whose output is not a greedy distribution).
    pub fn from_joint(table: &CostClassTable, joint: &[Vec<Rational>]) -> Self {
        let label_marginals: Vec<Rational> = joint.iter().map(|row| row.iter().sum()).collect();
        let class_probs: Vec<Vec<Rational>> = joint
            .iter()
            .zip(&label_marginals)
            .map(|(row, m)| {
                row.iter()
                    .map(|p| if m.is_zero() { Rational::zero() } else { p / m })
                    .collect()
            })
            .collect();
        let label_expected_costs: Vec<Rational> = class_probs
            .iter()
            .map(|row| row.iter().zip(&table.costs).map(|(p, c)| p * c).sum())
            .collect();
        let expected_cost = label_marginals
            .iter()
            .zip(&label_expected_costs)
            .map(|(m, e)| m * e)
            .sum();
        ImprovisingDistributionSpec {
            labels: table.labels.clone(),
            costs: table.costs.clone(),
            label_marginals,
            class_probs,
            label_expected_costs,
            expected_cost,
            diagnostics: GreedyDiagnostics::default(),
        }
    }

    /// Checks the distribution axioms exactly: marginals sum to one, every
    /// label with positive mass has conditionals summing to one, and every
    /// probability lies in `[0, 1]`.
    pub fn is_normalized(&self) -> bool {
        let one = Rational::one();
        let marginal_sum: Rational = self.label_marginals.iter().sum();
        marginal_sum == one
            && self
                .label_marginals
                .iter()
                .zip(&self.class_probs)
                .all(|(m, row)| {
                    row.iter().all(rational::is_probability)
                        && (m.is_zero() || row.iter().sum::<Rational>() == one)
                })
    }
}

/// Joins the label marginal with per-label class distributions.
pub fn combine(
    table: &CostClassTable,
    marginal: &LabelDistribution,
    per_label: &[ClassDistribution],
) -> ImprovisingDistributionSpec {
    let label_expected_costs: Vec<Rational> =
        per_label.iter().map(|d| d.expected_cost.clone()).collect();
    let expected_cost = marginal
        .marginals
        .iter()
        .zip(&label_expected_costs)
        .map(|(m, e)| m * e)
        .sum();
    ImprovisingDistributionSpec {
        labels: table.labels.clone(),
        costs: table.costs.clone(),
        label_marginals: marginal.marginals.clone(),
        class_probs: per_label.iter().map(|d| d.probs.clone()).collect(),
        label_expected_costs,
        expected_cost,
        diagnostics: GreedyDiagnostics {
            overflow_counts: per_label
                .iter()
                .map(|d| d.overflow_count.as_ref().map(rational::format_rational))
                .collect(),
            overflow_classes: per_label.iter().map(|d| d.overflow_class).collect(),
            saturated_labels: marginal.saturated.as_ref().map(BigInt::to_string),
            overflow_label: marginal.overflow_label,
        },
    }
}
