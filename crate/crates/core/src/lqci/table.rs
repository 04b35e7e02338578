use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("costs must be strictly increasing")]
    CostsNotIncreasing,
    #[error("size matrix is {rows}x{cols}, expected {labels}x{costs}")]
    Shape {
        rows: usize,
        cols: usize,
        labels: usize,
        costs: usize,
    },
}

/// Sizes of every cost class `I_{i,k}`: rows are labels, columns are the
/// possible costs in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostClassTable {
    /// Label identifiers as emitted by the label specification.
    pub labels: Vec<u64>,
    #[serde(with = "rational::text::vec")]
    pub costs: Vec<Rational>,
    #[serde(with = "rational::count_matrix")]
    pub sizes: Vec<Vec<BigUint>>,
}

impl CostClassTable {
    pub fn new(
        labels: Vec<u64>,
        costs: Vec<Rational>,
        sizes: Vec<Vec<BigUint>>,
    ) -> Result<Self, TableError> {
        if costs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TableError::CostsNotIncreasing);
        }
        let shape_ok = sizes.len() == labels.len() && sizes.iter().all(|r| r.len() == costs.len());
        if !shape_ok {
            return Err(TableError::Shape {
                rows: sizes.len(),
                cols: sizes.first().map_or(0, Vec::len),
                labels: labels.len(),
                costs: costs.len(),
            });
        }
        Ok(CostClassTable {
            labels,
            costs,
            sizes,
        })
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn num_costs(&self) -> usize {
        self.costs.len()
    }

    pub fn size(&self, label: usize, cost: usize) -> &BigUint {
        &self.sizes[label][cost]
    }

    /// `|I_i|`, the number of improvisations carrying label `i`.
    pub fn label_total(&self, label: usize) -> BigUint {
        self.sizes[label].iter().sum()
    }

    /// `|I|`, the number of improvisations.
    pub fn total(&self) -> BigUint {
        self.sizes.iter().flatten().sum()
    }

    /// The (cost, size) list for one label in increasing cost order.
    pub fn classes_for(&self, label: usize) -> Vec<super::CostClass> {
        self.costs
            .iter()
            .zip(&self.sizes[label])
            .map(|(cost, size)| super::CostClass {
                cost: cost.clone(),
                size: size.clone(),
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.iter().flatten().all(Zero::is_zero)
    }
}
