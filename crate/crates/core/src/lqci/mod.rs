//! Exact-rational LQCI data model and the greedy construction.
//!
//! An instance asks for a distribution over words that (1) only emits words
//! satisfying the hard specification, (2) keeps expected cost at most `c`,
//! (3) gives every label marginal mass in `[lambda, rho]` and (4) gives every
//! word a conditional probability in `[alpha_i, beta_i]` within its label.
//! Everything here works at the level of cost classes: words sharing a label
//! and a cost are interchangeable, so a class only needs its size.

mod distribution;
mod feasibility;
mod greedy;
mod params;
mod table;

pub use distribution::{combine, ImprovisingDistributionSpec};
pub use feasibility::{feasibility_check, FeasibilityReport, Infeasibility, InfeasibleReason};
pub use greedy::{
    greedy_cost_construction, greedy_label_construction, ClassDistribution, CostClass, GreedyError,
    LabelDistribution,
};
pub use params::{LqciParams, ParamsError};
pub use table::{CostClassTable, TableError};
