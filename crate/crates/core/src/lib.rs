//! Labelled quantitative control improvisation.
//!
//! Given a hard specification, a label function, a cost function, length
//! bounds, an expected-cost bound and randomness bounds, this crate decides
//! feasibility, builds the minimum-cost (greedy) or maximum-entropy
//! improvising distribution, and samples words from it.
//!
//! * [`lqci`]: exact data model, greedy construction, feasibility.
//! * [`automata`]: DFA products, counting and uniform sampling.
//! * [`exact_scheme`]: improvisers for DFA specifications.
//! * [`approx`]: CNF specifications with counting/sampling oracles.
//! * [`maxent`]: the maximum-entropy variant.
//! * [`gridworld`]: grid-map path planning encoded as DFAs.

pub mod approx;
pub mod automata;
pub mod exact_scheme;
pub mod gridworld;
pub mod lqci;
pub mod maxent;
pub mod rational;
pub mod sampling;

pub use automata::{Dfa, StateOutputDfa, WeightedDfa, Word};
pub use lqci::{
    feasibility_check, CostClassTable, FeasibilityReport, ImprovisingDistributionSpec,
    InfeasibleReason, LqciParams,
};
pub use rational::Rational;
