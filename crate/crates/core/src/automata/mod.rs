//! DFA machinery: product construction, per-length counting, exactly
//! uniform sampling, output restriction and accumulated-cost analysis.

mod count;
mod dfa;
mod graded;
mod ops;

pub use count::{count_words, sample_uniform, CountTable};
pub use dfa::{render_word, Dfa, DfaJson, StateOutputDfa, WeightedDfa, Word};
pub use graded::{ClassKey, CostMode, GradedAutomaton, GradedCountTable};
pub use ops::{cost_tracking_dfa, possible_costs, product, product_with_pairs, restrict_output};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomataError {
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("language is empty in the requested length range")]
    EmptyLanguage,
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("symbol `{0}` appears twice in the alphabet")]
    DuplicateSymbol(String),
    #[error("initial state {initial} is out of range for {states} states")]
    BadInitial { initial: usize, states: usize },
    #[error("state {state} does not have one transition per symbol")]
    PartialTransitions { state: usize },
    #[error("state {state} points to nonexistent state {target}")]
    BadTarget { state: usize, target: usize },
    #[error("{got} acceptance flags for {states} states")]
    AcceptingCount { got: usize, states: usize },
    #[error("{got} outputs for {states} states")]
    OutputCount { got: usize, states: usize },
    #[error("{got} weights for {states} states")]
    WeightCount { got: usize, states: usize },
    #[error("declared {declared} states but gave {rows} transition rows")]
    StateCount { declared: usize, rows: usize },
    #[error("missing `{0}`")]
    MissingField(&'static str),
    #[error("count table covers lengths up to {depth}, need {needed}")]
    TableTooShallow { depth: usize, needed: usize },
}
