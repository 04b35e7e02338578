//! Exact improvisers for DFA specifications.
//!
//! Three operations are enough to run the greedy construction and sample
//! from it without enumerating words: list the possible costs, count each
//! (label, cost) class, and sample uniformly inside a class. With
//! state-output or accumulated-weight cost automata all three come from one
//! graded count table over the product automaton.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::automata::{
    possible_costs, AutomataError, ClassKey, CostMode, Dfa, DfaJson, GradedAutomaton,
    GradedCountTable, StateOutputDfa, WeightedDfa, Word,
};
use crate::lqci::{
    feasibility_check, CostClassTable, FeasibilityReport, ImprovisingDistributionSpec,
    Infeasibility, LqciParams, ParamsError,
};
use crate::rational::{self, Rational};
use crate::sampling::{categorical_with_total, integer_weights};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("cost range {needed} exceeds the configured budget {cap}")]
    BudgetExceeded { needed: u128, cap: u64 },
    #[error("some improvisation has label output {0}, which is not a declared label")]
    UndeclaredLabel(u64),
    #[error("declared {declared} labels but {bounds} word-bound pairs")]
    LabelCount { declared: usize, bounds: usize },
    #[error("infeasible: {0}")]
    Infeasible(Infeasibility),
    #[error("{count} words exceed the enumeration cap {cap}")]
    TooManyWords { count: BigUint, cap: u64 },
}

/// Cost specification: a state-output automaton or a weighted automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostSpec {
    Output(StateOutputDfa),
    Accumulated(WeightedDfa),
}

impl CostSpec {
    fn mode(&self) -> CostMode<'_> {
        match self {
            CostSpec::Output(s) => CostMode::Output(s),
            CostSpec::Accumulated(w) => CostMode::Accumulated(w),
        }
    }
}

/// An LQCI instance whose specifications are automata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfaInstance {
    pub hard: Dfa,
    pub label: StateOutputDfa,
    pub cost: CostSpec,
    /// Label outputs making up the label set, in order.
    pub labels: Vec<u64>,
    pub params: LqciParams,
}

impl DfaInstance {
    pub fn validate(&self) -> Result<(), SchemeError> {
        self.params.validate()?;
        if self.labels.len() != self.params.num_labels() {
            return Err(SchemeError::LabelCount {
                declared: self.labels.len(),
                bounds: self.params.num_labels(),
            });
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &[String] {
        self.hard.alphabet()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeOptions {
    /// Cap on `M * (n + 1)` for weighted cost automata.
    pub cost_budget: u64,
    /// Cap on the number of words [`exact_word_distribution`] will list.
    pub enumeration_cap: u64,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions {
            cost_budget: 10_000,
            enumeration_cap: 100_000,
        }
    }
}

/// Cost class sizes together with the count table that samples them.
#[derive(Debug, Clone)]
pub struct ClassIndex {
    pub table: CostClassTable,
    counts: GradedCountTable,
    /// Integer value of each entry of `table.costs`.
    cost_values: Vec<u64>,
    m: usize,
    n: usize,
}

impl ClassIndex {
    pub fn key(&self, label: usize, cost: usize) -> ClassKey {
        (self.table.labels[label], self.cost_values[cost])
    }

    pub fn lengths(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn alphabet(&self) -> &[String] {
        self.counts.automaton().dfa().alphabet()
    }

    pub fn counts(&self) -> &GradedCountTable {
        &self.counts
    }

    /// Label and cost index of a word, if it is an improvisation.
    pub fn classify(&self, word: &[usize]) -> Option<(usize, usize)> {
        if word.len() < self.m || word.len() > self.n {
            return None;
        }
        let (label, cost) = self.counts.automaton().classify(word)?;
        let i = self.table.labels.iter().position(|&l| l == label)?;
        let k = self.cost_values.binary_search(&cost).ok()?;
        Some((i, k))
    }

    pub fn sample_class<R: Rng + ?Sized>(
        &self,
        label: usize,
        cost: usize,
        rng: &mut R,
    ) -> Result<Word, AutomataError> {
        self.counts
            .sample_class(self.key(label, cost), self.m, self.n, rng)
    }

    pub fn enumerate_class(&self, label: usize, cost: usize) -> Vec<Word> {
        self.counts
            .enumerate_class(self.key(label, cost), self.m, self.n)
    }
}

/// Computes the possible costs and every class size `|I_{i,k}|`.
pub fn build_cost_class_table(
    hard: &Dfa,
    label: &StateOutputDfa,
    cost: &CostSpec,
    labels: &[u64],
    m: usize,
    n: usize,
    options: &SchemeOptions,
) -> Result<ClassIndex, SchemeError> {
    if let CostSpec::Accumulated(w) = cost {
        let needed = u128::from(w.max_weight()) * (n as u128 + 1);
        if needed > u128::from(options.cost_budget) {
            return Err(SchemeError::BudgetExceeded {
                needed,
                cap: options.cost_budget,
            });
        }
    }
    let automaton = GradedAutomaton::build(hard, label, cost.mode())?;
    let counts = GradedCountTable::build(automaton, n);
    let classes = counts.classes(m, n);
    if let Some(&(stray, _)) = classes.keys().find(|(l, _)| !labels.contains(l)) {
        return Err(SchemeError::UndeclaredLabel(stray));
    }
    let cost_values: Vec<u64> = match cost {
        // Cost automata accept everywhere by convention; only `hard` decides.
        CostSpec::Accumulated(w) => {
            let everywhere = WeightedDfa {
                dfa: w.dfa.with_accepting(vec![true; w.dfa.num_states()]),
                weights: w.weights.clone(),
            };
            possible_costs(&everywhere, hard, m, n)?
        }
        CostSpec::Output(_) => {
            let mut v: Vec<u64> = classes.keys().map(|&(_, c)| c).collect();
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    let sizes: Vec<Vec<BigUint>> = labels
        .iter()
        .map(|&l| {
            cost_values
                .iter()
                .map(|&c| classes.get(&(l, c)).cloned().unwrap_or_default())
                .collect()
        })
        .collect();
    let table = CostClassTable::new(
        labels.to_vec(),
        cost_values.iter().map(|&c| rational::from_u64(c)).collect(),
        sizes,
    )
    .expect("costs sorted and shape consistent");
    Ok(ClassIndex {
        table,
        counts,
        cost_values,
        m,
        n,
    })
}

/// Samples words by drawing a class with its exact joint probability, then
/// a uniform word inside it.
#[derive(Debug, Clone)]
pub struct Improviser {
    spec: ImprovisingDistributionSpec,
    index: Arc<ClassIndex>,
    classes: Vec<(usize, usize)>,
    weights: Vec<BigUint>,
    total: BigUint,
}

impl Improviser {
    /// Binds a class-level distribution to the class samplers. Every class
    /// with positive probability must be nonempty.
    pub fn new(spec: ImprovisingDistributionSpec, index: Arc<ClassIndex>) -> Self {
        let mut classes = Vec::new();
        let mut probs = Vec::new();
        for i in 0..spec.labels.len() {
            for k in 0..spec.costs.len() {
                let p = spec.joint(i, k);
                if !p.is_zero() {
                    assert!(
                        !index.table.size(i, k).is_zero(),
                        "positive probability on an empty class"
                    );
                    classes.push((i, k));
                    probs.push(p);
                }
            }
        }
        let (weights, total) = integer_weights(&probs);
        Improviser {
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

    pub fn index(&self) -> &ClassIndex {
        &self.index
    }

    pub fn alphabet(&self) -> &[String] {
        self.index.alphabet()
    }

    /// Exact probability of drawing each class with positive mass.
    pub fn class_probabilities(&self) -> impl Iterator<Item = ((usize, usize), Rational)> + '_ {
        self.classes.iter().zip(&self.weights).map(|(&c, w)| {
            (
                c,
                Rational::new(w.clone().into(), self.total.clone().into()),
            )
        })
    }

    pub fn sample_with_class<R: Rng + ?Sized>(&self, rng: &mut R) -> ((usize, usize), Word) {
        let pick = categorical_with_total(&self.weights, &self.total, rng)
            .expect("distribution has positive mass");
        let (i, k) = self.classes[pick];
        let word = self
            .index
            .sample_class(i, k, rng)
            .expect("class with positive mass is nonempty");
        ((i, k), word)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Word {
        self.sample_with_class(rng).1
    }
}

/// Builds the class table, decides feasibility, and binds the greedy
/// distribution to class samplers.
pub fn build_improviser(
    instance: &DfaInstance,
    options: &SchemeOptions,
) -> Result<Improviser, SchemeError> {
    instance.validate()?;
    let p = &instance.params;
    let index = build_cost_class_table(
        &instance.hard,
        &instance.label,
        &instance.cost,
        &instance.labels,
        p.m,
        p.n,
        options,
    )?;
    match feasibility_check(p, &index.table) {
        FeasibilityReport::Feasible(spec) => Ok(Improviser::new(spec, Arc::new(index))),
        FeasibilityReport::Infeasible(why) => Err(SchemeError::Infeasible(why)),
    }
}

/// Lists every word the improviser can emit with its exact probability.
pub fn exact_word_distribution(
    improviser: &Improviser,
    cap: u64,
) -> Result<BTreeMap<Word, Rational>, SchemeError> {
    let index = improviser.index();
    let count: BigUint = improviser
        .classes
        .iter()
        .map(|&(i, k)| index.table.size(i, k))
        .sum();
    if count > BigUint::from(cap) {
        return Err(SchemeError::TooManyWords { count, cap });
    }
    let mut out = BTreeMap::new();
    for ((i, k), p) in improviser.class_probabilities() {
        let size = index.table.size(i, k);
        let per_word = p / rational::from_biguint(size);
        for word in index.enumerate_class(i, k) {
            out.insert(word, per_word.clone());
        }
    }
    Ok(out)
}

/// JSON bundle for a DFA instance. Rationals are `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaInstanceJson {
    pub hard: DfaJson,
    pub label: DfaJson,
    pub cost: CostJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u64>>,
    #[serde(flatten)]
    pub params: LqciParams,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CostJson {
    Output(DfaJson),
    Accumulated(DfaJson),
}

impl DfaInstanceJson {
    pub fn to_instance(&self) -> Result<DfaInstance, SchemeError> {
        let cost = match &self.cost {
            CostJson::Output(d) => CostSpec::Output(d.to_output_dfa()?),
            CostJson::Accumulated(d) => CostSpec::Accumulated(d.to_weighted_dfa()?),
        };
        let labels = self
            .labels
            .clone()
            .unwrap_or_else(|| (0..self.params.num_labels() as u64).collect());
        let instance = DfaInstance {
            hard: self.hard.to_dfa()?,
            label: self.label.to_output_dfa()?,
            cost,
            labels,
            params: self.params.clone(),
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn from_instance(instance: &DfaInstance) -> Self {
        let default_labels: Vec<u64> = (0..instance.labels.len() as u64).collect();
        DfaInstanceJson {
            hard: DfaJson::from_dfa(&instance.hard),
            label: DfaJson::from_output_dfa(&instance.label),
            cost: match &instance.cost {
                CostSpec::Output(s) => CostJson::Output(DfaJson::from_output_dfa(s)),
                CostSpec::Accumulated(w) => CostJson::Accumulated(DfaJson::from_weighted_dfa(w)),
            },
            labels: (instance.labels != default_labels).then(|| instance.labels.clone()),
            params: instance.params.clone(),
        }
    }
}

/// The three-bit example: words of length 3 containing a 1, labelled by
/// parity of ones (label 1 odd, label 2 even), cost = binary value.
pub fn toy_instance(c: Rational) -> DfaInstance {
    let bits = vec!["0".to_string(), "1".to_string()];
    let hard = Dfa::new(
        bits.clone(),
        0,
        vec![false, true],
        vec![vec![0, 1], vec![1, 1]],
    )
    .expect("valid");
    let parity = Dfa::new(
        bits.clone(),
        0,
        vec![true, true],
        vec![vec![0, 1], vec![1, 0]],
    )
    .expect("valid");
    let label = StateOutputDfa::new(parity, vec![2, 1]).expect("valid");
    // value of the prefix read so far; 8 absorbs anything longer than 3 bits
    let rows: Vec<Vec<usize>> = (0..9usize)
        .map(|v| vec![(2 * v).min(8), (2 * v + 1).min(8)])
        .collect();
    let value = Dfa::new(bits, 0, vec![true; 9], rows).expect("valid");
    let cost = StateOutputDfa::new(value, (0..9).collect()).expect("valid");
    DfaInstance {
        hard,
        label,
        cost: CostSpec::Output(cost),
        labels: vec![1, 2],
        params: LqciParams {
            m: 3,
            n: 3,
            c,
            lambda: rational::ratio(1, 5),
            rho: rational::ratio(1, 1),
            alpha: vec![rational::ratio(1, 10); 2],
            beta: vec![rational::ratio(1, 2); 2],
        },
    }
}
