//! One product automaton that answers counting and sampling queries for
//! every (label, cost) class at once.
//!
//! Instead of building a separate automaton per cost class, the count
//! table stores, for each state and remaining length, how many suffixes end
//! in each `(label, cost still to accumulate)` bucket. A class query then
//! reads a single entry, and uniform sampling inside a class walks the same
//! table while subtracting weights along the way.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;

use super::{product_with_pairs, AutomataError, Dfa, StateOutputDfa, WeightedDfa, Word};
use crate::sampling::categorical;

/// `(label output, cost)` identifying a cost class.
pub type ClassKey = (u64, u64);

/// How costs are read off the cost automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMode<'a> {
    /// Cost is the output of the run's final state.
    Output(&'a StateOutputDfa),
    /// Cost is the sum of the weights of all visited states.
    Accumulated(&'a WeightedDfa),
}

#[derive(Debug, Clone)]
pub struct GradedAutomaton {
    dfa: Dfa,
    label: Vec<u64>,
    /// Weight added when a state is entered (also charged for the initial state).
    weight: Vec<u64>,
    /// Cost added at the final state.
    final_cost: Vec<u64>,
}

impl GradedAutomaton {
    /// Reachable product of the hard, label and cost automata. Acceptance
    /// comes from `hard` alone.
    pub fn build(
        hard: &Dfa,
        label: &StateOutputDfa,
        cost: CostMode<'_>,
    ) -> Result<Self, AutomataError> {
        let (with_label, label_pairs) = product_with_pairs(hard, &label.dfa)?;
        let cost_dfa = match cost {
            CostMode::Output(s) => &s.dfa,
            CostMode::Accumulated(w) => &w.dfa,
        };
        let (dfa, cost_pairs) = product_with_pairs(&with_label, cost_dfa)?;
        let mut labels = Vec::with_capacity(dfa.num_states());
        let mut weight = Vec::with_capacity(dfa.num_states());
        let mut final_cost = Vec::with_capacity(dfa.num_states());
        let mut accepting = Vec::with_capacity(dfa.num_states());
        for &(p, c) in &cost_pairs {
            let (h, l) = label_pairs[p];
            accepting.push(hard.is_accepting(h));
            labels.push(label.outputs[l]);
            match cost {
                CostMode::Output(s) => {
                    weight.push(0);
                    final_cost.push(s.outputs[c]);
                }
                CostMode::Accumulated(w) => {
                    weight.push(w.weights[c]);
                    final_cost.push(0);
                }
            }
        }
        Ok(GradedAutomaton {
            dfa: dfa.with_accepting(accepting),
            label: labels,
            weight,
            final_cost,
        })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn num_states(&self) -> usize {
        self.dfa.num_states()
    }

    /// Label and cost of a word, or `None` if the hard automaton rejects it.
    pub fn classify(&self, word: &[usize]) -> Option<ClassKey> {
        let mut q = self.dfa.initial();
        let mut cost = self.weight[q];
        for &a in word {
            q = self.dfa.step(q, a);
            cost += self.weight[q];
        }
        self.dfa
            .is_accepting(q)
            .then(|| (self.label[q], cost + self.final_cost[q]))
    }
}

/// Per `(remaining length, state)`: counts of accepted suffixes by
/// `(label, cost accumulated after the current state)`.
#[derive(Debug, Clone)]
pub struct GradedCountTable {
    automaton: GradedAutomaton,
    by_length: Vec<Vec<BTreeMap<ClassKey, BigUint>>>,
}

impl GradedCountTable {
    pub fn build(automaton: GradedAutomaton, depth: usize) -> Self {
        let a = &automaton;
        let states = a.num_states();
        let base: Vec<BTreeMap<ClassKey, BigUint>> = (0..states)
            .map(|q| {
                let mut m = BTreeMap::new();
                if a.dfa.is_accepting(q) {
                    m.insert((a.label[q], a.final_cost[q]), BigUint::from(1u32));
                }
                m
            })
            .collect();
        let mut by_length = vec![base];
        for s in 1..=depth {
            let prev = &by_length[s - 1];
            let row: Vec<BTreeMap<ClassKey, BigUint>> = (0..states)
                .map(|q| {
                    let mut m: BTreeMap<ClassKey, BigUint> = BTreeMap::new();
                    for &t in a.dfa.successors(q) {
                        let w = a.weight[t];
                        for (&(l, c), cnt) in &prev[t] {
                            *m.entry((l, c + w)).or_default() += cnt;
                        }
                    }
                    m
                })
                .collect();
            by_length.push(row);
        }
        GradedCountTable {
            automaton,
            by_length,
        }
    }

    pub fn automaton(&self) -> &GradedAutomaton {
        &self.automaton
    }

    pub fn depth(&self) -> usize {
        self.by_length.len() - 1
    }

    fn suffixes(&self, state: usize, remaining: usize, label: u64, residual: u64) -> BigUint {
        self.by_length[remaining][state]
            .get(&(label, residual))
            .cloned()
            .unwrap_or_default()
    }

    /// Words of length `len` in class `(label, cost)`.
    pub fn class_count_at(&self, (label, cost): ClassKey, len: usize) -> BigUint {
        let q0 = self.automaton.dfa.initial();
        match cost.checked_sub(self.automaton.weight[q0]) {
            Some(residual) => self.suffixes(q0, len, label, residual),
            None => BigUint::zero(),
        }
    }

    pub fn class_count(&self, key: ClassKey, m: usize, n: usize) -> BigUint {
        (m..=n).map(|len| self.class_count_at(key, len)).sum()
    }

    /// Every class with at least one word of length in `m..=n`, with its size.
    pub fn classes(&self, m: usize, n: usize) -> BTreeMap<ClassKey, BigUint> {
        let q0 = self.automaton.dfa.initial();
        let w0 = self.automaton.weight[q0];
        let mut out: BTreeMap<ClassKey, BigUint> = BTreeMap::new();
        for len in m..=n {
            for (&(l, c), cnt) in &self.by_length[len][q0] {
                *out.entry((l, c + w0)).or_default() += cnt;
            }
        }
        out
    }

    /// Uniform draw from class `key` restricted to lengths `m..=n`.
    pub fn sample_class<R: Rng + ?Sized>(
        &self,
        key: ClassKey,
        m: usize,
        n: usize,
        rng: &mut R,
    ) -> Result<Word, AutomataError> {
        let a = &self.automaton;
        let lengths: Vec<BigUint> = (m..=n).map(|len| self.class_count_at(key, len)).collect();
        let len = m + categorical(&lengths, rng).ok_or(AutomataError::EmptyLanguage)?;
        let (label, cost) = key;
        let mut state = a.dfa.initial();
        let mut residual = cost - a.weight[state];
        let mut word = Vec::with_capacity(len);
        for remaining in (1..=len).rev() {
            let weights: Vec<BigUint> = a
                .dfa
                .successors(state)
                .iter()
                .map(|&t| match residual.checked_sub(a.weight[t]) {
                    Some(r) => self.suffixes(t, remaining - 1, label, r),
                    None => BigUint::zero(),
                })
                .collect();
            let sym = categorical(&weights, rng).expect("positive count has a continuation");
            state = a.dfa.step(state, sym);
            residual -= a.weight[state];
            word.push(sym);
        }
        debug_assert_eq!(a.classify(&word), Some(key));
        Ok(word)
    }

    /// All words of class `key` with length in `m..=n`, in length-then-
    /// lexicographic order. Only for small classes.
    pub fn enumerate_class(&self, key: ClassKey, m: usize, n: usize) -> Vec<Word> {
        let a = &self.automaton;
        let q0 = a.dfa.initial();
        let mut out = Vec::new();
        let Some(residual) = key.1.checked_sub(a.weight[q0]) else {
            return out;
        };
        for len in m..=n {
            let mut prefix = Vec::with_capacity(len);
            self.walk(q0, len, key.0, residual, &mut prefix, &mut out);
        }
        out
    }

    fn walk(
        &self,
        state: usize,
        remaining: usize,
        label: u64,
        residual: u64,
        prefix: &mut Word,
        out: &mut Vec<Word>,
    ) {
        if self.suffixes(state, remaining, label, residual).is_zero() {
            return;
        }
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let a = &self.automaton;
        for (sym, &t) in a.dfa.successors(state).iter().enumerate() {
            if let Some(r) = residual.checked_sub(a.weight[t]) {
                prefix.push(sym);
                self.walk(t, remaining - 1, label, r, prefix, out);
                prefix.pop();
            }
        }
    }
}
