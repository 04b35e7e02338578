//! Exhaustive enumeration over words.

use std::collections::BTreeMap;

use improv_core::automata::{Dfa, StateOutputDfa, WeightedDfa, Word};
use improv_core::exact_scheme::{CostSpec, DfaInstance};

/// Every word over `symbols` letters with length in `m..=n`, shortest first.
pub fn all_words(symbols: usize, m: usize, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer: Vec<Word> = vec![Vec::new()];
    for len in 0..=n {
        if len >= m {
            out.extend(layer.iter().cloned());
        }
        if len == n {
            break;
        }
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..symbols).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

/// Final state of a run, stepping the transition table by hand.
pub fn final_state(dfa: &Dfa, word: &[usize]) -> usize {
    word.iter()
        .fold(dfa.initial(), |q, &a| dfa.successors(q)[a])
}

pub fn accepts(dfa: &Dfa, word: &[usize]) -> bool {
    dfa.is_accepting(final_state(dfa, word))
}

pub fn output(s: &StateOutputDfa, word: &[usize]) -> u64 {
    s.outputs[final_state(&s.dfa, word)]
}

/// Sum of the weights of every visited state, the initial one included.
pub fn accumulated(w: &WeightedDfa, word: &[usize]) -> u64 {
    let mut q = w.dfa.initial();
    let mut total = w.weights[q];
    for &a in word {
        q = w.dfa.successors(q)[a];
        total += w.weights[q];
    }
    total
}

pub fn cost(spec: &CostSpec, word: &[usize]) -> u64 {
    match spec {
        CostSpec::Output(s) => output(s, word),
        CostSpec::Accumulated(w) => accumulated(w, word),
    }
}

/// Improvisations of the instance with their label output and cost.
pub fn improvisations(instance: &DfaInstance) -> Vec<(Word, u64, u64)> {
    let p = &instance.params;
    all_words(instance.hard.num_symbols(), p.m, p.n)
        .into_iter()
        .filter(|w| accepts(&instance.hard, w))
        .map(|w| {
            let l = output(&instance.label, &w);
            let c = cost(&instance.cost, &w);
            (w, l, c)
        })
        .collect()
}

/// `(label output, cost) -> count` over all improvisations.
pub fn class_counts(instance: &DfaInstance) -> BTreeMap<(u64, u64), u64> {
    let mut out = BTreeMap::new();
    for (_, l, c) in improvisations(instance) {
        *out.entry((l, c)).or_default() += 1;
    }
    out
}

/// Words of each length accepted by `dfa`, for lengths `0..=n`.
pub fn count_by_length(dfa: &Dfa, n: usize) -> Vec<u64> {
    let mut out = vec![0u64; n + 1];
    for w in all_words(dfa.num_symbols(), 0, n) {
        if accepts(dfa, &w) {
            out[w.len()] += 1;
        }
    }
    out
}
