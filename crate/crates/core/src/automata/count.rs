use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use super::{AutomataError, Dfa, Word};
use crate::sampling::categorical;

/// `count(q, s)`: number of length-`s` suffixes leading from `q` to acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    /// `by_length[s][q]`
    by_length: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn build(dfa: &Dfa, depth: usize) -> Self {
        let states = dfa.num_states();
        let mut by_length = Vec::with_capacity(depth + 1);
        let base: Vec<BigUint> = (0..states)
            .map(|q| {
                if dfa.is_accepting(q) {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            })
            .collect();
        by_length.push(base);
        for s in 1..=depth {
            let prev: &Vec<BigUint> = &by_length[s - 1];
            let row: Vec<BigUint> = (0..states)
                .map(|q| dfa.successors(q).iter().map(|&t| &prev[t]).sum())
                .collect();
            by_length.push(row);
        }
        CountTable { by_length }
    }

    pub fn depth(&self) -> usize {
        self.by_length.len() - 1
    }

    pub fn get(&self, state: usize, remaining: usize) -> &BigUint {
        &self.by_length[remaining][state]
    }
}

/// Number of accepted words of each length `m..=n`.
pub fn count_words(dfa: &Dfa, m: usize, n: usize) -> Vec<BigUint> {
    assert!(m <= n, "length bounds out of order");
    let table = CountTable::build(dfa, n);
    (m..=n)
        .map(|len| table.get(dfa.initial(), len).clone())
        .collect()
}

/// Draws a word uniformly from the accepted words with length in `m..=n`:
/// a length proportional to its count, then symbols one at a time weighted
/// by the number of accepted completions.
pub fn sample_uniform<R: Rng + ?Sized>(
    dfa: &Dfa,
    m: usize,
    n: usize,
    table: &CountTable,
    rng: &mut R,
) -> Result<Word, AutomataError> {
    if table.depth() < n {
        return Err(AutomataError::TableTooShallow {
            depth: table.depth(),
            needed: n,
        });
    }
    let lengths: Vec<BigUint> = (m..=n)
        .map(|len| table.get(dfa.initial(), len).clone())
        .collect();
    let len = m + categorical(&lengths, rng).ok_or(AutomataError::EmptyLanguage)?;
    let mut word = Vec::with_capacity(len);
    let mut state = dfa.initial();
    for remaining in (1..=len).rev() {
        let weights: Vec<BigUint> = dfa
            .successors(state)
            .iter()
            .map(|&t| table.get(t, remaining - 1).clone())
            .collect();
        let sym = categorical(&weights, rng).expect("positive count has a continuation");
        word.push(sym);
        state = dfa.step(state, sym);
    }
    debug_assert!(dfa.is_accepting(state));
    Ok(word)
}
