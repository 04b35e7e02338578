//! Random instances.

use improv_core::approx::{function_table_clauses, Clause, CnfSpec, Lit};
use improv_core::automata::{Dfa, StateOutputDfa, WeightedDfa};
use improv_core::lqci::{CostClassTable, LqciParams};
use improv_core::rational::{ratio, Rational};
use num_bigint::BigUint;
use rand::Rng;

use crate::lp::WordEntry;

pub fn alphabet(symbols: usize) -> Vec<String> {
    (0..symbols)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect()
}

pub fn random_dfa<R: Rng + ?Sized>(rng: &mut R, states: usize, symbols: usize) -> Dfa {
    let rows = (0..states)
        .map(|_| (0..symbols).map(|_| rng.gen_range(0..states)).collect())
        .collect();
    let accepting = (0..states).map(|_| rng.gen_bool(0.5)).collect();
    Dfa::new(alphabet(symbols), rng.gen_range(0..states), accepting, rows).expect("valid DFA")
}

pub fn random_output_dfa<R: Rng + ?Sized>(
    rng: &mut R,
    states: usize,
    symbols: usize,
    outputs: &[u64],
) -> StateOutputDfa {
    let dfa = random_dfa(rng, states, symbols);
    let out = (0..states)
        .map(|_| outputs[rng.gen_range(0..outputs.len())])
        .collect();
    StateOutputDfa::new(dfa, out).expect("one output per state")
}

pub fn random_weighted_dfa<R: Rng + ?Sized>(
    rng: &mut R,
    states: usize,
    symbols: usize,
    max_weight: u64,
) -> WeightedDfa {
    let dfa = random_dfa(rng, states, symbols);
    let w = (0..states).map(|_| rng.gen_range(0..=max_weight)).collect();
    WeightedDfa::new(dfa, w).expect("one weight per state")
}

/// Random bounds for `labels` labels. Roughly half of the draws are feasible.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R, labels: usize) -> LqciParams {
    let lambda = ratio(rng.gen_range(0..=4), 12);
    let rho = ratio(rng.gen_range(4..=12), 12);
    LqciParams {
        m: 0,
        n: 0,
        c: ratio(rng.gen_range(1..=24), 4),
        lambda,
        rho,
        alpha: (0..labels)
            .map(|_| ratio(rng.gen_range(0..=3), 20))
            .collect(),
        beta: (0..labels)
            .map(|_| ratio(rng.gen_range(1..=10), 10))
            .collect(),
    }
}

/// At most 30 explicit words over up to three labels, with bounds.
pub fn random_word_instance<R: Rng + ?Sized>(rng: &mut R) -> (Vec<WordEntry>, LqciParams) {
    let labels = rng.gen_range(1..=3);
    let mut words = Vec::new();
    for label in 0..labels {
        for _ in 0..rng.gen_range(0..=10) {
            words.push(WordEntry {
                label,
                cost: ratio(rng.gen_range(0..=6), 1),
            });
        }
    }
    (words, random_params(rng, labels))
}

/// Groups explicit words into a class table with labels `0..labels`.
pub fn table_of(words: &[WordEntry], labels: usize) -> CostClassTable {
    let mut costs: Vec<Rational> = words.iter().map(|w| w.cost.clone()).collect();
    costs.sort();
    costs.dedup();
    let mut sizes = vec![vec![BigUint::from(0u32); costs.len()]; labels];
    for w in words {
        let k = costs.binary_search(&w.cost).unwrap();
        sizes[w.label][k] += 1u32;
    }
    CostClassTable::new((0..labels as u64).collect(), costs, sizes).expect("valid table")
}

/// A class table with up to three labels and four costs, plus bounds.
pub fn random_table<R: Rng + ?Sized>(rng: &mut R) -> (CostClassTable, LqciParams) {
    let labels = rng.gen_range(1..=3);
    let ncost = rng.gen_range(1..=4);
    let mut costs: Vec<u64> = Vec::new();
    while costs.len() < ncost {
        let c = rng.gen_range(0..=8);
        if !costs.contains(&c) {
            costs.push(c);
        }
    }
    costs.sort_unstable();
    let sizes = (0..labels)
        .map(|_| {
            (0..ncost)
                .map(|_| {
                    if rng.gen_bool(0.25) {
                        BigUint::from(0u32)
                    } else {
                        BigUint::from(rng.gen_range(1..=40u32))
                    }
                })
                .collect()
        })
        .collect();
    let table = CostClassTable::new(
        (0..labels as u64).collect(),
        costs.iter().map(|&c| ratio(c as i64, 1)).collect(),
        sizes,
    )
    .expect("valid table");
    let mut params = random_params(rng, labels);
    params.alpha = (0..labels)
        .map(|_| ratio(rng.gen_range(0..=1), 200))
        .collect();
    params.beta = (0..labels)
        .map(|_| ratio(rng.gen_range(1..=10), 40))
        .collect();
    params.c = ratio(rng.gen_range(1..=32), 4);
    (table, params)
}

/// A CNF instance built from explicit tables, so the intended meaning of
/// every trace is known without solving.
#[derive(Debug, Clone)]
pub struct TabulatedCnf {
    pub spec: CnfSpec,
    pub x_bits: usize,
    /// Indexed by the trace read as a big-endian integer.
    pub hard: Vec<bool>,
    pub label: Vec<usize>,
    /// In `[1, 2^|y|]`.
    pub cost: Vec<u64>,
}

fn bits_for(n: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b
}

impl TabulatedCnf {
    pub fn new(
        x_bits: usize,
        labels: usize,
        cost_bits: usize,
        hard: Vec<bool>,
        label: Vec<usize>,
        cost: Vec<u64>,
    ) -> Self {
        let lb = bits_for(labels);
        let x: Vec<u32> = (1..=x_bits as u32).collect();
        let label_bits: Vec<u32> = (0..lb as u32).map(|j| x_bits as u32 + 1 + j).collect();
        let y: Vec<u32> = (0..cost_bits as u32)
            .map(|j| (x_bits + lb) as u32 + 1 + j)
            .collect();
        let num_vars = (x_bits + lb + cost_bits) as u32;
        let hard_clauses: Vec<Clause> = (0..1u64 << x_bits)
            .filter(|&a| !hard[a as usize])
            .map(|a| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let bit = a >> (x_bits - 1 - j) & 1 == 1;
                        if bit {
                            -(v as Lit)
                        } else {
                            v as Lit
                        }
                    })
                    .collect()
            })
            .collect();
        let label_clauses =
            function_table_clauses(&x, &label_bits, |a| Some(label[a as usize] as u64));
        let cost_clauses = function_table_clauses(&x, &y, |a| Some(cost[a as usize] - 1));
        let spec = CnfSpec {
            num_vars,
            x,
            y,
            label_bits,
            z: Vec::new(),
            hard: hard_clauses,
            label: label_clauses,
            cost: cost_clauses,
            labels,
        };
        TabulatedCnf {
            spec,
            x_bits,
            hard,
            label,
            cost,
        }
    }

    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        x_bits: usize,
        labels: usize,
        cost_bits: usize,
    ) -> Self {
        let n = 1usize << x_bits;
        let density = rng.gen_range(0.3..0.9);
        let hard = (0..n).map(|_| rng.gen_bool(density)).collect();
        let label = (0..n).map(|_| rng.gen_range(0..labels)).collect();
        let cost = (0..n)
            .map(|_| rng.gen_range(1..=1u64 << cost_bits))
            .collect();
        Self::new(x_bits, labels, cost_bits, hard, label, cost)
    }

    /// Improvisations as explicit words, for the LP oracle.
    pub fn words(&self) -> Vec<(u64, WordEntry)> {
        (0..self.hard.len())
            .filter(|&a| self.hard[a])
            .map(|a| {
                (
                    a as u64,
                    WordEntry {
                        label: self.label[a],
                        cost: ratio(self.cost[a] as i64, 1),
                    },
                )
            })
            .collect()
    }
}
