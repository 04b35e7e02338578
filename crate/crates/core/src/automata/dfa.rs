use serde::{Deserialize, Serialize};

use super::AutomataError;

/// A word as a sequence of symbol indices into the alphabet.
pub type Word = Vec<usize>;

/// Complete deterministic finite automaton with a dense transition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Vec<String>,
    initial: usize,
    accepting: Vec<bool>,
    /// `transitions[q * |alphabet| + a]`
    transitions: Vec<usize>,
}

impl Dfa {
    /// Builds a DFA from per-state successor rows. Every row must list one
    /// successor per symbol.
    pub fn new(
        alphabet: Vec<String>,
        initial: usize,
        accepting: Vec<bool>,
        rows: Vec<Vec<usize>>,
    ) -> Result<Self, AutomataError> {
        if alphabet.is_empty() {
            return Err(AutomataError::EmptyAlphabet);
        }
        for (i, sym) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(sym) {
                return Err(AutomataError::DuplicateSymbol(sym.clone()));
            }
        }
        let states = rows.len();
        if states == 0 || initial >= states {
            return Err(AutomataError::BadInitial { initial, states });
        }
        if accepting.len() != states {
            return Err(AutomataError::AcceptingCount {
                got: accepting.len(),
                states,
            });
        }
        let mut transitions = Vec::with_capacity(states * alphabet.len());
        for (state, row) in rows.into_iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(AutomataError::PartialTransitions { state });
            }
            if let Some(&target) = row.iter().find(|&&t| t >= states) {
                return Err(AutomataError::BadTarget { state, target });
            }
            transitions.extend(row);
        }
        Ok(Dfa {
            alphabet,
            initial,
            accepting,
            transitions,
        })
    }

    /// Single-state automaton accepting every word.
    pub fn universal(alphabet: Vec<String>) -> Result<Self, AutomataError> {
        let row = vec![0; alphabet.len()];
        Dfa::new(alphabet, 0, vec![true], vec![row])
    }

    pub(crate) fn from_parts(
        alphabet: Vec<String>,
        initial: usize,
        accepting: Vec<bool>,
        transitions: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(transitions.len(), accepting.len() * alphabet.len());
        Dfa {
            alphabet,
            initial,
            accepting,
            transitions,
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    #[inline]
    pub fn step(&self, state: usize, symbol: usize) -> usize {
        self.transitions[state * self.alphabet.len() + symbol]
    }

    pub fn successors(&self, state: usize) -> &[usize] {
        let k = self.alphabet.len();
        &self.transitions[state * k..(state + 1) * k]
    }

    pub fn run(&self, word: &[usize]) -> usize {
        word.iter().fold(self.initial, |q, &a| self.step(q, a))
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.accepting[self.run(word)]
    }

    pub fn with_accepting(&self, accepting: Vec<bool>) -> Dfa {
        assert_eq!(accepting.len(), self.num_states());
        Dfa {
            accepting,
            ..self.clone()
        }
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == symbol)
    }

    /// Renders a word by concatenating symbols, separating them with spaces
    /// when some symbol is longer than one character.
    pub fn render(&self, word: &[usize]) -> String {
        render_word(&self.alphabet, word)
    }

    /// Inverse of [`Dfa::render`].
    pub fn parse_word(&self, text: &str) -> Option<Word> {
        if self.alphabet.iter().all(|s| s.chars().count() == 1) {
            text.chars()
                .map(|c| self.symbol_index(c.encode_utf8(&mut [0; 4])))
                .collect()
        } else {
            text.split_whitespace()
                .map(|s| self.symbol_index(s))
                .collect()
        }
    }
}

pub fn render_word(alphabet: &[String], word: &[usize]) -> String {
    let sep = if alphabet.iter().all(|s| s.chars().count() == 1) {
        ""
    } else {
        " "
    };
    word.iter()
        .map(|&a| alphabet[a].as_str())
        .collect::<Vec<_>>()
        .join(sep)
}

/// DFA whose final state carries an integer output (a label or a cost).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateOutputDfa {
    pub dfa: Dfa,
    pub outputs: Vec<u64>,
}

impl StateOutputDfa {
    pub fn new(dfa: Dfa, outputs: Vec<u64>) -> Result<Self, AutomataError> {
        if outputs.len() != dfa.num_states() {
            return Err(AutomataError::OutputCount {
                got: outputs.len(),
                states: dfa.num_states(),
            });
        }
        Ok(StateOutputDfa { dfa, outputs })
    }

    pub fn output_of(&self, word: &[usize]) -> u64 {
        self.outputs[self.dfa.run(word)]
    }
}

/// DFA whose word cost is the sum of the weights of every state the run
/// visits, the initial state included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDfa {
    pub dfa: Dfa,
    pub weights: Vec<u64>,
}

impl WeightedDfa {
    pub fn new(dfa: Dfa, weights: Vec<u64>) -> Result<Self, AutomataError> {
        if weights.len() != dfa.num_states() {
            return Err(AutomataError::WeightCount {
                got: weights.len(),
                states: dfa.num_states(),
            });
        }
        Ok(WeightedDfa { dfa, weights })
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    pub fn cost_of(&self, word: &[usize]) -> u64 {
        let mut q = self.dfa.initial();
        let mut total = self.weights[q];
        for &a in word {
            q = self.dfa.step(q, a);
            total += self.weights[q];
        }
        total
    }
}

/// JSON form shared by all three automaton kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaJson {
    pub alphabet: Vec<String>,
    pub states: usize,
    pub initial: usize,
    /// Omitted for output DFAs, which accept everywhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepting: Option<Vec<usize>>,
    pub transitions: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u64>>,
}

impl DfaJson {
    pub fn to_dfa(&self) -> Result<Dfa, AutomataError> {
        if self.transitions.len() != self.states {
            return Err(AutomataError::StateCount {
                declared: self.states,
                rows: self.transitions.len(),
            });
        }
        let accepting = match &self.accepting {
            None => vec![true; self.states],
            Some(list) => {
                let mut flags = vec![false; self.states];
                for &q in list {
                    if q >= self.states {
                        return Err(AutomataError::BadTarget {
                            state: q,
                            target: q,
                        });
                    }
                    flags[q] = true;
                }
                flags
            }
        };
        Dfa::new(
            self.alphabet.clone(),
            self.initial,
            accepting,
            self.transitions.clone(),
        )
    }

    pub fn to_output_dfa(&self) -> Result<StateOutputDfa, AutomataError> {
        let outputs = self
            .outputs
            .clone()
            .ok_or(AutomataError::MissingField("outputs"))?;
        StateOutputDfa::new(self.to_dfa()?, outputs)
    }

    pub fn to_weighted_dfa(&self) -> Result<WeightedDfa, AutomataError> {
        let weights = self
            .weights
            .clone()
            .ok_or(AutomataError::MissingField("weights"))?;
        WeightedDfa::new(self.to_dfa()?, weights)
    }

    pub fn from_dfa(dfa: &Dfa) -> Self {
        let accepting: Vec<usize> = (0..dfa.num_states())
            .filter(|&q| dfa.is_accepting(q))
            .collect();
        DfaJson {
            alphabet: dfa.alphabet().to_vec(),
            states: dfa.num_states(),
            initial: dfa.initial(),
            accepting: Some(accepting),
            transitions: (0..dfa.num_states())
                .map(|q| dfa.successors(q).to_vec())
                .collect(),
            outputs: None,
            weights: None,
        }
    }

    pub fn from_output_dfa(s: &StateOutputDfa) -> Self {
        DfaJson {
            outputs: Some(s.outputs.clone()),
            ..Self::from_dfa(&s.dfa)
        }
    }

    pub fn from_weighted_dfa(w: &WeightedDfa) -> Self {
        DfaJson {
            weights: Some(w.weights.clone()),
            ..Self::from_dfa(&w.dfa)
        }
    }
}
