use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{AutomataError, Dfa, StateOutputDfa, WeightedDfa};

/// Intersection of two DFAs over the same alphabet. Only states reachable
/// from the initial pair are built.
pub fn product(a: &Dfa, b: &Dfa) -> Result<Dfa, AutomataError> {
    product_with_pairs(a, b).map(|(dfa, _)| dfa)
}

/// Like [`product`], also returning the `(a, b)` state pair behind each
/// product state.
pub fn product_with_pairs(a: &Dfa, b: &Dfa) -> Result<(Dfa, Vec<(usize, usize)>), AutomataError> {
    if a.alphabet() != b.alphabet() {
        return Err(AutomataError::AlphabetMismatch);
    }
    let symbols = a.num_symbols();
    let start = (a.initial(), b.initial());
    let mut index: HashMap<(usize, usize), usize> = HashMap::from([(start, 0)]);
    let mut pairs = vec![start];
    let mut queue = VecDeque::from([start]);
    let mut transitions = Vec::new();
    while let Some((p, q)) = queue.pop_front() {
        for sym in 0..symbols {
            let next = (a.step(p, sym), b.step(q, sym));
            let id = *index.entry(next).or_insert_with(|| {
                pairs.push(next);
                queue.push_back(next);
                pairs.len() - 1
            });
            transitions.push(id);
        }
    }
    let accepting = pairs
        .iter()
        .map(|&(p, q)| a.is_accepting(p) && b.is_accepting(q))
        .collect();
    Ok((
        Dfa::from_parts(a.alphabet().to_vec(), 0, accepting, transitions),
        pairs,
    ))
}

/// Keeps only accepting states whose output equals `value`. Output DFAs
/// accept everywhere by convention, so this yields "words whose final
/// output is `value`".
pub fn restrict_output(s: &StateOutputDfa, value: u64) -> Dfa {
    let accepting = (0..s.dfa.num_states())
        .map(|q| s.dfa.is_accepting(q) && s.outputs[q] == value)
        .collect();
    s.dfa.with_accepting(accepting)
}

/// Every cost `cost(x)` of a word `x` accepted by `hard` with length in
/// `m..=n`, in increasing order.
///
/// Dynamic program over the product of `hard` and the weighted automaton:
/// the initial state starts with `{k(q0)}` and each step adds the weight of
/// the state entered.
pub fn possible_costs(
    w: &WeightedDfa,
    hard: &Dfa,
    m: usize,
    n: usize,
) -> Result<Vec<u64>, AutomataError> {
    let (prod, pairs) = product_with_pairs(hard, &w.dfa)?;
    let weight: Vec<u64> = pairs.iter().map(|&(_, q)| w.weights[q]).collect();
    let states = prod.num_states();
    let mut current: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); states];
    current[prod.initial()].insert(weight[prod.initial()]);
    let mut costs = BTreeSet::new();
    for len in 0..=n {
        if len >= m {
            for (q, set) in current.iter().enumerate() {
                if prod.is_accepting(q) {
                    costs.extend(set.iter().copied());
                }
            }
        }
        if len == n {
            break;
        }
        let mut next: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); states];
        for (q, set) in current.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            for &succ in prod.successors(q) {
                next[succ].extend(set.iter().map(|c| c + weight[succ]));
            }
        }
        current = next;
    }
    Ok(costs.into_iter().collect())
}

/// Accepts exactly the words accepted by `w.dfa` whose accumulated cost is
/// exactly `k`. States are `(state, accumulated)` with accumulated cost
/// saturating at `k + 1`.
pub fn cost_tracking_dfa(w: &WeightedDfa, k: u64) -> Dfa {
    let base = &w.dfa;
    let cap = k + 1;
    let copies = (cap + 1) as usize;
    let id = |q: usize, acc: u64| q * copies + acc as usize;
    let symbols = base.num_symbols();
    let states = base.num_states() * copies;
    let mut transitions = Vec::with_capacity(states * symbols);
    let mut accepting = Vec::with_capacity(states);
    for q in 0..base.num_states() {
        for acc in 0..=cap {
            accepting.push(base.is_accepting(q) && acc == k);
            for &succ in base.successors(q) {
                let next = acc.saturating_add(w.weights[succ]).min(cap);
                transitions.push(id(succ, next));
            }
        }
    }
    let initial = id(base.initial(), w.weights[base.initial()].min(cap));
    Dfa::from_parts(base.alphabet().to_vec(), initial, accepting, transitions)
}
