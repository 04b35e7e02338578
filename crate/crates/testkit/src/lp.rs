//! Feasibility and minimum expected cost of an LQCI instance, decided by
//! linear programming over one variable per word.

use improv_core::lqci::LqciParams;
use improv_core::rational::{self, Rational};
use num_traits::{One, Zero};
use rand::Rng;

use crate::simplex::{solve, Lp, LpResult, Relation};

/// An improvisation listed explicitly: its label index and cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordEntry {
    pub label: usize,
    pub cost: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub feasible: bool,
    /// Least expected cost over distributions meeting every bound except
    /// the cost bound; `None` when there is no such distribution.
    pub min_cost: Option<Rational>,
}

fn one() -> Rational {
    Rational::one()
}

/// Whether some distribution on the words of one label keeps every word
/// probability in `[alpha, beta]`.
fn label_conditional_exists(size: usize, alpha: &Rational, beta: &Rational) -> bool {
    let mut lp = Lp::new(size);
    for j in 0..size {
        lp.add(vec![(j, one())], Relation::Ge, alpha.clone());
        lp.add(vec![(j, one())], Relation::Le, beta.clone());
    }
    lp.add((0..size).map(|j| (j, one())).collect(), Relation::Eq, one());
    matches!(solve(&lp), LpResult::Optimal { .. })
}

/// Decides the instance from scratch.
///
/// Each label must admit a conditional distribution within its word bounds.
/// The joint LP has variables `D(w)` per word and `P_i` per label with
/// `alpha_i P_i <= D(w) <= beta_i P_i`, `sum_{w in I_i} D(w) = P_i`,
/// `lambda <= P_i <= rho` and `sum P_i = 1`, and minimises expected cost.
pub fn lqci_oracle(words: &[WordEntry], params: &LqciParams) -> Verdict {
    let labels = params.num_labels();
    let none = Verdict {
        feasible: false,
        min_cost: None,
    };
    for i in 0..labels {
        let size = words.iter().filter(|w| w.label == i).count();
        if !label_conditional_exists(size, &params.alpha[i], &params.beta[i]) {
            return none;
        }
    }
    let nw = words.len();
    let p = |i: usize| nw + i;
    let mut lp = Lp::new(nw + labels);
    for (j, w) in words.iter().enumerate() {
        let i = w.label;
        lp.add(
            vec![(j, one()), (p(i), -params.alpha[i].clone())],
            Relation::Ge,
            Rational::zero(),
        );
        lp.add(
            vec![(j, one()), (p(i), -params.beta[i].clone())],
            Relation::Le,
            Rational::zero(),
        );
        lp.objective[j] = w.cost.clone();
    }
    for i in 0..labels {
        let mut row: Vec<(usize, Rational)> = words
            .iter()
            .enumerate()
            .filter(|(_, w)| w.label == i)
            .map(|(j, _)| (j, one()))
            .collect();
        row.push((p(i), -one()));
        lp.add(row, Relation::Eq, Rational::zero());
        lp.add(vec![(p(i), one())], Relation::Ge, params.lambda.clone());
        lp.add(vec![(p(i), one())], Relation::Le, params.rho.clone());
    }
    lp.add(
        (0..labels).map(|i| (p(i), one())).collect(),
        Relation::Eq,
        one(),
    );
    match solve(&lp) {
        LpResult::Optimal { value, .. } => Verdict {
            feasible: value <= params.c,
            min_cost: Some(value),
        },
        LpResult::Infeasible => none,
        LpResult::Unbounded => unreachable!("expected cost is bounded below"),
    }
}

/// Random point with `lo_j <= x_j <= hi_j` and `sum x = total`, or `None`
/// when the box misses the hyperplane.
pub fn random_split<R: Rng + ?Sized>(
    total: &Rational,
    lo: &[Rational],
    hi: &[Rational],
    rng: &mut R,
) -> Option<Vec<Rational>> {
    let floor: Rational = lo.iter().sum();
    let ceiling: Rational = hi.iter().sum();
    if floor > *total || ceiling < *total {
        return None;
    }
    let mut x: Vec<Rational> = lo.to_vec();
    let caps: Vec<Rational> = lo.iter().zip(hi).map(|(l, h)| h - l).collect();
    let mut order: Vec<usize> = (0..lo.len()).collect();
    for k in (1..order.len()).rev() {
        order.swap(k, rng.gen_range(0..=k));
    }
    let mut rem = total - floor;
    let mut rest: Rational = caps.iter().sum();
    for &j in &order {
        rest -= &caps[j];
        let need = if rem > rest {
            &rem - &rest
        } else {
            Rational::zero()
        };
        let most = if caps[j] < rem {
            caps[j].clone()
        } else {
            rem.clone()
        };
        let u = rational::ratio(rng.gen_range(0..=1000), 1000);
        let g = &need + (&most - &need) * u;
        rem -= &g;
        x[j] += g;
    }
    debug_assert!(rem.is_zero());
    Some(x)
}

/// A random distribution over `words` meeting every bound except the cost
/// bound, as word probabilities. `None` when no such distribution exists.
pub fn random_feasible<R: Rng + ?Sized>(
    words: &[WordEntry],
    params: &LqciParams,
    rng: &mut R,
) -> Option<Vec<Rational>> {
    let labels = params.num_labels();
    let marg = random_split(
        &one(),
        &vec![params.lambda.clone(); labels],
        &vec![params.rho.clone(); labels],
        rng,
    )?;
    let mut d = vec![Rational::zero(); words.len()];
    for (i, mi) in marg.iter().enumerate() {
        let idx: Vec<usize> = (0..words.len()).filter(|&j| words[j].label == i).collect();
        let q = random_split(
            &one(),
            &vec![params.alpha[i].clone(); idx.len()],
            &vec![params.beta[i].clone(); idx.len()],
            rng,
        )?;
        for (j, qj) in idx.into_iter().zip(q) {
            d[j] = mi * qj;
        }
    }
    Some(d)
}

pub fn expected_cost(words: &[WordEntry], d: &[Rational]) -> Rational {
    words.iter().zip(d).map(|(w, p)| &w.cost * p).sum()
}
