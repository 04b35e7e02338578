//! The two greedy phases.
//!
//! Cost phase: within one label, give the cheapest words the maximal
//! conditional probability `beta` until the remaining words can only afford
//! `alpha`, with a single overflow class in between. Label phase: the same
//! idea one level up, over labels sorted by the cost-phase expected cost.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GreedyError {
    /// `alpha * |I_i| > 1`: too many words to give each the minimum.
    #[error("alpha is too large: alpha * |I_i| = {product} > 1")]
    AlphaTooLarge { product: Rational },
    /// `beta * |I_i| < 1`: too few words to absorb all the mass.
    #[error("beta is too small: beta * |I_i| = {product} < 1")]
    BetaTooSmall { product: Rational },
    #[error("alpha = beta requires alpha * |I_i| = 1, got {product}")]
    AlphaBetaMismatch { product: Rational },
    #[error("word bounds must satisfy 0 <= alpha <= beta <= 1")]
    InvalidBounds,
    /// `rho * |Omega| < 1`.
    #[error("rho is too small for {labels} labels")]
    RhoTooSmall { labels: usize },
    /// `lambda * |Omega| > 1`.
    #[error("lambda is too large for {labels} labels")]
    LambdaTooLarge { labels: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostClass {
    pub cost: Rational,
    pub size: BigUint,
}

impl CostClass {
    pub fn new(cost: Rational, size: impl Into<BigUint>) -> Self {
        CostClass {
            cost,
            size: size.into(),
        }
    }
}

/// Output of the cost phase for one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDistribution {
    /// Probability of each whole class, aligned with the input list.
    pub probs: Vec<Rational>,
    pub expected_cost: Rational,
    /// `o_i`; `None` in the forced-uniform case `alpha = beta`.
    pub overflow_count: Option<Rational>,
    /// Index (into the input list) of the overflow class, if any.
    pub overflow_class: Option<usize>,
}

/// Output of the label phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelDistribution {
    /// Marginal of each label, aligned with the input cost list.
    pub marginals: Vec<Rational>,
    /// `u`; `None` in the forced case `lambda = rho`.
    pub saturated: Option<BigInt>,
    /// Index of the label receiving the leftover mass, if any.
    pub overflow_label: Option<usize>,
}

fn sorted_by_cost<T>(items: &[T], key: impl Fn(&T) -> &Rational) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| key(&items[a]).cmp(key(&items[b])).then(a.cmp(&b)));
    order
}

/// Greedy cost construction for one label class.
pub fn greedy_cost_construction(
    classes: &[CostClass],
    alpha: &Rational,
    beta: &Rational,
) -> Result<ClassDistribution, GreedyError> {
    if *alpha < Rational::zero() || alpha > beta || *beta > Rational::one() {
        return Err(GreedyError::InvalidBounds);
    }
    let total: BigUint = classes.iter().map(|c| &c.size).sum();
    let total = rational::from_biguint(&total);
    let one = Rational::one();

    if alpha == beta {
        let product = alpha * &total;
        if product != one {
            return Err(GreedyError::AlphaBetaMismatch { product });
        }
        let probs: Vec<Rational> = classes
            .iter()
            .map(|c| alpha * rational::from_biguint(&c.size))
            .collect();
        let expected_cost = expected(&probs, classes);
        return Ok(ClassDistribution {
            probs,
            expected_cost,
            overflow_count: None,
            overflow_class: None,
        });
    }

    let low_mass = alpha * &total;
    if low_mass > one {
        return Err(GreedyError::AlphaTooLarge { product: low_mass });
    }
    let high_mass = beta * &total;
    if high_mass < one {
        return Err(GreedyError::BetaTooSmall { product: high_mass });
    }

    let o = (&one - &low_mass) / (beta - alpha);
    let mut probs = vec![Rational::zero(); classes.len()];
    let mut cumulative = Rational::zero();
    let mut overflow_class = None;
    for idx in sorted_by_cost(classes, |c| &c.cost) {
        let class = &classes[idx];
        if class.size.is_zero() {
            continue;
        }
        let size = rational::from_biguint(&class.size);
        let next = &cumulative + &size;
        probs[idx] = if overflow_class.is_some() {
            alpha * &size
        } else if next <= o {
            beta * &size
        } else {
            overflow_class = Some(idx);
            beta * (&o - &cumulative) + alpha * (&next - &o)
        };
        cumulative = next;
    }
    let expected_cost = expected(&probs, classes);
    Ok(ClassDistribution {
        probs,
        expected_cost,
        overflow_count: Some(o),
        overflow_class,
    })
}

fn expected(probs: &[Rational], classes: &[CostClass]) -> Rational {
    probs.iter().zip(classes).map(|(p, c)| p * &c.cost).sum()
}

/// Greedy label construction over per-label expected costs.
pub fn greedy_label_construction(
    expected_costs: &[Rational],
    lambda: &Rational,
    rho: &Rational,
) -> Result<LabelDistribution, GreedyError> {
    let labels = expected_costs.len();
    let count = rational::from_u64(labels as u64);
    let one = Rational::one();
    if rho * &count < one {
        return Err(GreedyError::RhoTooSmall { labels });
    }
    if lambda * &count > one {
        return Err(GreedyError::LambdaTooLarge { labels });
    }

    if lambda == rho {
        return Ok(LabelDistribution {
            marginals: vec![lambda.clone(); labels],
            saturated: None,
            overflow_label: None,
        });
    }

    let u = rational::floor(&((&one - lambda * &count) / (rho - lambda)));
    let mut marginals = vec![lambda.clone(); labels];
    let mut overflow_label = None;
    for (rank, idx) in sorted_by_cost(expected_costs, |c| c)
        .into_iter()
        .enumerate()
    {
        let rank = BigInt::from(rank);
        if rank < u {
            marginals[idx] = rho.clone();
        } else if rank == u {
            let u_r = Rational::from_integer(u.clone());
            let rest = &count - &u_r - &one;
            marginals[idx] = &one - rho * &u_r - lambda * rest;
            overflow_label = Some(idx);
        }
    }
    Ok(LabelDistribution {
        marginals,
        saturated: Some(u),
        overflow_label,
    })
}
