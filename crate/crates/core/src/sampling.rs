//! Exact categorical draws with big-integer weights.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::rational::Rational;

/// Draws index `i` with probability `weights[i] / sum(weights)` using one
/// uniform integer below the exact total. Returns `None` when all weights
/// are zero.
pub fn categorical<R: Rng + ?Sized>(weights: &[BigUint], rng: &mut R) -> Option<usize> {
    let total: BigUint = weights.iter().sum();
    categorical_with_total(weights, &total, rng)
}

pub fn categorical_with_total<R: Rng + ?Sized>(
    weights: &[BigUint],
    total: &BigUint,
    rng: &mut R,
) -> Option<usize> {
    if total.is_zero() {
        return None;
    }
    let mut ticket = rng.gen_biguint_below(total);
    for (idx, w) in weights.iter().enumerate() {
        if ticket < *w {
            return Some(idx);
        }
        ticket -= w;
    }
    unreachable!("ticket below total must land in some bucket")
}

/// Scales nonnegative rationals by the LCM of their denominators, giving
/// integer weights with the same ratios, and returns them with their sum.
pub fn integer_weights(probs: &[Rational]) -> (Vec<BigUint>, BigUint) {
    let denominator = probs
        .iter()
        .fold(BigUint::one(), |acc, p| acc.lcm(p.denom().magnitude()));
    let scale = Rational::from_integer(denominator.into());
    let weights: Vec<BigUint> = probs
        .iter()
        .map(|p| (p * &scale).to_integer().magnitude().clone())
        .collect();
    let total = weights.iter().sum();
    (weights, total)
}

/// Seeded generator used across the toolkit.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// A generator for stream `stream` of a run seeded with `seed`; distinct
/// streams are independent and the mapping is stable across releases.
pub fn stream_rng(seed: u64, stream: u64) -> SeededRng {
    use rand::SeedableRng;
    let mut rng = SeededRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
