//! Tolerances of the approximate scheme and the cost buckets they induce.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApproxParamsError {
    #[error("cost tolerance zeta must be positive")]
    Zeta,
    #[error("randomness tolerance gamma must be nonnegative")]
    Gamma,
    #[error("delta must lie in [0, 1)")]
    Delta,
}

/// User-facing tolerances: expected cost within `1 + zeta` of the bound,
/// conditional word probabilities within `1 + gamma` of their bounds, and
/// both with probability at least `1 - delta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxParams {
    #[serde(with = "rational::text")]
    pub zeta: Rational,
    #[serde(with = "rational::text")]
    pub gamma: Rational,
    #[serde(with = "rational::text")]
    pub delta: Rational,
}

/// Quantities derived from [`ApproxParams`] for a given instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedParams {
    /// Bucket ratio `1 + zeta`.
    pub r: Rational,
    /// Counter tolerance, the largest found with `(1 + tau)^3 <= 1 + gamma`.
    pub tau: Rational,
    /// Generator tolerance; equal to `tau`.
    pub epsilon: Rational,
    /// Per-count failure probability with `(1 - d)^(labels * b) >= 1 - delta`.
    pub d: Rational,
    pub plan: BucketPlan,
}

impl ApproxParams {
    pub fn validate(&self) -> Result<(), ApproxParamsError> {
        if !self.zeta.is_positive() {
            return Err(ApproxParamsError::Zeta);
        }
        if self.gamma.is_negative() {
            return Err(ApproxParamsError::Gamma);
        }
        if self.delta.is_negative() || self.delta >= Rational::one() {
            return Err(ApproxParamsError::Delta);
        }
        Ok(())
    }

    pub fn derive(
        &self,
        labels: usize,
        cost_bits: usize,
    ) -> Result<DerivedParams, ApproxParamsError> {
        self.validate()?;
        let r = Rational::one() + &self.zeta;
        let plan = BucketPlan::new(r.clone(), cost_bits);
        let tau = cube_root_tolerance(&self.gamma);
        let d = per_count_failure(&self.delta, labels * plan.b);
        Ok(DerivedParams {
            r,
            epsilon: tau.clone(),
            tau,
            d,
            plan,
        })
    }
}

/// Largest `tau >= 0` found with `(1 + tau)^3 <= 1 + gamma`: exact when
/// `1 + gamma` is the cube of a rational, otherwise a lower approximation
/// with denominator `10^9`.
pub fn cube_root_tolerance(gamma: &Rational) -> Rational {
    let target = Rational::one() + gamma;
    let (p, q) = (target.numer(), target.denom());
    let (cp, cq) = (p.cbrt(), q.cbrt());
    if &(&cp * &cp * &cp) == p && &(&cq * &cq * &cq) == q {
        return Rational::new(cp, cq) - Rational::one();
    }
    let scale = BigInt::from(1_000_000_000u64);
    let estimate = rational::to_f64(&target).cbrt() - 1.0;
    let mut tau = Rational::new(
        rational::floor(
            &(rational::from_f64(estimate.max(0.0)).unwrap_or_default()
                * Rational::from_integer(scale.clone())),
        ),
        scale.clone(),
    );
    let step = Rational::new(BigInt::one(), scale);
    while tau.is_positive() && (Rational::one() + &tau).pow(3u32) > target {
        tau -= &step;
    }
    tau.max(Rational::zero())
}

/// Largest `d` found (denominator `2^53`) with `(1 - d)^n >= 1 - delta`.
pub fn per_count_failure(delta: &Rational, n: usize) -> Rational {
    if delta.is_zero() || n == 0 {
        return Rational::zero();
    }
    let target = Rational::one() - delta;
    let estimate = -((-rational::to_f64(delta)).ln_1p() / n as f64).exp_m1();
    let scale = Rational::from_integer(BigInt::one() << 53u32);
    let mut d = Rational::from_integer(rational::floor(
        &(rational::from_f64(estimate.clamp(0.0, 1.0)).unwrap_or_default() * &scale),
    )) / &scale;
    let holds = |d: &Rational| (Rational::one() - d).pow(n as u32) >= target;
    while d.is_positive() && !holds(&d) {
        d *= Rational::new(BigInt::from(1_000_000u32 - 1), BigInt::from(1_000_000u32));
    }
    d
}

/// Cost buckets `[ceil(r^(k-1)), ceil(r^k) - 1]` for `k = 1..=b`, with the
/// last bucket closed at `2^|y|`. `b` is the least count with `r^b >= 2^|y|`.
/// Buckets can be empty when `r` is close to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketPlan {
    pub r: Rational,
    pub b: usize,
    pub cost_bits: usize,
    /// Inclusive cost bounds per bucket; `lo > hi` marks an empty bucket.
    pub bounds: Vec<(BigUint, BigUint)>,
    /// `r^(k-1)` per bucket.
    pub low_costs: Vec<Rational>,
}

impl BucketPlan {
    pub fn new(r: Rational, cost_bits: usize) -> Self {
        assert!(r > Rational::one(), "bucket ratio must exceed 1");
        let top = BigUint::one() << cost_bits;
        let top_r = rational::from_biguint(&top);
        let mut powers = vec![Rational::one()];
        while powers.len() < 2 || *powers.last().unwrap() < top_r {
            let next = powers.last().unwrap() * &r;
            powers.push(next);
        }
        let b = powers.len() - 1;
        let ceil = |x: &Rational| rational::ceil(x).magnitude().clone();
        let bounds = (0..b)
            .map(|k| {
                let lo = ceil(&powers[k]);
                let hi = if k + 1 == b {
                    top.clone()
                } else {
                    ceil(&powers[k + 1]) - 1u32
                };
                (lo, hi)
            })
            .collect();
        powers.pop();
        BucketPlan {
            r,
            b,
            cost_bits,
            bounds,
            low_costs: powers,
        }
    }

    pub fn is_empty_bucket(&self, k: usize) -> bool {
        self.bounds[k].0 > self.bounds[k].1
    }

    /// Bucket holding `cost`, if it is in range.
    pub fn bucket_of(&self, cost: &BigUint) -> Option<usize> {
        self.bounds
            .iter()
            .position(|(lo, hi)| lo <= cost && cost <= hi)
    }
}
