use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamsError {
    #[error("length bounds out of order: m = {m} > n = {n}")]
    LengthOrder { m: usize, n: usize },
    #[error("label bounds must satisfy 0 <= lambda <= rho <= 1")]
    LabelBounds,
    #[error("word bounds for label {label} must satisfy 0 <= alpha <= beta <= 1")]
    WordBounds { label: usize },
    #[error("alpha has {alpha} entries but beta has {beta}")]
    BoundCount { alpha: usize, beta: usize },
    #[error("cost bound must be positive")]
    CostBound,
    #[error("instance must have at least one label")]
    NoLabels,
}

/// Numeric parameters of an LQCI instance: length bounds, cost bound,
/// label-randomness bounds and per-label word-randomness bounds.
///
/// The specifications themselves (hard, label, cost) live with the scheme
/// that understands them; see `exact_scheme::DfaInstance` and `approx::CnfSpec`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LqciParams {
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub n: usize,
    #[serde(with = "rational::text")]
    pub c: Rational,
    #[serde(with = "rational::text")]
    pub lambda: Rational,
    #[serde(with = "rational::text")]
    pub rho: Rational,
    #[serde(with = "rational::text::vec")]
    pub alpha: Vec<Rational>,
    #[serde(with = "rational::text::vec")]
    pub beta: Vec<Rational>,
}

impl LqciParams {
    pub fn num_labels(&self) -> usize {
        self.alpha.len()
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.m > self.n {
            return Err(ParamsError::LengthOrder {
                m: self.m,
                n: self.n,
            });
        }
        if self.alpha.len() != self.beta.len() {
            return Err(ParamsError::BoundCount {
                alpha: self.alpha.len(),
                beta: self.beta.len(),
            });
        }
        if self.alpha.is_empty() {
            return Err(ParamsError::NoLabels);
        }
        if self.lambda.is_negative()
            || self.lambda > self.rho
            || !rational::is_probability(&self.rho)
        {
            return Err(ParamsError::LabelBounds);
        }
        for (label, (a, b)) in self.alpha.iter().zip(&self.beta).enumerate() {
            if a.is_negative() || a > b || !rational::is_probability(b) {
                return Err(ParamsError::WordBounds { label });
            }
        }
        if self.c <= Rational::zero() {
            return Err(ParamsError::CostBound);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn toy() -> LqciParams {
        LqciParams {
            m: 3,
            n: 3,
            c: ratio(129, 50),
            lambda: ratio(1, 5),
            rho: ratio(1, 1),
            alpha: vec![ratio(1, 10); 2],
            beta: vec![ratio(1, 2); 2],
        }
    }

    #[test]
    fn validation_catches_each_violation() {
        assert!(toy().validate().is_ok());
        let mut p = toy();
        p.m = 4;
        assert_eq!(p.validate(), Err(ParamsError::LengthOrder { m: 4, n: 3 }));
        let mut p = toy();
        p.lambda = ratio(2, 1);
        assert_eq!(p.validate(), Err(ParamsError::LabelBounds));
        let mut p = toy();
        p.alpha[1] = ratio(3, 5);
        assert_eq!(p.validate(), Err(ParamsError::WordBounds { label: 1 }));
        let mut p = toy();
        p.c = ratio(0, 1);
        assert_eq!(p.validate(), Err(ParamsError::CostBound));
        let mut p = toy();
        p.beta.pop();
        assert!(matches!(p.validate(), Err(ParamsError::BoundCount { .. })));
    }

    #[test]
    fn accepts_decimal_and_fraction_spellings() {
        let json = r#"{"m":3,"n":3,"c":2.58,"lambda":"1/5","rho":1,"alpha":["0.1","1/10"],"beta":[0.5,"1/2"]}"#;
        let p: LqciParams = serde_json::from_str(json).unwrap();
        assert_eq!(p, toy());
    }
}
