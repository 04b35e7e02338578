//! Goodness-of-fit helpers.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson chi-square p-value of `observed` counts against `expected`
/// probabilities. Cells with zero expected probability must be empty.
pub fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        if p == 0.0 {
            assert_eq!(o, 0, "draw in a cell of probability zero");
            continue;
        }
        let e = p * n as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    ChiSquared::new((cells - 1) as f64).unwrap().sf(stat)
}

/// How many standard errors `count` is from `p * n`.
pub fn z_score(count: u64, n: u64, p: f64) -> f64 {
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    if sd == 0.0 {
        return if count as f64 == p * n as f64 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    (count as f64 - p * n as f64) / sd
}
