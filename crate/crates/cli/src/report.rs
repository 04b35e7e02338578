//! Empirical statistics over a batch of draws.
//!
//! The verdicts are heuristics, not guarantees. A label passes when its
//! exact binomial 99% interval meets `[lambda, rho]`. The cost passes when
//! `mean - 3 SE <= bound`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use improv_core::rational::{self, Rational};
use serde::Serialize;
use statrs::function::beta::beta_reg;

use crate::engine::Draw;

pub const CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelStat {
    pub label: u64,
    pub count: u64,
    pub frequency: f64,
    pub interval: [f64; 2],
    pub within_bounds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostBin {
    pub cost: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostStat {
    pub mean: f64,
    pub std_error: f64,
    pub bound: String,
    pub within_bound: bool,
    pub histogram: Vec<CostBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordStat {
    pub trace: String,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub labels: bool,
    pub cost: bool,
    pub all: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub samples: u64,
    pub seed: u64,
    pub mode: String,
    pub lambda: String,
    pub rho: String,
    pub labels: Vec<LabelStat>,
    pub cost: CostStat,
    /// Per-word frequencies, omitted when more distinct words were seen
    /// than the report limit.
    pub words: Option<Vec<WordStat>>,
    /// The first few traces, in output order.
    pub traces: Vec<String>,
    pub verdicts: Verdicts,
    pub model: serde_json::Value,
}

/// What a batch is judged against.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub label_ids: Vec<u64>,
    pub lambda: Rational,
    pub rho: Rational,
    pub cost: Rational,
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub seed: u64,
    pub word_limit: usize,
    pub trace_dump: usize,
}

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let tail = (1.0 - confidence) / 2.0;
    let (k, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        beta_quantile(k, n - k + 1.0, tail)
    };
    let hi = if successes == trials {
        1.0
    } else {
        beta_quantile(k + 1.0, n - k, 1.0 - tail)
    };
    (lo, hi)
}

// Bisection on the regularized incomplete beta function, which is monotone in x.
fn beta_quantile(a: f64, b: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sample mean and its standard error.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

pub fn build_report(
    draws: &[Draw],
    bounds: &Bounds,
    mode: &str,
    model: serde_json::Value,
    opts: ReportOptions,
) -> EmpiricalReport {
    let n = draws.len() as u64;
    let lambda = rational::to_f64(&bounds.lambda);
    let rho = rational::to_f64(&bounds.rho);

    let mut label_counts = vec![0u64; bounds.label_ids.len()];
    for d in draws {
        label_counts[d.label] += 1;
    }
    let labels: Vec<LabelStat> = bounds
        .label_ids
        .iter()
        .zip(&label_counts)
        .map(|(&label, &count)| {
            let (lo, hi) = clopper_pearson(count, n, CONFIDENCE);
            LabelStat {
                label,
                count,
                frequency: if n == 0 { 0.0 } else { count as f64 / n as f64 },
                interval: [lo, hi],
                within_bounds: hi >= lambda && lo <= rho,
            }
        })
        .collect();

    let costs: Vec<f64> = draws.iter().map(|d| rational::to_f64(&d.cost)).collect();
    let (mean, se) = mean_and_se(&costs);
    let mut bins: BTreeMap<&Rational, u64> = BTreeMap::new();
    for d in draws {
        *bins.entry(&d.cost).or_default() += 1;
    }
    let cost = CostStat {
        mean,
        std_error: se,
        bound: rational::format_rational(&bounds.cost),
        within_bound: mean - 3.0 * se <= rational::to_f64(&bounds.cost),
        histogram: bins
            .into_iter()
            .map(|(c, count)| CostBin {
                cost: rational::format_rational(c),
                count,
            })
            .collect(),
    };

    let mut words: BTreeMap<&str, u64> = BTreeMap::new();
    for d in draws {
        *words.entry(&d.trace).or_default() += 1;
        if words.len() > opts.word_limit {
            break;
        }
    }
    let words = (words.len() <= opts.word_limit).then(|| {
        words
            .into_iter()
            .map(|(trace, count)| WordStat {
                trace: trace.to_string(),
                count,
                frequency: count as f64 / n as f64,
            })
            .collect()
    });

    let label_ok = labels.iter().all(|l| l.within_bounds);
    EmpiricalReport {
        samples: n,
        seed: opts.seed,
        mode: mode.to_string(),
        lambda: rational::format_rational(&bounds.lambda),
        rho: rational::format_rational(&bounds.rho),
        verdicts: Verdicts {
            labels: label_ok,
            cost: cost.within_bound,
            all: label_ok && cost.within_bound,
        },
        labels,
        cost,
        words,
        traces: draws
            .iter()
            .take(opts.trace_dump)
            .map(|d| d.trace.clone())
            .collect(),
        model,
    }
}

impl EmpiricalReport {
    /// Plot-ready CSV series: `(file name, contents)`.
    pub fn csv_series(&self) -> Vec<(&'static str, String)> {
        let mut labels = String::from("label,count,frequency,lower,upper\n");
        for l in &self.labels {
            let _ = writeln!(
                labels,
                "{},{},{},{},{}",
                l.label, l.count, l.frequency, l.interval[0], l.interval[1]
            );
        }
        let mut costs = String::from("cost,count\n");
        for b in &self.cost.histogram {
            let _ = writeln!(costs, "{},{}", b.cost, b.count);
        }
        let mut out = vec![("labels.csv", labels), ("costs.csv", costs)];
        if let Some(words) = &self.words {
            let mut s = String::from("trace,count,frequency\n");
            for w in words {
                let _ = writeln!(s, "\"{}\",{},{}", w.trace, w.count, w.frequency);
            }
            out.push(("words.csv", s));
        }
        out
    }
}
