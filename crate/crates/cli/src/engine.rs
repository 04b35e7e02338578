//! Builds a sampler for an instance and draws traces in parallel with a
//! fixed stream layout, so output depends only on the seed.

use std::sync::Arc;

use anyhow::{bail, Context, Result};
use improv_core::approx::{
    build_approx_improviser, enumerate_class_index, render_bits, ApproxImproviser, ApproxOutcome,
    ApproxParams, CnfExactImproviser, ExactEnumerationOracle, ExecOracle,
};
use improv_core::automata::render_word;
use improv_core::exact_scheme::{build_improviser, Improviser, SchemeError, SchemeOptions};
use improv_core::lqci::{feasibility_check, FeasibilityReport, ImprovisingDistributionSpec};
use improv_core::maxent::{
    build_maxent_improviser, solve_melqci, MaxEntError, MaxEntProblem, MaxEntSolution,
    SolverOptions,
};
use improv_core::rational::{self, Rational};
use improv_core::sampling::{stream_rng, SeededRng};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::instance::Instance;

/// Draws per random stream. Stream `j` produces draws `j*CHUNK..(j+1)*CHUNK`.
pub const CHUNK: u64 = 4096;

#[derive(Debug, Clone)]
pub enum OracleChoice {
    Exact,
    Exec(String),
}

impl std::str::FromStr for OracleChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "exact" {
            Ok(OracleChoice::Exact)
        } else if let Some(cmd) = s.strip_prefix("exec:") {
            Ok(OracleChoice::Exec(cmd.to_string()))
        } else {
            Err(format!("expected `exact` or `exec:<command>`, got `{s}`"))
        }
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Mode {
    Greedy,
    MaxEnt {
        gap: f64,
    },
    Approx {
        params: ApproxParams,
        oracle: OracleChoice,
    },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Greedy => "greedy",
            Mode::MaxEnt { .. } => "maxent",
            Mode::Approx { .. } => "approx",
        }
    }
}

/// One emitted trace with its label index and cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Draw {
    pub trace: String,
    pub label: usize,
    pub cost: Rational,
}

#[allow(clippy::large_enum_variant)]
enum Sampler {
    Dfa(Improviser),
    Cnf(Box<CnfExactImproviser>),
    Approx(ApproxImproviser),
}

/// A ready sampler plus what the statistics need to judge its output.
pub struct Engine {
    sampler: Sampler,
    pub mode: &'static str,
    pub label_ids: Vec<u64>,
    pub lambda: Rational,
    pub rho: Rational,
    /// `c`, or `(1 + zeta) c` for the approximate scheme.
    pub cost_bound: Rational,
    /// Exact facts about the distribution, reported alongside samples.
    pub model: Value,
}

pub enum Built {
    Ready(Box<Engine>),
    Infeasible(String),
}

fn spec_summary(spec: &ImprovisingDistributionSpec) -> Value {
    json!({
        "expected_cost": rational::format_rational(&spec.expected_cost),
        "label_marginals": spec.label_marginals.iter().map(rational::format_rational).collect::<Vec<_>>(),
    })
}

fn maxent_summary(spec: &ImprovisingDistributionSpec, sol: &MaxEntSolution) -> Value {
    let mut v = spec_summary(spec);
    v["entropy_bits"] = json!(sol.entropy_bits);
    v["gap_bound"] = json!(sol.gap_bound);
    v["greedy_entropy_bits"] = json!(sol.greedy_entropy_bits);
    v
}

fn solver_options(gap: f64) -> SolverOptions {
    SolverOptions {
        gap_target: gap,
        ..SolverOptions::default()
    }
}

pub fn build(instance: &Instance, mode: &Mode) -> Result<Built> {
    let params = instance.params();
    let mut cost_bound = params.c.clone();
    let (sampler, label_ids, model) = match (instance, mode) {
        (Instance::Dfa(d), Mode::Greedy) => match build_improviser(d, &SchemeOptions::default()) {
            Ok(imp) => {
                let model = spec_summary(imp.spec());
                let ids = imp.spec().labels.clone();
                (Sampler::Dfa(imp), ids, model)
            }
            Err(SchemeError::Infeasible(why)) => return Ok(Built::Infeasible(why.to_string())),
            Err(e) => return Err(e.into()),
        },
        (Instance::Dfa(d), Mode::MaxEnt { gap }) => {
            match build_maxent_improviser(d, &SchemeOptions::default(), &solver_options(*gap)) {
                Ok((imp, sol)) => {
                    let model = maxent_summary(imp.spec(), &sol);
                    let ids = imp.spec().labels.clone();
                    (Sampler::Dfa(imp), ids, model)
                }
                Err(MaxEntError::Infeasible(why)) => return Ok(Built::Infeasible(why.to_string())),
                Err(e) => return Err(e.into()),
            }
        }
        (Instance::Cnf(spec, p), Mode::Greedy | Mode::MaxEnt { .. }) => {
            let index = enumerate_class_index(spec, &ExactEnumerationOracle::default())?;
            let (dist, model) = if let Mode::MaxEnt { gap } = mode {
                let problem = MaxEntProblem::new(index.table.clone(), p);
                match solve_melqci(&problem, &solver_options(*gap)) {
                    Ok(sol) => {
                        let s = sol.spec(&index.table);
                        let model = maxent_summary(&s, &sol);
                        (s, model)
                    }
                    Err(MaxEntError::Infeasible(why)) => {
                        return Ok(Built::Infeasible(why.to_string()))
                    }
                    Err(e) => return Err(e.into()),
                }
            } else {
                match feasibility_check(p, &index.table) {
                    FeasibilityReport::Feasible(s) => {
                        let model = spec_summary(&s);
                        (s, model)
                    }
                    FeasibilityReport::Infeasible(why) => {
                        return Ok(Built::Infeasible(why.to_string()))
                    }
                }
            };
            let ids = dist.labels.clone();
            let sampler = Sampler::Cnf(Box::new(CnfExactImproviser::new(dist, index)));
            (sampler, ids, model)
        }
        (Instance::Cnf(spec, p), Mode::Approx { params: ap, oracle }) => {
            let outcome = match oracle {
                OracleChoice::Exact => {
                    let o = Arc::new(ExactEnumerationOracle::default());
                    build_approx_improviser(spec, p, ap, o.as_ref(), o.clone())?
                }
                OracleChoice::Exec(cmd) => {
                    let o = ExecOracle::new(cmd)?;
                    build_approx_improviser(spec, p, ap, &o, Arc::new(o.clone()))?
                }
            };
            match outcome {
                ApproxOutcome::Improviser(imp) => {
                    cost_bound = (rational::ratio(1, 1) + &ap.zeta) * &p.c;
                    let model = serde_json::to_value(imp.report())?;
                    (
                        Sampler::Approx(imp),
                        (0..spec.labels as u64).collect(),
                        model,
                    )
                }
                ApproxOutcome::Refused(why) => return Ok(Built::Infeasible(why.to_string())),
            }
        }
        (Instance::Dfa(_), Mode::Approx { .. }) => {
            bail!("the approximate scheme needs a CNF instance")
        }
    };
    Ok(Built::Ready(Box::new(Engine {
        sampler,
        mode: mode.name(),
        label_ids,
        lambda: params.lambda.clone(),
        rho: params.rho.clone(),
        cost_bound,
        model,
    })))
}

impl Engine {
    /// One draw from `rng`.
    pub fn draw(&self, rng: &mut SeededRng) -> Result<Draw> {
        Ok(match &self.sampler {
            Sampler::Dfa(imp) => {
                let ((i, k), word) = imp.sample_with_class(rng);
                Draw {
                    trace: render_word(imp.alphabet(), &word),
                    label: i,
                    cost: imp.spec().costs[k].clone(),
                }
            }
            Sampler::Cnf(imp) => {
                let ((i, k), x) = imp.sample(rng);
                Draw {
                    trace: render_bits(&x),
                    label: i,
                    cost: imp.spec().costs[k].clone(),
                }
            }
            Sampler::Approx(imp) => {
                let s = imp.sample(rng).context("generator oracle failed")?;
                let (label, cost) = imp
                    .spec()
                    .evaluate(&s.x)
                    .context("generator returned a trace outside the specification")?;
                Draw {
                    trace: render_bits(&s.x),
                    label,
                    cost: rational::from_biguint(&cost),
                }
            }
        })
    }

    /// `count` draws for `seed`, split over `threads` workers. The result
    /// does not depend on `threads`.
    pub fn sample(&self, count: u64, seed: u64, threads: usize) -> Result<Vec<Draw>> {
        let chunks = count.div_ceil(CHUNK);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .context("cannot start worker threads")?;
        let parts: Vec<Result<Vec<Draw>>> = pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|j| {
                    let len = CHUNK.min(count - j * CHUNK);
                    let mut rng = stream_rng(seed, j);
                    (0..len).map(|_| self.draw(&mut rng)).collect()
                })
                .collect()
        });
        let mut out = Vec::with_capacity(count as usize);
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }
}

/// Worker count from `IMPROV_THREADS`, else the available parallelism.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var("IMPROV_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("IMPROV_THREADS must be a positive integer, got `{v}`"))?;
            if n == 0 {
                bail!("IMPROV_THREADS must be positive");
            }
            Ok(n)
        }
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}
