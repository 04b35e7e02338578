//! Argument parsing and the command bodies.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use improv_core::approx::{
    enumerate_class_index, format_assignment, parse_formula, ApproxParams, ExactEnumerationOracle,
};
use improv_core::exact_scheme::{build_cost_class_table, SchemeOptions};
use improv_core::lqci::{feasibility_check, CostClassTable, FeasibilityReport};
use improv_core::maxent::{solve_melqci, MaxEntError, MaxEntProblem, MaxEntReport, SolverOptions};
use improv_core::rational::{self, Rational};
use improv_core::sampling::stream_rng;
use rand::Rng;
use serde_json::json;

use crate::engine::{self, Built, Mode, OracleChoice};
use crate::instance::{Instance, InstanceFile};
use crate::report::{build_report, Bounds, ReportOptions};

#[derive(Debug, Parser)]
#[command(
    name = "improv",
    version,
    about = "Labelled quantitative control improvisation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide feasibility and print the minimum-cost (or maximum-entropy) distribution.
    Check {
        instance: PathBuf,
        #[arg(long)]
        maxent: bool,
        /// Entropy gap target in bits for --maxent.
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
    },
    /// Print traces, one per line.
    Sample {
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Sample and print an empirical report as JSON.
    Stats {
        instance: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        mode: ModeArgs,
        /// Largest number of distinct traces listed individually.
        #[arg(long, default_value_t = 256)]
        word_limit: usize,
        /// Number of leading traces copied into the report.
        #[arg(long, default_value_t = 10)]
        traces: usize,
        /// Also write CSV histogram series into this directory.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Reformat an instance file in canonical form.
    Canon { instance: PathBuf },
    /// Exact oracle over DIMACS on stdin, speaking the external-oracle protocol.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Print the number of projected models.
    Count {
        #[arg(long, default_value = "0")]
        tau: String,
        #[arg(long, default_value = "0")]
        delta: String,
    },
    /// Print one uniformly chosen projected model, or UNSAT.
    Sample {
        #[arg(long, default_value = "0")]
        epsilon: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ModeArgs {
    /// Maximum-entropy distribution instead of the minimum-cost one.
    #[arg(long, conflicts_with = "approx")]
    pub maxent: bool,
    /// Entropy gap target in bits for --maxent.
    #[arg(long, default_value_t = 1e-6)]
    pub gap: f64,
    /// Approximate scheme over counting and sampling oracles (CNF instances).
    #[arg(long)]
    pub approx: bool,
    /// Cost slack: the expected cost stays below `(1 + zeta) c`.
    #[arg(long, default_value = "1", requires = "approx")]
    pub zeta: String,
    /// Multiplicative tolerance on the word probability bounds.
    #[arg(long, default_value = "0", requires = "approx")]
    pub gamma: String,
    /// Allowed failure probability of the oracles.
    #[arg(long, default_value = "0", requires = "approx")]
    pub delta: String,
    /// `exact` or `exec:<command>`.
    #[arg(long, default_value = "exact", requires = "approx")]
    pub oracle: OracleChoice,
}

impl ModeArgs {
    pub fn mode(&self) -> Result<Mode> {
        if self.approx {
            let parse = |name: &str, s: &str| -> Result<Rational> {
                rational::parse_rational(s)
                    .with_context(|| format!("--{name}: not a number: `{s}`"))
            };
            let params = ApproxParams {
                zeta: parse("zeta", &self.zeta)?,
                gamma: parse("gamma", &self.gamma)?,
                delta: parse("delta", &self.delta)?,
            };
            params.validate()?;
            Ok(Mode::Approx {
                params,
                oracle: self.oracle.clone(),
            })
        } else if self.maxent {
            Ok(Mode::MaxEnt { gap: self.gap })
        } else {
            Ok(Mode::Greedy)
        }
    }
}

/// How a successful command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Infeasible,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Done => 0,
            Outcome::Infeasible => 2,
        }
    }
}

/// Runs a command. Errors map to exit code 1.
pub fn run(
    cli: Cli,
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Outcome> {
    match cli.command {
        Command::Check {
            instance,
            maxent,
            gap,
        } => check(
            &InstanceFile::read(&instance)?.load()?,
            maxent,
            gap,
            out,
            err,
        ),
        Command::Sample {
            instance,
            count,
            seed,
            mode,
        } => {
            let instance = InstanceFile::read(&instance)?.load()?;
            let engine = match engine::build(&instance, &mode.mode()?)? {
                Built::Ready(e) => e,
                Built::Infeasible(why) => {
                    writeln!(err, "infeasible: {why}")?;
                    return Ok(Outcome::Infeasible);
                }
            };
            let draws = engine.sample(count, seed, engine::threads_from_env()?)?;
            for d in draws {
                writeln!(out, "{}", d.trace)?;
            }
            Ok(Outcome::Done)
        }
        Command::Stats {
            instance,
            samples,
            seed,
            mode,
            word_limit,
            traces,
            plot_dir,
        } => {
            let instance = InstanceFile::read(&instance)?.load()?;
            let engine = match engine::build(&instance, &mode.mode()?)? {
                Built::Ready(e) => e,
                Built::Infeasible(why) => {
                    writeln!(err, "infeasible: {why}")?;
                    return Ok(Outcome::Infeasible);
                }
            };
            let draws = engine.sample(samples, seed, engine::threads_from_env()?)?;
            let bounds = Bounds {
                label_ids: engine.label_ids.clone(),
                lambda: engine.lambda.clone(),
                rho: engine.rho.clone(),
                cost: engine.cost_bound.clone(),
            };
            let opts = ReportOptions {
                seed,
                word_limit,
                trace_dump: traces,
            };
            let report = build_report(&draws, &bounds, engine.mode, engine.model.clone(), opts);
            if let Some(dir) = plot_dir {
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
                for (name, body) in report.csv_series() {
                    let path = dir.join(name);
                    std::fs::write(&path, body)
                        .with_context(|| format!("cannot write {}", path.display()))?;
                }
            }
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
            Ok(Outcome::Done)
        }
        Command::Canon { instance } => {
            write!(
                out,
                "{}",
                InstanceFile::read(&instance)?.to_canonical_json()
            )?;
            Ok(Outcome::Done)
        }
        Command::Oracle(cmd) => oracle(cmd, stdin, out),
    }
}

fn class_table(instance: &Instance) -> Result<CostClassTable> {
    Ok(match instance {
        Instance::Dfa(d) => {
            let p = &d.params;
            build_cost_class_table(
                &d.hard,
                &d.label,
                &d.cost,
                &d.labels,
                p.m,
                p.n,
                &SchemeOptions::default(),
            )?
            .table
        }
        Instance::Cnf(spec, _) => {
            enumerate_class_index(spec, &ExactEnumerationOracle::default())?.table
        }
    })
}

fn check(
    instance: &Instance,
    maxent: bool,
    gap: f64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Outcome> {
    let params = instance.params();
    params.validate()?;
    let table = class_table(instance)?;
    let infeasible = |reason: String, detail: String, out: &mut dyn Write, err: &mut dyn Write| {
        writeln!(err, "infeasible: {detail}")?;
        serde_json::to_writer_pretty(
            &mut *out,
            &json!({ "feasible": false, "reason": reason, "detail": detail }),
        )?;
        writeln!(out)?;
        Ok::<_, anyhow::Error>(Outcome::Infeasible)
    };
    if maxent {
        let problem = MaxEntProblem::new(table.clone(), params);
        let options = SolverOptions {
            gap_target: gap,
            ..SolverOptions::default()
        };
        return match solve_melqci(&problem, &options) {
            Ok(sol) => {
                let report = MaxEntReport {
                    distribution: sol.spec(&table),
                    entropy_bits: sol.entropy_bits,
                    gap_bound: sol.gap_bound,
                    residuals: sol.residuals,
                };
                let mut v = serde_json::to_value(&report)?;
                v["feasible"] = json!(true);
                v["table"] = serde_json::to_value(&table)?;
                serde_json::to_writer_pretty(&mut *out, &v)?;
                writeln!(out)?;
                Ok(Outcome::Done)
            }
            Err(MaxEntError::Infeasible(why)) => {
                infeasible(why.reason.to_string(), why.to_string(), out, err)
            }
            Err(e) => Err(e.into()),
        };
    }
    match feasibility_check(params, &table) {
        FeasibilityReport::Feasible(spec) => {
            let v = json!({
                "feasible": true,
                "expected_cost": rational::format_rational(&spec.expected_cost),
                "distribution": spec,
                "table": table,
            });
            serde_json::to_writer_pretty(&mut *out, &v)?;
            writeln!(out)?;
            Ok(Outcome::Done)
        }
        FeasibilityReport::Infeasible(why) => {
            infeasible(why.reason.to_string(), why.to_string(), out, err)
        }
    }
}

fn oracle(cmd: OracleCommand, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<Outcome> {
    let mut text = String::new();
    stdin.read_to_string(&mut text)?;
    let formula = parse_formula(&text)?;
    let oracle = ExactEnumerationOracle::default();
    let models = oracle.models(&formula)?;
    match cmd {
        OracleCommand::Count { tau, delta } => {
            for (name, v) in [("tau", &tau), ("delta", &delta)] {
                if rational::parse_rational(v).is_err() {
                    bail!("--{name}: not a number: `{v}`");
                }
            }
            writeln!(out, "{}", models.len())?;
        }
        OracleCommand::Sample { epsilon, seed } => {
            if rational::parse_rational(&epsilon).is_err() {
                bail!("--epsilon: not a number: `{epsilon}`");
            }
            if models.is_empty() {
                writeln!(out, "UNSAT")?;
            } else {
                let mut rng = stream_rng(seed, 0);
                let m = models[rng.gen_range(0..models.len())];
                let x = improv_core::approx::unpack(m, formula.projection.len());
                writeln!(out, "{}", format_assignment(&x, &formula.projection))?;
            }
        }
    }
    Ok(Outcome::Done)
}
