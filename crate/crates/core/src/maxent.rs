//! Maximum-entropy improvisation.
//!
//! With word bounds dropped (`alpha = 0`, `beta = 1`) the best distribution
//! is uniform inside each cost class, so the search is over class masses
//! `D(i,k)`. The objective `sum -D log D + D log |I_{i,k}|` is concave and
//! every constraint is linear, so the problem is solved through its dual:
//!
//! * for a cost multiplier `mu`, mass inside label `i` is proportional to
//!   `|I_{i,k}| exp(-mu theta_k)`, and label masses follow by clipping
//!   `t Z_i(mu)` into `[lambda, rho]` with `t` chosen to normalise;
//! * the expected cost of that maximiser is non-increasing in `mu`, so the
//!   right `mu` is found by bisection;
//! * any multipliers give an upper bound on the optimum (weak duality),
//!   which certifies the entropy gap of the returned point.
//!
//! The floating-point solution is rounded to exact rationals and, if it
//! violates a constraint, mixed with the greedy distribution (which is
//! feasible) until every constraint holds exactly.

use std::f64::consts::LN_2;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact_scheme::{
    build_cost_class_table, ClassIndex, DfaInstance, Improviser, SchemeError, SchemeOptions,
};
use crate::lqci::{
    feasibility_check, CostClassTable, FeasibilityReport, ImprovisingDistributionSpec,
    Infeasibility, LqciParams,
};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MaxEntError {
    #[error("infeasible: {0}")]
    Infeasible(Infeasibility),
    #[error("entropy gap {gap} bits above target {target} after {iterations} iterations")]
    NoConvergence {
        gap: f64,
        target: f64,
        iterations: usize,
    },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target entropy gap, in bits.
    pub gap_target: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gap_target: 1e-6,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntProblem {
    pub table: CostClassTable,
    pub lambda: Rational,
    pub rho: Rational,
    pub c: Rational,
}

impl MaxEntProblem {
    pub fn new(table: CostClassTable, params: &LqciParams) -> Self {
        MaxEntProblem {
            table,
            lambda: params.lambda.clone(),
            rho: params.rho.clone(),
            c: params.c.clone(),
        }
    }

    /// The equivalent LQCI parameters with trivial word bounds.
    pub fn params(&self) -> LqciParams {
        let labels = self.table.num_labels();
        LqciParams {
            m: 0,
            n: 0,
            c: self.c.clone(),
            lambda: self.lambda.clone(),
            rho: self.rho.clone(),
            alpha: vec![Rational::zero(); labels],
            beta: vec![Rational::one(); labels],
        }
    }
}

/// Constraint violations of the returned distribution (all zero after
/// exact repair; kept for reporting).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `max(0, E[cost] - c)`
    pub cost: f64,
    /// `max_i max(0, lambda - P_i)`
    pub label_lower: f64,
    /// `max_i max(0, P_i - rho)`
    pub label_upper: f64,
    /// `|sum D - 1|`
    pub total: f64,
    /// `max(0, -min D)`
    pub negativity: f64,
    /// Mass on empty classes.
    pub empty_classes: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        [
            self.cost,
            self.label_lower,
            self.label_upper,
            self.total,
            self.negativity,
            self.empty_classes,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntSolution {
    /// Exact class masses `D(i,k)`.
    pub joint: Vec<Vec<Rational>>,
    pub entropy_bits: f64,
    /// Certified bound on `optimum - entropy_bits`.
    pub gap_bound: f64,
    /// Entropy of the greedy starting point.
    pub greedy_entropy_bits: f64,
    pub residuals: Residuals,
    /// Final cost multiplier (nats per unit cost).
    pub cost_multiplier: f64,
    pub iterations: usize,
}

impl MaxEntSolution {
    pub fn spec(&self, table: &CostClassTable) -> ImprovisingDistributionSpec {
        ImprovisingDistributionSpec::from_joint(table, &self.joint)
    }
}

/// JSON view of a solution: the distribution plus solver diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct MaxEntReport {
    #[serde(flatten)]
    pub distribution: ImprovisingDistributionSpec,
    pub entropy_bits: f64,
    pub gap_bound: f64,
    pub residuals: Residuals,
}

/// Entropy in bits of the distribution placing mass `joint[i][k]`
/// uniformly on class `(i,k)` of size `sizes[i][k]`.
pub fn entropy(joint: &[Vec<f64>], sizes: &[Vec<BigUint>]) -> f64 {
    let mut h = 0.0;
    for (row, srow) in joint.iter().zip(sizes) {
        for (&d, s) in row.iter().zip(srow) {
            if d > 0.0 {
                h += d * (rational::ln_biguint(s) - d.ln());
            }
        }
    }
    h / LN_2
}

fn exact_entropy(joint: &[Vec<Rational>], sizes: &[Vec<BigUint>]) -> f64 {
    let floats: Vec<Vec<f64>> = joint
        .iter()
        .map(|row| row.iter().map(rational::to_f64).collect())
        .collect();
    entropy(&floats, sizes)
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return f64::NEG_INFINITY;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Dense float view of the problem over nonempty classes.
struct Model {
    /// `(label, cost index, ln size)`
    classes: Vec<(usize, usize, f64)>,
    costs: Vec<f64>,
    labels: usize,
    lambda: f64,
    rho: f64,
    c: f64,
}

/// Lagrangian maximiser for a fixed cost multiplier.
struct Point {
    mass: Vec<f64>,
    cost: f64,
    /// Dual objective at the multipliers implied by this point, in nats.
    dual: f64,
}

impl Model {
    fn new(problem: &MaxEntProblem) -> Self {
        let t = &problem.table;
        let mut classes = Vec::new();
        for i in 0..t.num_labels() {
            for k in 0..t.num_costs() {
                let s = t.size(i, k);
                if !s.is_zero() {
                    classes.push((i, k, rational::ln_biguint(s)));
                }
            }
        }
        Model {
            classes,
            costs: t.costs.iter().map(rational::to_f64).collect(),
            labels: t.num_labels(),
            lambda: rational::to_f64(&problem.lambda),
            rho: rational::to_f64(&problem.rho),
            c: rational::to_f64(&problem.c),
        }
    }

    fn log_partition(&self, mu: f64) -> Vec<f64> {
        (0..self.labels)
            .map(|i| {
                log_sum_exp(
                    self.classes
                        .iter()
                        .filter(|(l, _, _)| *l == i)
                        .map(|&(_, k, ls)| ls - mu * self.costs[k]),
                )
            })
            .collect()
    }

    /// Label masses `clip(t Z_i, lambda, rho)` normalised by bisection on `ln t`.
    fn label_masses(&self, log_z: &[f64]) -> (Vec<f64>, f64) {
        let clip = |x: f64| {
            let p = x.exp();
            p.clamp(self.lambda, self.rho)
        };
        let total = |x: f64| log_z.iter().map(|lz| clip(x + lz)).sum::<f64>();
        let max_z = log_z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_z = log_z.iter().copied().fold(f64::INFINITY, f64::min);
        let (mut lo, mut hi) = (-max_z - 800.0, -min_z + 50.0);
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        let mut p: Vec<f64> = log_z.iter().map(|lz| clip(x + lz)).collect();
        let sum: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= sum);
        (p, x)
    }

    fn point(&self, mu: f64) -> Point {
        let log_z = self.log_partition(mu);
        let (labels, x) = self.label_masses(&log_z);
        let mass: Vec<f64> = self
            .classes
            .iter()
            .map(|&(i, k, ls)| labels[i] * (ls - mu * self.costs[k] - log_z[i]).exp())
            .collect();
        let cost = mass
            .iter()
            .zip(&self.classes)
            .map(|(d, &(_, k, _))| d * self.costs[k])
            .sum();
        // Label multipliers nu_i = ln(P_i / (t Z_i)); unclipped labels get 0.
        let nu: Vec<f64> = labels
            .iter()
            .zip(&log_z)
            .map(|(p, lz)| if *p > 0.0 { p.ln() - lz - x } else { 0.0 })
            .collect();
        let lse = log_sum_exp(
            self.classes
                .iter()
                .map(|&(i, k, ls)| ls - mu * self.costs[k] + nu[i]),
        );
        let penalty: f64 = nu
            .iter()
            .map(|&v| {
                if v >= 0.0 {
                    -self.lambda * v
                } else {
                    -self.rho * v
                }
            })
            .sum();
        Point {
            mass,
            cost,
            dual: lse + mu * self.c + penalty,
        }
    }

    fn primal_nats(&self, mass: &[f64]) -> f64 {
        mass.iter()
            .zip(&self.classes)
            .filter(|(d, _)| **d > 0.0)
            .map(|(d, &(_, _, ls))| d * (ls - d.ln()))
            .sum()
    }
}

/// Solves the maximum-entropy problem to within `options.gap_target` bits.
pub fn solve_melqci(
    problem: &MaxEntProblem,
    options: &SolverOptions,
) -> Result<MaxEntSolution, MaxEntError> {
    let greedy = match feasibility_check(&problem.params(), &problem.table) {
        FeasibilityReport::Feasible(spec) => spec.joint_matrix(),
        FeasibilityReport::Infeasible(why) => return Err(MaxEntError::Infeasible(why)),
    };
    let sizes = &problem.table.sizes;
    let greedy_entropy = exact_entropy(&greedy, sizes);
    let model = Model::new(problem);
    let target_nats = options.gap_target * LN_2;
    let mut iterations = 0usize;

    let mut mu_hi = 0.0;
    let mut best = model.point(0.0);
    if best.cost > model.c {
        // Expand until the cost bound holds, then bisect the multiplier.
        let mut mu_lo = 0.0;
        mu_hi = 1.0 / model.costs.iter().copied().fold(1.0, f64::max);
        loop {
            iterations += 1;
            best = model.point(mu_hi);
            if best.cost <= model.c || mu_hi > 1e12 || iterations >= options.max_iterations {
                break;
            }
            mu_lo = mu_hi;
            mu_hi *= 2.0;
        }
        while iterations < options.max_iterations && best.cost <= model.c {
            let gap = best.dual - model.primal_nats(&best.mass);
            if gap <= 0.25 * target_nats || mu_hi - mu_lo <= f64::EPSILON * mu_hi {
                break;
            }
            iterations += 1;
            let mid = 0.5 * (mu_lo + mu_hi);
            let candidate = model.point(mid);
            if candidate.cost <= model.c {
                mu_hi = mid;
                best = candidate;
            } else {
                mu_lo = mid;
            }
        }
    }

    let joint = repair(problem, &model, &best.mass, &greedy);
    let mut entropy_bits = exact_entropy(&joint, sizes);
    let mut joint = joint;
    if entropy_bits < greedy_entropy {
        joint = greedy;
        entropy_bits = greedy_entropy;
    }
    let gap_bound = (best.dual / LN_2 - entropy_bits).max(0.0);
    if gap_bound > options.gap_target {
        return Err(MaxEntError::NoConvergence {
            gap: gap_bound,
            target: options.gap_target,
            iterations,
        });
    }
    let residuals = residuals(problem, &joint);
    Ok(MaxEntSolution {
        joint,
        entropy_bits,
        gap_bound,
        greedy_entropy_bits: greedy_entropy,
        residuals,
        cost_multiplier: mu_hi,
        iterations,
    })
}

/// Rounds the float solution to rationals, normalises it exactly, and mixes
/// in the greedy point just enough to satisfy every linear constraint.
fn repair(
    problem: &MaxEntProblem,
    model: &Model,
    mass: &[f64],
    greedy: &[Vec<Rational>],
) -> Vec<Vec<Rational>> {
    let t = &problem.table;
    let scale = Rational::from_integer((BigUint::one() << 60u32).into());
    let mut joint = vec![vec![Rational::zero(); t.num_costs()]; t.num_labels()];
    for (d, &(i, k, _)) in mass.iter().zip(&model.classes) {
        let r = rational::from_f64(d.max(0.0)).unwrap_or_default();
        joint[i][k] = (r * &scale).round() / &scale;
    }
    let sum: Rational = joint.iter().flatten().sum();
    if sum.is_zero() {
        return greedy.to_vec();
    }
    for v in joint.iter_mut().flatten() {
        *v = &*v / &sum;
    }
    project_labels(&mut joint, &problem.lambda, &problem.rho);

    // Each constraint reads a . D <= b; for a violated one pick the mixing
    // weight theta where (1 - theta) a.D + theta a.G = b.
    let mut theta = Rational::zero();
    let mut need = |at_d: Rational, at_g: Rational, bound: &Rational| {
        if at_d > *bound {
            let w = (&at_d - bound) / (&at_d - at_g);
            if w > theta {
                theta = w;
            }
        }
    };
    let cost_of = |m: &[Vec<Rational>]| -> Rational {
        m.iter()
            .flat_map(|row| row.iter().zip(&t.costs).map(|(d, c)| d * c))
            .sum()
    };
    need(cost_of(&joint), cost_of(greedy), &problem.c);
    for i in 0..t.num_labels() {
        let pd: Rational = joint[i].iter().sum();
        let pg: Rational = greedy[i].iter().sum();
        need(pd.clone(), pg.clone(), &problem.rho);
        need(-pd, -pg, &-problem.lambda.clone());
    }
    if theta.is_zero() {
        return joint;
    }
    let keep = Rational::one() - &theta;
    joint
        .iter()
        .zip(greedy)
        .map(|(row, grow)| {
            row.iter()
                .zip(grow)
                .map(|(d, g)| &keep * d + &theta * g)
                .collect()
        })
        .collect()
}

/// Rescales rows so every label mass lies in `[lambda, rho]` exactly while
/// the total stays 1. Rounding can leave a label a hair outside its bound,
/// and mixing toward a greedy point sitting on that same bound never fixes it.
fn project_labels(joint: &mut [Vec<Rational>], lambda: &Rational, rho: &Rational) {
    let masses: Vec<Rational> = joint.iter().map(|r| r.iter().sum()).collect();
    let mut target = masses.clone();
    let mut fixed = vec![false; joint.len()];
    for _ in 0..=joint.len() {
        let pinned: Rational = (0..joint.len())
            .filter(|&i| fixed[i])
            .map(|i| &target[i])
            .sum();
        let free: Rational = (0..joint.len())
            .filter(|&i| !fixed[i])
            .map(|i| &masses[i])
            .sum();
        if free.is_zero() {
            break;
        }
        let scale = (Rational::one() - pinned) / free;
        let mut changed = false;
        let open: Vec<usize> = (0..joint.len()).filter(|&i| !fixed[i]).collect();
        for i in open {
            let t = &masses[i] * &scale;
            if t < *lambda || t > *rho {
                target[i] = if t < *lambda {
                    lambda.clone()
                } else {
                    rho.clone()
                };
                fixed[i] = true;
                changed = true;
            } else {
                target[i] = t;
            }
        }
        if !changed {
            break;
        }
    }
    let feasible = target.iter().all(|t| lambda <= t && t <= rho)
        && target.iter().sum::<Rational>() == Rational::one()
        && masses
            .iter()
            .zip(&target)
            .all(|(m, t)| !m.is_zero() || t.is_zero());
    if !feasible {
        return;
    }
    for ((row, m), t) in joint.iter_mut().zip(&masses).zip(&target) {
        if !m.is_zero() {
            let f = t / m;
            row.iter_mut().for_each(|d| *d = &*d * &f);
        }
    }
}

fn residuals(problem: &MaxEntProblem, joint: &[Vec<Rational>]) -> Residuals {
    let t = &problem.table;
    let pos = |r: Rational| {
        if r.is_positive() {
            rational::to_f64(&r)
        } else {
            0.0
        }
    };
    let cost: Rational = joint
        .iter()
        .flat_map(|row| row.iter().zip(&t.costs).map(|(d, c)| d * c))
        .sum();
    let mut r = Residuals {
        cost: pos(cost - &problem.c),
        ..Residuals::default()
    };
    for (i, row) in joint.iter().enumerate() {
        let p: Rational = row.iter().sum();
        r.label_lower = r.label_lower.max(pos(&problem.lambda - &p));
        r.label_upper = r.label_upper.max(pos(&p - &problem.rho));
        for (k, d) in row.iter().enumerate() {
            r.negativity = r.negativity.max(pos(-d.clone()));
            if t.size(i, k).is_zero() {
                r.empty_classes = r.empty_classes.max(rational::to_f64(d).abs());
            }
        }
    }
    let total: Rational = joint.iter().flatten().sum();
    r.total = rational::to_f64(&(total - Rational::one())).abs();
    r
}

/// Builds the class table for a DFA instance (word bounds are ignored) and
/// wraps the maximum-entropy class masses in an improviser.
pub fn build_maxent_improviser(
    instance: &DfaInstance,
    scheme: &SchemeOptions,
    solver: &SolverOptions,
) -> Result<(Improviser, MaxEntSolution), MaxEntError> {
    instance.params.validate().map_err(SchemeError::from)?;
    let p = &instance.params;
    let index: ClassIndex = build_cost_class_table(
        &instance.hard,
        &instance.label,
        &instance.cost,
        &instance.labels,
        p.m,
        p.n,
        scheme,
    )?;
    let problem = MaxEntProblem::new(index.table.clone(), p);
    let solution = solve_melqci(&problem, solver)?;
    let spec = solution.spec(&index.table);
    Ok((Improviser::new(spec, Arc::new(index)), solution))
}
