//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//! Runs as a plain binary so the report is always printed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use improv_cli::instance::{Instance, InstanceFile};
use improv_cli::report::{clopper_pearson, mean_and_se, CONFIDENCE};
use improv_core::approx::{
    approximate_greedy_cost, bucket_probabilities, build_approx_improviser, enumerate_distribution,
    toy_cnf, ApproxImproviser, ApproxOutcome, ApproxParams, BucketOutcome, BucketPlan, CnfSpec,
    ExactEnumerationOracle, Refusal,
};
use improv_core::automata::{
    cost_tracking_dfa, count_words, possible_costs, sample_uniform, CountTable, Dfa, WeightedDfa,
};
use improv_core::exact_scheme::{build_improviser, toy_instance, DfaInstance, SchemeOptions};
use improv_core::gridworld::{parse_map, GridMap};
use improv_core::lqci::{feasibility_check, CostClassTable, FeasibilityReport, LqciParams};
use improv_core::maxent::{
    build_maxent_improviser, entropy, solve_melqci, MaxEntError, MaxEntProblem, SolverOptions,
};
use improv_core::rational::{self, from_biguint, parse_rational, ratio, Rational};
use improv_core::sampling::stream_rng;
use improv_testkit::brute::{accepts, accumulated, all_words, count_by_length};
use improv_testkit::gen::{
    random_dfa, random_table, random_weighted_dfa, random_word_instance, table_of, TabulatedCnf,
};
use improv_testkit::grid::replay;
use improv_testkit::lp::{expected_cost, lqci_oracle, random_feasible};
use improv_testkit::stats::chi_square_p;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok_within(limit: Duration, started: Instant, detail: String) -> Check {
    let t = started.elapsed();
    ensure!(
        t <= limit,
        "{detail}; took {:.1}s, limit {}s",
        t.as_secs_f64(),
        limit.as_secs()
    );
    Ok(detail)
}

fn toy() -> Check {
    let t0 = Instant::now();
    let imp = build_improviser(&toy_instance(ratio(129, 50)), &SchemeOptions::default())
        .map_err(|e| e.to_string())?;
    let s = imp.spec();
    let nonzero = |i: usize| -> Vec<Rational> {
        s.class_probs[i]
            .iter()
            .filter(|p| !p.is_zero())
            .cloned()
            .collect()
    };
    ensure!(
        nonzero(0) == vec![ratio(1, 2), ratio(3, 10), ratio(1, 10), ratio(1, 10)],
        "label 1 conditionals {:?}",
        nonzero(0)
    );
    ensure!(s.label_expected_costs[0] == ratio(11, 5), "label 1 cost");
    ensure!(s.label_expected_costs[1] == ratio(41, 10), "label 2 cost");
    ensure!(
        s.label_marginals == vec![ratio(4, 5), ratio(1, 5)],
        "marginals"
    );
    ensure!(s.expected_cost == ratio(129, 50), "E = {}", s.expected_cost);
    ok_within(
        Duration::from_secs(1),
        t0,
        "E = 129/50, marginals 4/5, 1/5".into(),
    )
}

fn greedy_min(report: &FeasibilityReport) -> Option<Rational> {
    match report {
        FeasibilityReport::Feasible(spec) => Some(spec.expected_cost.clone()),
        FeasibilityReport::Infeasible(why) => {
            why.min_cost.as_deref().map(|s| parse_rational(s).unwrap())
        }
    }
}

fn word_instances() -> Vec<(Vec<improv_testkit::lp::WordEntry>, LqciParams)> {
    let mut rng = stream_rng(1001, 0);
    (0..240).map(|_| random_word_instance(&mut rng)).collect()
}

fn oracle_equivalence() -> Check {
    let t0 = Instant::now();
    let mut feasible = 0;
    let instances = word_instances();
    for (case, (words, params)) in instances.iter().enumerate() {
        let report = feasibility_check(params, &table_of(words, params.num_labels()));
        let oracle = lqci_oracle(words, params);
        ensure!(
            report.is_feasible() == oracle.feasible,
            "case {case} disagrees"
        );
        feasible += usize::from(oracle.feasible);
    }
    ok_within(
        Duration::from_secs(60),
        t0,
        format!("{} instances agree ({feasible} feasible)", instances.len()),
    )
}

fn cost_minimality() -> Check {
    let t0 = Instant::now();
    let mut rng = stream_rng(1002, 0);
    let (mut lp_equal, mut sampled) = (0, 0);
    for (case, (words, params)) in word_instances().iter().enumerate() {
        let report = feasibility_check(params, &table_of(words, params.num_labels()));
        let oracle = lqci_oracle(words, params);
        let greedy = greedy_min(&report);
        if let (Some(lp), Some(g)) = (&oracle.min_cost, &greedy) {
            ensure!(lp == g, "case {case}: greedy {g} vs LP {lp}");
            lp_equal += 1;
        }
        let Some(g) = greedy else { continue };
        for _ in 0..1000 {
            let Some(d) = random_feasible(words, params, &mut rng) else {
                break;
            };
            ensure!(
                g <= expected_cost(words, &d),
                "case {case}: a random point is cheaper"
            );
            sampled += 1;
        }
    }
    Ok(format!(
        "{lp_equal} LP minima matched, {sampled} random feasible points no cheaper ({:.1}s)",
        t0.elapsed().as_secs_f64()
    ))
}

fn dfa_counting() -> Check {
    let t0 = Instant::now();
    let mut rng = stream_rng(1003, 0);
    for case in 0..150 {
        let states = rng.gen_range(1..=6);
        let symbols = rng.gen_range(1..=3);
        let n = rng.gen_range(0..=10usize.min(if symbols == 3 { 9 } else { 10 }));
        let dfa = random_dfa(&mut rng, states, symbols);
        let brute = count_by_length(&dfa, n);
        let m = rng.gen_range(0..=n);
        let want: Vec<BigUint> = brute[m..=n].iter().map(|&c| c.into()).collect();
        ensure!(
            count_words(&dfa, m, n) == want,
            "case {case}: counts differ"
        );
    }
    let mut languages = 0;
    let mut worst = 1.0f64;
    while languages < 12 {
        let symbols = rng.gen_range(2..=3);
        let states = rng.gen_range(2..=6);
        let dfa = random_dfa(&mut rng, states, symbols);
        let n = if symbols == 2 { 6 } else { 4 };
        let words: Vec<_> = all_words(symbols, 1, n)
            .into_iter()
            .filter(|w| accepts(&dfa, w))
            .collect();
        if words.len() < 5 || words.len() > 400 {
            continue;
        }
        let index: BTreeMap<_, _> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let table = CountTable::build(&dfa, n);
        let mut counts = vec![0u64; words.len()];
        let mut draw = stream_rng(1004, languages);
        for _ in 0..100_000 {
            let w = sample_uniform(&dfa, 1, n, &table, &mut draw).map_err(|e| e.to_string())?;
            counts[index[&w]] += 1;
        }
        let p = chi_square_p(&counts, &vec![1.0 / words.len() as f64; words.len()]);
        ensure!(p > 1e-3, "language {languages}: chi-square p = {p}");
        worst = worst.min(p);
        languages += 1;
    }
    ok_within(
        Duration::from_secs(120),
        t0,
        format!("150 count cases exact; 12 languages at N = 1e5, min p = {worst:.4}"),
    )
}

fn cost_machinery() -> Check {
    let mut rng = stream_rng(1005, 0);
    for case in 0..120 {
        let symbols = rng.gen_range(1..=3);
        let q = rng.gen_range(1..=5);
        let w = random_weighted_dfa(&mut rng, q, symbols, 3);
        let q = rng.gen_range(1..=4);
        let hard = random_dfa(&mut rng, q, symbols);
        let n = rng.gen_range(0..=if symbols == 3 { 7 } else { 8 });
        let m = rng.gen_range(0..=n);
        let words = all_words(symbols, m, n);
        let brute: BTreeSet<u64> = words
            .iter()
            .filter(|x| accepts(&hard, x) && accepts(&w.dfa, x))
            .map(|x| accumulated(&w, x))
            .collect();
        let got = possible_costs(&w, &hard, m, n).map_err(|e| e.to_string())?;
        ensure!(
            got == brute.iter().copied().collect::<Vec<_>>(),
            "case {case}: possible costs"
        );
        let k = rng.gen_range(0..=12);
        let t = cost_tracking_dfa(&w, k);
        for x in &words {
            ensure!(
                accepts(&t, x) == (accepts(&w.dfa, x) && accumulated(&w, x) == k),
                "case {case}: cost tracking"
            );
        }
    }
    let dfa = Dfa::new(vec!["a".into()], 0, vec![true], vec![vec![0]]).unwrap();
    let w = WeightedDfa::new(dfa.clone(), vec![1]).unwrap();
    let theta = possible_costs(&w, &dfa, 3, 3).map_err(|e| e.to_string())?;
    ensure!(theta == vec![4], "self loop gives {theta:?}");
    Ok("120 weighted DFAs agree; self loop gives {4}".into())
}

fn exact_tolerances(zeta: Rational) -> ApproxParams {
    ApproxParams {
        zeta,
        gamma: ratio(0, 1),
        delta: ratio(0, 1),
    }
}

fn approx(spec: &CnfSpec, bounds: &LqciParams, params: &ApproxParams) -> ApproxOutcome {
    let oracle = Arc::new(ExactEnumerationOracle::default());
    build_approx_improviser(spec, bounds, params, oracle.as_ref(), oracle.clone()).unwrap()
}

fn toy_bounds(c: Rational) -> LqciParams {
    LqciParams {
        m: 0,
        n: 0,
        c,
        lambda: ratio(1, 5),
        rho: ratio(1, 1),
        alpha: vec![ratio(1, 10); 2],
        beta: vec![ratio(1, 2); 2],
    }
}

struct RandomCnf {
    cnf: TabulatedCnf,
    bounds: LqciParams,
    zeta: Rational,
}

fn random_cnfs(count: usize) -> Vec<RandomCnf> {
    let mut rng = stream_rng(1006, 0);
    let mut out = Vec::new();
    let mut case = 0;
    while out.len() < count {
        case += 1;
        let x_bits = if case % 20 == 0 {
            12
        } else {
            rng.gen_range(2..=8)
        };
        let labels = rng.gen_range(1..=3);
        let cost_bits = rng.gen_range(1..=3);
        let cnf = TabulatedCnf::random(&mut rng, x_bits, labels, cost_bits);
        let sizes: Vec<usize> = (0..labels)
            .map(|i| cnf.words().iter().filter(|(_, w)| w.label == i).count())
            .collect();
        let bounds = LqciParams {
            m: 0,
            n: 0,
            c: ratio(rng.gen_range(2..=40), 4),
            lambda: ratio(rng.gen_range(0..=2), 4 * labels as i64),
            rho: ratio(1, 1),
            alpha: sizes
                .iter()
                .map(|&s| {
                    if s == 0 || rng.gen_bool(0.5) {
                        ratio(0, 1)
                    } else {
                        ratio(1, 2 * s as i64)
                    }
                })
                .collect(),
            beta: sizes
                .iter()
                .map(|&s| {
                    if s <= 2 || rng.gen_bool(0.5) {
                        ratio(1, 1)
                    } else {
                        ratio(2, s as i64)
                    }
                })
                .collect(),
        };
        let zeta = [ratio(1, 2), ratio(1, 1), ratio(2, 1)][rng.gen_range(0..3)].clone();
        out.push(RandomCnf { cnf, bounds, zeta });
    }
    out
}

fn algorithm_one() -> Check {
    let t0 = Instant::now();
    let plan = BucketPlan::new(ratio(2, 1), 3);
    let zero = ratio(0, 1);
    let oracle = ExactEnumerationOracle::default();
    let out = approximate_greedy_cost(
        &toy_cnf(),
        0,
        &ratio(1, 10),
        &ratio(1, 2),
        &plan,
        &zero,
        &zero,
        &oracle,
    )
    .map_err(|e| e.to_string())?;
    let est = out.plan().ok_or("toy label refused")?;
    ensure!(
        est.probs == vec![ratio(1, 2), ratio(3, 10), ratio(1, 5)],
        "toy bucket probs {:?}",
        est.probs
    );
    ensure!(est.lo == ratio(19, 10), "toy Lo = {}", est.lo);
    let e = ratio(11, 5);
    ensure!(est.lo <= e && e <= ratio(2, 1) * &est.lo, "toy sandwich");

    let mut sandwiched = 0;
    let mut max_bits = 0;
    for (case, rc) in random_cnfs(70).iter().enumerate() {
        let labels = rc.cnf.spec.labels;
        let entries: Vec<_> = rc.cnf.words().into_iter().map(|(_, w)| w).collect();
        let r = Rational::one() + &rc.zeta;
        let oracle = ExactEnumerationOracle::default();
        let dp = exact_tolerances(rc.zeta.clone())
            .derive(labels, rc.cnf.spec.y.len())
            .unwrap();
        for i in 0..labels {
            let out = approximate_greedy_cost(
                &rc.cnf.spec,
                i,
                &rc.bounds.alpha[i],
                &rc.bounds.beta[i],
                &dp.plan,
                &zero,
                &zero,
                &oracle,
            )
            .map_err(|e| e.to_string())?;
            let one_label: Vec<_> = entries
                .iter()
                .filter(|w| w.label == i)
                .map(|w| improv_testkit::lp::WordEntry {
                    label: 0,
                    cost: w.cost.clone(),
                })
                .collect();
            let mut single = rc.bounds.clone();
            single.lambda = ratio(1, 1);
            single.rho = ratio(1, 1);
            single.alpha = vec![rc.bounds.alpha[i].clone()];
            single.beta = vec![rc.bounds.beta[i].clone()];
            single.c = ratio(1 << 20, 1);
            let exact = feasibility_check(&single, &table_of(&one_label, 1));
            match (out.plan(), exact.spec()) {
                (Some(p), Some(s)) => {
                    let e = &s.expected_cost;
                    ensure!(
                        &p.lo <= e && *e <= &r * &p.lo,
                        "case {case} label {i}: Lo {} E {}",
                        p.lo,
                        e
                    );
                    sandwiched += 1;
                }
                (None, None) => {}
                _ => {
                    return Err(format!(
                        "case {case} label {i}: bucket verdict differs from exact"
                    ))
                }
            }
        }
        max_bits = max_bits.max(rc.cnf.x_bits);
    }
    ensure!(sandwiched >= 50, "only {sandwiched} labels sandwiched");

    let counts = vec![BigUint::from(2u32), BigUint::from(2u32)];
    let lows = vec![ratio(1, 1), ratio(2, 1)];
    let many = bucket_probabilities(&counts, &lows, &ratio(1, 3), &ratio(1, 2), &zero);
    let few = bucket_probabilities(&counts, &lows, &zero, &ratio(1, 5), &zero);
    ensure!(
        matches!(many, BucketOutcome::TooManyWords { .. }),
        "too-many branch"
    );
    ensure!(
        matches!(few, BucketOutcome::TooFewWords { .. }),
        "too-few branch"
    );
    ok_within(
        Duration::from_secs(120),
        t0,
        format!("toy p = (1/2, 3/10, 1/5), Lo = 19/10; {sandwiched} labels with Lo <= E <= r Lo (up to {max_bits} bits); both refusals"),
    )
}

fn check_guarantees(
    imp: &ApproxImproviser,
    bounds: &LqciParams,
    zeta: &Rational,
) -> Result<Rational, String> {
    let spec = imp.spec();
    let dist = enumerate_distribution(imp, &ExactEnumerationOracle::default())
        .map_err(|e| e.to_string())?;
    let mut marginals = vec![Rational::zero(); spec.labels];
    let mut expected = Rational::zero();
    let mut rows = Vec::new();
    for (x, p) in &dist {
        let (label, cost) = spec
            .evaluate(x)
            .ok_or("trace outside the hard constraint")?;
        marginals[label] += p;
        expected += p * from_biguint(&cost);
        rows.push((label, p.clone()));
    }
    for (label, p) in rows {
        let q = &p / &marginals[label];
        ensure!(
            bounds.alpha[label] <= q && q <= bounds.beta[label],
            "word conditional {q} out of bounds"
        );
    }
    for m in &marginals {
        ensure!(
            bounds.lambda <= *m && *m <= bounds.rho,
            "label marginal {m} out of bounds"
        );
    }
    ensure!(
        expected <= (Rational::one() + zeta) * &bounds.c,
        "expected cost {expected} above (1+zeta)c"
    );
    Ok(expected)
}

fn end_to_end() -> Check {
    let toy = toy_cnf();
    let params = exact_tolerances(ratio(1, 1));
    let imp = approx(&toy, &toy_bounds(ratio(129, 50)), &params)
        .improviser()
        .ok_or("toy refused")?;
    check_guarantees(&imp, &toy_bounds(ratio(129, 50)), &ratio(1, 1))?;
    let low = imp.low().clone();
    let eps = ratio(1, 1000);
    ensure!(
        approx(&toy, &toy_bounds(low.clone()), &params)
            .improviser()
            .is_some(),
        "refused at c = Low"
    );
    ensure!(
        matches!(
            approx(&toy, &toy_bounds(&low - &eps), &params),
            ApproxOutcome::Refused(Refusal::LowExceedsBound { .. })
        ),
        "not refused below Low"
    );

    let (mut checked, mut bottoms) = (0, 0);
    let mut rng = stream_rng(1007, 0);
    for (case, rc) in random_cnfs(60).iter().enumerate() {
        let params = exact_tolerances(rc.zeta.clone());
        let mut open = rc.bounds.clone();
        open.c = ratio(1 << 20, 1);
        let Some(free) = approx(&rc.cnf.spec, &open, &params).improviser() else {
            continue;
        };
        let low = free.low().clone();
        let mut bounds = rc.bounds.clone();
        for c in [
            low.clone(),
            &low * ratio(rng.gen_range(1..=3), 4),
            &low + ratio(1, 8),
            rc.bounds.c.clone(),
        ] {
            bounds.c = c.clone();
            match approx(&rc.cnf.spec, &bounds, &params) {
                ApproxOutcome::Improviser(imp) => {
                    ensure!(low <= c, "case {case}: improviser despite Low > c");
                    check_guarantees(&imp, &bounds, &rc.zeta)
                        .map_err(|e| format!("case {case}: {e}"))?;
                    checked += 1;
                }
                ApproxOutcome::Refused(Refusal::LowExceedsBound { .. }) => {
                    ensure!(low > c, "case {case}: refused with Low <= c");
                    bottoms += 1;
                }
                ApproxOutcome::Refused(r) => {
                    return Err(format!("case {case}: unexpected refusal {r}"))
                }
            }
        }
    }
    ensure!(
        checked >= 50 && bottoms >= 20,
        "too few cases: {checked} improvisers, {bottoms} refusals"
    );
    Ok(format!("{checked} enumerated distributions meet all four clauses; {bottoms} refusals, each with Low > c"))
}

fn melqci() -> Check {
    let t0 = Instant::now();
    let sizes = vec![vec![BigUint::from(1u32), BigUint::from(1000u32)]; 2];
    let problem = MaxEntProblem {
        table: CostClassTable::new(vec![0, 1], vec![ratio(1, 1), ratio(2, 1)], sizes).unwrap(),
        lambda: ratio(1, 2),
        rho: ratio(1, 2),
        c: ratio(3, 2),
    };
    let sol = solve_melqci(&problem, &SolverOptions::default()).map_err(|e| e.to_string())?;
    for d in sol.joint.iter().flatten() {
        ensure!(
            (rational::to_f64(d) - 0.25).abs() <= 1e-6,
            "D = {}",
            rational::to_f64(d)
        );
    }
    let mut summed = 0.0;
    for (i, row) in sol.joint.iter().enumerate() {
        for (k, d) in row.iter().enumerate() {
            let size = problem.table.size(i, k).to_u64().unwrap();
            let p = rational::to_f64(d) / size as f64;
            summed -= size as f64 * p * p.log2();
        }
    }
    let h = |x: f64| -2.0 * (x * x.log2() + (0.5 - x) * ((0.5 - x) / 1000.0).log2());
    let grid = (0..=100_000)
        .map(|s| 0.25 + 0.25 * s as f64 / 100_000.0)
        .map(h)
        .fold(f64::MIN, f64::max);
    ensure!((summed - 6.9829).abs() <= 1e-4, "word summation {summed}");
    ensure!(
        (grid - sol.entropy_bits).abs() <= 1e-4,
        "grid search {grid} vs {}",
        sol.entropy_bits
    );
    ensure!(
        sol.residuals.max() <= 1e-8,
        "residual {}",
        sol.residuals.max()
    );

    let mut rng = stream_rng(1008, 0);
    let mut solved = 0;
    for case in 0..300 {
        let (table, params) = random_table(&mut rng);
        let problem = MaxEntProblem::new(table.clone(), &params);
        let sol = match solve_melqci(&problem, &SolverOptions::default()) {
            Ok(s) => s,
            Err(MaxEntError::Infeasible(_)) => continue,
            Err(e) => return Err(format!("case {case}: {e}")),
        };
        // The warm start is greedy with alpha = 0 and beta = 1.
        let greedy = feasibility_check(&problem.params(), &table)
            .spec()
            .cloned()
            .ok_or("greedy infeasible")?;
        let g: Vec<Vec<f64>> = greedy
            .joint_matrix()
            .iter()
            .map(|r| r.iter().map(rational::to_f64).collect())
            .collect();
        ensure!(
            sol.entropy_bits >= entropy(&g, &table.sizes) - 1e-12,
            "case {case}: below greedy"
        );
        ensure!(
            sol.residuals.max() <= 1e-8,
            "case {case}: residual {}",
            sol.residuals.max()
        );
        solved += 1;
    }
    ok_within(
        Duration::from_secs(60),
        t0,
        format!("D = 0.25, H = {:.5} bits (sum {summed:.5}, search {grid:.5}); {solved} random instances at or above greedy", sol.entropy_bits),
    )
}

struct GridRun {
    expected: Rational,
    freqs: Vec<f64>,
}

fn grid_samples(
    instance: &DfaInstance,
    map: &GridMap,
    maxent: bool,
    stations: usize,
    seed: u64,
) -> Result<GridRun, String> {
    let (imp, expected) = if maxent {
        let (imp, _) = build_maxent_improviser(
            instance,
            &SchemeOptions::default(),
            &SolverOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        let e = imp.spec().expected_cost.clone();
        (imp, e)
    } else {
        let imp =
            build_improviser(instance, &SchemeOptions::default()).map_err(|e| e.to_string())?;
        let e = imp.spec().expected_cost.clone();
        (imp, e)
    };
    let n = 10_000u64;
    let mut rng = stream_rng(seed, 0);
    let mut counts = vec![0u64; stations];
    let mut costs = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let ((i, k), word) = imp.sample_with_class(&mut rng);
        let r = replay(map, &word);
        ensure!(r.is_valid_plan(), "invalid plan {word:?}");
        ensure!(
            ratio(r.cost as i64, 1) == imp.spec().costs[k],
            "replayed cost differs"
        );
        let station = r.first_station.unwrap();
        if instance.labels.len() > 1 {
            ensure!(
                imp.spec().labels[i] == station as u64,
                "replayed label differs"
            );
        }
        counts[station - 1] += 1;
        costs.push(r.cost as f64);
    }
    let p = &instance.params;
    if instance.labels.len() > 1 {
        for &k in &counts {
            let (lo, hi) = clopper_pearson(k, n, CONFIDENCE);
            ensure!(
                hi >= rational::to_f64(&p.lambda) && lo <= rational::to_f64(&p.rho),
                "label interval [{lo}, {hi}] misses bounds"
            );
        }
    }
    let (mean, se) = mean_and_se(&costs);
    ensure!(
        mean <= rational::to_f64(&p.c) + 3.0 * se,
        "mean cost {mean} above c + 3SE"
    );
    Ok(GridRun {
        expected,
        freqs: counts.iter().map(|&k| k as f64 / n as f64).collect(),
    })
}

fn gridworld() -> Check {
    let t0 = Instant::now();
    let load = |name: &str| -> Result<(DfaInstance, GridMap), String> {
        let file = InstanceFile::read(&common::data(name)).map_err(|e| e.to_string())?;
        let InstanceFile::Grid(g) = &file else {
            return Err("not a grid".into());
        };
        let map = parse_map(&g.grid).map_err(|e| e.to_string())?;
        match file.load().map_err(|e| e.to_string())? {
            Instance::Dfa(d) => Ok((d, map)),
            Instance::Cnf(..) => Err("not a DFA".into()),
        }
    };
    let (labelled, map) = load("grid4x4.json")?;
    let (unlabelled, _) = load("grid4x4_unlabelled.json")?;
    let greedy = grid_samples(&labelled, &map, false, 2, 11)?;
    let maxent = grid_samples(&labelled, &map, true, 2, 12)?;
    let plain = grid_samples(&unlabelled, &map, false, 2, 13)?;
    let spread = |r: &GridRun| r.freqs.iter().copied().fold(f64::MAX, f64::min);
    ensure!(
        spread(&maxent) > spread(&plain),
        "max-entropy does not spread label mass"
    );
    ensure!(maxent.expected > plain.expected, "max-entropy is not costlier");
    ok_within(
        Duration::from_secs(300),
        t0,
        format!(
            "3x10^4 plans valid; greedy E = {:.3}; max-entropy E = {:.3}, station freqs {:.3?}; unlabelled E = {:.3}, station freqs {:.3?}",
            rational::to_f64(&greedy.expected),
            rational::to_f64(&maxent.expected),
            maxent.freqs,
            rational::to_f64(&plain.expected),
            plain.freqs
        ),
    )
}

fn determinism() -> Check {
    let toy = common::data("toy.json");
    let grid = common::data("grid4x4.json");
    let cnf = common::data("toy_cnf.json");
    let (toy, grid, cnf) = (
        toy.to_str().unwrap(),
        grid.to_str().unwrap(),
        cnf.to_str().unwrap(),
    );
    let commands: Vec<(Vec<&str>, Option<&str>)> = vec![
        (vec!["sample", toy, "--count", "10000", "--seed", "3"], None),
        (
            vec!["sample", grid, "--count", "9000", "--seed", "4", "--maxent"],
            None,
        ),
        (
            vec!["sample", cnf, "--count", "5000", "--seed", "5", "--approx"],
            None,
        ),
        (
            vec!["stats", grid, "--samples", "9000", "--seed", "6"],
            None,
        ),
        (vec!["check", grid, "--maxent"], None),
        (vec!["check", toy], None),
        (vec!["canon", cnf], None),
        (
            vec!["oracle", "sample", "--seed", "7"],
            Some("p cnf 3 1\nc ind 1 2 3 0\n1 2 0\n"),
        ),
        (
            vec!["oracle", "count"],
            Some("p cnf 3 1\nc ind 1 2 3 0\n1 2 0\n"),
        ),
    ];
    for (args, stdin) in &commands {
        let runs: Vec<_> = [("1"), ("1"), ("4")]
            .iter()
            .map(|t| common::improv_with(args, &[("IMPROV_THREADS", t)], *stdin))
            .collect();
        ensure!(
            runs[0].status.success(),
            "`{}` failed: {}",
            args[0],
            common::stderr(&runs[0])
        );
        ensure!(
            runs[0].stdout == runs[1].stdout,
            "`{}` differs between runs",
            args.join(" ")
        );
        ensure!(
            runs[0].stdout == runs[2].stdout,
            "`{}` differs across thread counts",
            args.join(" ")
        );
    }
    Ok(format!(
        "{} commands byte-identical across runs and thread counts",
        commands.len()
    ))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("toy example exactness", toy),
        ("feasibility matches the LP oracle", oracle_equivalence),
        ("greedy cost minimality", cost_minimality),
        ("DFA counting and uniform sampling", dfa_counting),
        ("cost analysis of weighted DFAs", cost_machinery),
        ("bucketed greedy with an exact oracle", algorithm_one),
        ("approximate improviser guarantees", end_to_end),
        ("maximum-entropy improvisation", melqci),
        ("gridworld 4x4 methodology", gridworld),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t0 = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {name} [{secs:.2}s]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.2}s]: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
