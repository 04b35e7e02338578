//! The bucketed approximate scheme with an exact oracle, checked against
//! exact improvisation over the same explicitly tabulated instances.

use std::sync::Arc;

use improv_core::approx::{
    approximate_greedy_cost, bucket_probabilities, build_approx_improviser, enumerate_distribution,
    pack, parse_dimacs, toy_cnf, write_dimacs, ApproxImproviser, ApproxOutcome, ApproxParams,
    BucketOutcome, BucketPlan, ExactEnumerationOracle, Refusal,
};
use improv_core::lqci::{feasibility_check, FeasibilityReport, LqciParams};
use improv_core::rational::{from_biguint, ratio, Rational};
use improv_core::sampling::stream_rng;
use improv_testkit::gen::{table_of, TabulatedCnf};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn toy_params(c: Rational) -> LqciParams {
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

fn exact_params(zeta: Rational) -> ApproxParams {
    ApproxParams {
        zeta,
        gamma: ratio(0, 1),
        delta: ratio(0, 1),
    }
}

fn run(
    spec: &improv_core::approx::CnfSpec,
    bounds: &LqciParams,
    params: &ApproxParams,
) -> ApproxOutcome {
    let oracle = Arc::new(ExactEnumerationOracle::default());
    build_approx_improviser(spec, bounds, params, oracle.as_ref(), oracle.clone()).unwrap()
}

/// Checks support, word conditionals, label marginals and the cost bound on
/// the exact output distribution. Returns its expected cost.
fn check_guarantees(imp: &ApproxImproviser, bounds: &LqciParams, zeta: &Rational) -> Rational {
    let spec = imp.spec();
    let dist = enumerate_distribution(imp, &ExactEnumerationOracle::default()).unwrap();
    let total: Rational = dist.values().sum();
    assert_eq!(total, Rational::one());
    let mut marginals = vec![Rational::zero(); spec.labels];
    let mut expected = Rational::zero();
    let mut per_word = Vec::new();
    for (x, p) in &dist {
        let (label, cost) = spec
            .evaluate(x)
            .expect("support within the hard constraint");
        marginals[label] += p;
        expected += p * from_biguint(&cost);
        per_word.push((label, p.clone()));
    }
    for (label, p) in per_word {
        let cond = &p / &marginals[label];
        assert!(bounds.alpha[label] <= cond && cond <= bounds.beta[label]);
    }
    for m in &marginals {
        assert!(bounds.lambda <= *m && *m <= bounds.rho);
    }
    assert!(expected <= (Rational::one() + zeta) * &bounds.c);
    expected
}

#[test]
fn toy_bucket_plan_and_cost_sandwich() {
    let spec = toy_cnf();
    let plan = BucketPlan::new(ratio(2, 1), 3);
    let oracle = ExactEnumerationOracle::default();
    let zero = ratio(0, 1);
    let out = approximate_greedy_cost(
        &spec,
        0,
        &ratio(1, 10),
        &ratio(1, 2),
        &plan,
        &zero,
        &zero,
        &oracle,
    )
    .unwrap();
    let est = out.plan().unwrap();
    assert_eq!(est.probs, vec![ratio(1, 2), ratio(3, 10), ratio(1, 5)]);
    assert_eq!(est.lo, ratio(19, 10));
    let exact = ratio(11, 5);
    assert!(est.lo <= exact && exact <= ratio(2, 1) * &est.lo);

    let bounds = toy_params(ratio(129, 50));
    let imp = run(&spec, &bounds, &exact_params(ratio(1, 1)))
        .improviser()
        .unwrap();
    let e = check_guarantees(&imp, &bounds, &ratio(1, 1));
    assert!(imp.low() <= &ratio(129, 50));
    assert!(e <= ratio(2, 1) * imp.low());
}

#[test]
fn refusal_branches() {
    let counts = vec![BigUint::from(2u32), BigUint::from(2u32)];
    let low = vec![ratio(1, 1), ratio(2, 1)];
    let zero = ratio(0, 1);
    assert!(matches!(
        bucket_probabilities(&counts, &low, &ratio(1, 3), &ratio(1, 2), &zero),
        BucketOutcome::TooManyWords { .. }
    ));
    assert!(matches!(
        bucket_probabilities(&counts, &low, &zero, &ratio(1, 5), &zero),
        BucketOutcome::TooFewWords { .. }
    ));

    // Label 0 of the toy has four traces.
    let spec = toy_cnf();
    let mut bounds = toy_params(ratio(10, 1));
    bounds.alpha[0] = ratio(1, 3);
    assert!(matches!(
        run(&spec, &bounds, &exact_params(ratio(1, 1))),
        ApproxOutcome::Refused(Refusal::TooManyWords { label: 0, .. })
    ));
    let mut bounds = toy_params(ratio(10, 1));
    bounds.beta[1] = ratio(1, 5);
    assert!(matches!(
        run(&spec, &bounds, &exact_params(ratio(1, 1))),
        ApproxOutcome::Refused(Refusal::TooFewWords { label: 1, .. })
    ));
}

#[test]
fn refuses_exactly_when_low_exceeds_bound() {
    let spec = toy_cnf();
    let params = exact_params(ratio(1, 1));
    let low = run(&spec, &toy_params(ratio(100, 1)), &params)
        .improviser()
        .unwrap()
        .low()
        .clone();
    let eps = ratio(1, 1000);
    assert!(run(&spec, &toy_params(low.clone()), &params)
        .improviser()
        .is_some());
    assert!(run(&spec, &toy_params(&low + &eps), &params)
        .improviser()
        .is_some());
    match run(&spec, &toy_params(&low - &eps), &params) {
        ApproxOutcome::Refused(Refusal::LowExceedsBound { low: l }) => assert_eq!(l, low),
        other => panic!("expected a refusal, got {other:?}"),
    }
}

fn random_bounds<R: Rng>(rng: &mut R, labels: usize, sizes: &[usize]) -> LqciParams {
    let lambda = ratio(rng.gen_range(0..=2), 4 * labels as i64);
    LqciParams {
        m: 0,
        n: 0,
        c: ratio(rng.gen_range(2..=40), 4),
        lambda,
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
    }
}

#[test]
fn random_instances_against_exact_scheme() {
    let mut rng = stream_rng(77, 0);
    let mut improvised = 0;
    let mut big = 0;
    let mut case = 0;
    while improvised < 60 {
        case += 1;
        assert!(case < 2000, "too few feasible instances");
        let x_bits = if case % 40 == 0 {
            12
        } else {
            rng.gen_range(2..=7)
        };
        let labels = rng.gen_range(1..=3);
        let cost_bits = rng.gen_range(1..=3);
        let cnf = TabulatedCnf::random(&mut rng, x_bits, labels, cost_bits);
        let words = cnf.words();
        let entries: Vec<_> = words.iter().map(|(_, w)| w.clone()).collect();
        let sizes: Vec<usize> = (0..labels)
            .map(|i| entries.iter().filter(|w| w.label == i).count())
            .collect();
        let bounds = random_bounds(&mut rng, labels, &sizes);
        let zeta = [ratio(1, 2), ratio(1, 1), ratio(2, 1)][rng.gen_range(0..3)].clone();
        let r = Rational::one() + &zeta;
        let exact = feasibility_check(&bounds, &table_of(&entries, labels));
        match run(&cnf.spec, &bounds, &exact_params(zeta.clone())) {
            ApproxOutcome::Refused(why) => {
                assert!(
                    !exact.is_feasible(),
                    "case {case}: refused ({why}) a feasible instance"
                );
            }
            ApproxOutcome::Improviser(imp) => {
                improvised += 1;
                if x_bits == 12 {
                    big += 1;
                }
                let e = check_guarantees(&imp, &bounds, &zeta);
                assert!(e <= &r * imp.low(), "case {case}");
                if let FeasibilityReport::Feasible(s) = &exact {
                    assert!(imp.low() <= &s.expected_cost, "case {case}");
                    assert!(s.expected_cost <= &r * imp.low(), "case {case}");
                    assert!(s.expected_cost <= e);
                }
                // Traces decode as tabulated.
                for (a, w) in words.iter().take(8) {
                    let x: Vec<bool> = (0..x_bits)
                        .map(|j| a >> (x_bits - 1 - j) & 1 == 1)
                        .collect();
                    assert_eq!(pack(&x), *a);
                    let (label, cost) = cnf.spec.evaluate(&x).unwrap();
                    assert_eq!(label, w.label);
                    assert_eq!(from_biguint(&cost), w.cost);
                }
            }
        }
    }
    assert!(big >= 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimacs_round_trip(seed in any::<u64>(), x_bits in 1usize..6, labels in 1usize..4, cost_bits in 1usize..4) {
        let mut rng = stream_rng(seed, 0);
        let cnf = TabulatedCnf::random(&mut rng, x_bits, labels, cost_bits);
        let text = write_dimacs(&cnf.spec);
        let back = parse_dimacs(&text).unwrap();
        prop_assert_eq!(&back, &cnf.spec);
        prop_assert_eq!(write_dimacs(&back), text);
    }
}
