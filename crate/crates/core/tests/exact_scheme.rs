//! Class tables and improvisers of random DFA instances against enumeration.

use std::collections::BTreeMap;

use improv_core::exact_scheme::{
    build_cost_class_table, build_improviser, exact_word_distribution, toy_instance, CostSpec,
    DfaInstance, SchemeError, SchemeOptions,
};
use improv_core::lqci::{InfeasibleReason, LqciParams};
use improv_core::rational::{self, ratio, Rational};
use improv_core::sampling::stream_rng;
use improv_testkit::brute::{class_counts, improvisations};
use improv_testkit::gen::{random_dfa, random_output_dfa, random_weighted_dfa};
use num_traits::Zero;
use rand::{Rng, RngCore};

fn random_instance(rng: &mut dyn RngCore) -> DfaInstance {
    let symbols = rng.gen_range(1..=3);
    let (qh, ql, qc) = (
        rng.gen_range(1..=5),
        rng.gen_range(1..=3),
        rng.gen_range(1..=4),
    );
    let hard = random_dfa(rng, qh, symbols);
    let label = random_output_dfa(rng, ql, symbols, &[0, 1]);
    let cost = if rng.gen_bool(0.5) {
        CostSpec::Accumulated(random_weighted_dfa(rng, qc, symbols, 3))
    } else {
        CostSpec::Output(random_output_dfa(rng, qc, symbols, &[1, 2, 5]))
    };
    let n = rng.gen_range(0..=6);
    let params = LqciParams {
        m: rng.gen_range(0..=n),
        n,
        c: ratio(rng.gen_range(1..=40), 4),
        lambda: ratio(rng.gen_range(0..=2), 6),
        rho: ratio(rng.gen_range(3..=6), 6),
        alpha: vec![ratio(rng.gen_range(0..=1), 100); 2],
        beta: vec![ratio(rng.gen_range(1..=4), 8); 2],
    };
    DfaInstance {
        hard,
        label,
        cost,
        labels: vec![0, 1],
        params,
    }
}

#[test]
fn class_table_matches_enumeration() {
    let mut rng = stream_rng(31, 0);
    for case in 0..150 {
        let inst = random_instance(&mut rng);
        let p = &inst.params;
        let index = build_cost_class_table(
            &inst.hard,
            &inst.label,
            &inst.cost,
            &inst.labels,
            p.m,
            p.n,
            &SchemeOptions::default(),
        )
        .unwrap();
        let mut got = BTreeMap::new();
        for (i, &l) in index.table.labels.iter().enumerate() {
            for (k, c) in index.table.costs.iter().enumerate() {
                let size = index.table.size(i, k);
                if !size.is_zero() {
                    let c = u64::try_from(rational::floor(c)).unwrap();
                    got.insert((l, c), u64::try_from(size).unwrap());
                }
            }
        }
        assert_eq!(got, class_counts(&inst), "case {case}");
    }
}

#[test]
fn improviser_distribution_meets_the_bounds() {
    let mut rng = stream_rng(32, 0);
    let mut built = 0;
    while built < 40 {
        let inst = random_instance(&mut rng);
        let imp = match build_improviser(&inst, &SchemeOptions::default()) {
            Ok(imp) => imp,
            Err(SchemeError::Infeasible(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        built += 1;
        let dist = exact_word_distribution(&imp, 100_000).unwrap();
        let words = improvisations(&inst);
        let p = &inst.params;
        let total: Rational = dist.values().sum();
        assert_eq!(total, ratio(1, 1));
        let mut label_mass = [Rational::zero(), Rational::zero()];
        let mut cost = Rational::zero();
        for (w, l, c) in &words {
            let d = dist.get(w).cloned().unwrap_or_default();
            label_mass[*l as usize] += &d;
            cost += &d * rational::from_u64(*c);
        }
        assert!(dist.keys().all(|w| words.iter().any(|(x, _, _)| x == w)));
        assert!(cost <= p.c);
        for (i, m) in label_mass.iter().enumerate() {
            assert!(p.lambda <= *m && *m <= p.rho);
            if m.is_zero() {
                continue;
            }
            for (w, l, _) in &words {
                if *l as usize == i {
                    let q = dist.get(w).cloned().unwrap_or_default() / m;
                    assert!(p.alpha[i] <= q && q <= p.beta[i]);
                }
            }
        }
        assert_eq!(imp.spec().expected_cost, cost);
    }
}

#[test]
fn toy_exact_word_probabilities() {
    let imp = build_improviser(&toy_instance(ratio(129, 50)), &SchemeOptions::default()).unwrap();
    let dist = exact_word_distribution(&imp, 100).unwrap();
    let word = |s: &str| s.bytes().map(|b| (b - b'0') as usize).collect::<Vec<_>>();
    // Label 1 (odd parity) receives 4/5, spread 1/2, 3/10, 1/10, 1/10 over costs 1, 2, 4, 7.
    assert_eq!(dist[&word("001")], ratio(2, 5));
    assert_eq!(dist[&word("010")], ratio(6, 25));
    assert_eq!(dist[&word("100")], ratio(2, 25));
    assert_eq!(dist[&word("111")], ratio(2, 25));
    // Label 2 (even parity) receives 1/5 over 011, 101, 110.
    // Label 2 (even parity) receives 1/5, spread 1/2, 2/5, 1/10 over costs 3, 5, 6.
    assert_eq!(dist[&word("011")], ratio(1, 10));
    assert_eq!(dist[&word("101")], ratio(2, 25));
    assert_eq!(dist[&word("110")], ratio(1, 50));
}

#[test]
fn lowered_cost_bound_is_rejected() {
    match build_improviser(&toy_instance(ratio(2, 1)), &SchemeOptions::default()) {
        Err(SchemeError::Infeasible(why)) => {
            assert_eq!(why.reason, InfeasibleReason::MinCostExceedsBound)
        }
        other => panic!("{other:?}"),
    }
}
