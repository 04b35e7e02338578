//! Greedy feasibility and cost against an LP over individual words.

use improv_core::lqci::{feasibility_check, FeasibilityReport};
use improv_core::rational::{parse_rational, Rational};
use improv_core::sampling::stream_rng;
use improv_testkit::gen::{random_word_instance, table_of};
use improv_testkit::lp::{expected_cost, lqci_oracle, random_feasible};

fn greedy_min(report: &FeasibilityReport) -> Option<Rational> {
    match report {
        FeasibilityReport::Feasible(spec) => Some(spec.expected_cost.clone()),
        FeasibilityReport::Infeasible(why) => why
            .min_cost
            .as_deref()
            .map(|s| parse_rational(s).expect("min cost parses")),
    }
}

#[test]
fn feasibility_matches_lp_oracle() {
    let mut rng = stream_rng(11, 0);
    let mut seen = [0usize; 2];
    for case in 0..120 {
        let (words, params) = random_word_instance(&mut rng);
        let table = table_of(&words, params.num_labels());
        let report = feasibility_check(&params, &table);
        let oracle = lqci_oracle(&words, &params);
        assert_eq!(
            report.is_feasible(),
            oracle.feasible,
            "case {case}: {report:?}"
        );
        seen[usize::from(oracle.feasible)] += 1;
        if let (Some(lp), Some(g)) = (&oracle.min_cost, greedy_min(&report)) {
            assert_eq!(*lp, g, "case {case}: greedy cost differs from LP minimum");
        }
    }
    assert!(seen[0] > 10 && seen[1] > 10, "unbalanced sample {seen:?}");
}

#[test]
fn greedy_is_no_costlier_than_random_feasible_points() {
    let mut rng = stream_rng(12, 0);
    let mut checked = 0;
    while checked < 30 {
        let (words, params) = random_word_instance(&mut rng);
        let table = table_of(&words, params.num_labels());
        let Some(greedy) = greedy_min(&feasibility_check(&params, &table)) else {
            continue;
        };
        for _ in 0..100 {
            let d = random_feasible(&words, &params, &mut rng).expect("feasible instance");
            assert!(greedy <= expected_cost(&words, &d));
        }
        checked += 1;
    }
}
