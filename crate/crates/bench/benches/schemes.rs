use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use improv_core::approx::{build_approx_improviser, toy_cnf, ApproxParams, ExactEnumerationOracle};
use improv_core::automata::{count_words, Dfa};
use improv_core::exact_scheme::{
    build_cost_class_table, build_improviser, toy_instance, SchemeOptions,
};
use improv_core::gridworld::{encode, parse_map};
use improv_core::lqci::{feasibility_check, CostClassTable, LqciParams};
use improv_core::maxent::{solve_melqci, MaxEntProblem, SolverOptions};
use improv_core::rational::ratio;
use improv_core::sampling::stream_rng;
use num_bigint::BigUint;
use std::sync::Arc;

const GRID: &str = "S0 1 1 C1 / 1 X O2 1 / C2 1 1 1 / 1 2 1 E0";

fn grid_params(labels: usize) -> LqciParams {
    LqciParams {
        m: 6,
        n: 10,
        c: ratio(10, 1),
        lambda: ratio(1, 5),
        rho: ratio(4, 5),
        alpha: vec![ratio(0, 1); labels],
        beta: vec![ratio(1, 16); labels],
    }
}

/// Words over {a, b} with no two consecutive b.
fn fibonacci_dfa() -> Dfa {
    Dfa::new(
        vec!["a".into(), "b".into()],
        0,
        vec![true, true, false],
        vec![vec![0, 1], vec![0, 2], vec![2, 2]],
    )
    .unwrap()
}

fn counting(c: &mut Criterion) {
    let dfa = fibonacci_dfa();
    c.bench_function("count words up to length 200", |b| {
        b.iter(|| count_words(black_box(&dfa), 0, 200))
    });
    let map = parse_map(GRID).unwrap();
    let enc = encode(&map).unwrap();
    let cost = improv_core::exact_scheme::CostSpec::Accumulated(enc.cost.clone());
    c.bench_function("grid class table", |b| {
        b.iter(|| {
            build_cost_class_table(
                &enc.hard,
                &enc.label,
                &cost,
                &enc.labels,
                6,
                10,
                &SchemeOptions::default(),
            )
            .unwrap()
        })
    });
}

fn greedy(c: &mut Criterion) {
    let costs: Vec<_> = (0..50).map(|k| ratio(k, 1)).collect();
    let sizes: Vec<Vec<BigUint>> = (0..8u32)
        .map(|i| {
            (0..50u32)
                .map(|k| BigUint::from(1 + (i * 7 + k * 13) % 29))
                .collect()
        })
        .collect();
    let table = CostClassTable::new((0..8).collect(), costs, sizes).unwrap();
    let params = LqciParams {
        m: 0,
        n: 0,
        c: ratio(40, 1),
        lambda: ratio(1, 20),
        rho: ratio(1, 4),
        alpha: vec![ratio(0, 1); 8],
        beta: vec![ratio(1, 100); 8],
    };
    c.bench_function("greedy on an 8x50 table", |b| {
        b.iter(|| feasibility_check(black_box(&params), &table))
    });
}

fn sampling(c: &mut Criterion) {
    let toy = build_improviser(&toy_instance(ratio(129, 50)), &SchemeOptions::default()).unwrap();
    let mut rng = stream_rng(0, 0);
    c.bench_function("toy sample", |b| b.iter(|| toy.sample(&mut rng)));

    let grid = encode(&parse_map(GRID).unwrap())
        .unwrap()
        .into_instance(grid_params(2))
        .unwrap();
    let imp = build_improviser(&grid, &SchemeOptions::default()).unwrap();
    c.bench_function("grid sample", |b| b.iter(|| imp.sample(&mut rng)));

    let oracle = Arc::new(ExactEnumerationOracle::default());
    let bounds = toy_instance(ratio(129, 50)).params;
    let params = ApproxParams {
        zeta: ratio(1, 1),
        gamma: ratio(0, 1),
        delta: ratio(0, 1),
    };
    c.bench_function("approximate improviser build (toy)", |b| {
        b.iter_batched(
            || Arc::new(ExactEnumerationOracle::default()),
            |o| {
                build_approx_improviser(&toy_cnf(), &bounds, &params, o.as_ref(), o.clone())
                    .unwrap()
            },
            BatchSize::SmallInput,
        )
    });
    let approx = build_approx_improviser(
        &toy_cnf(),
        &bounds,
        &params,
        oracle.as_ref(),
        oracle.clone(),
    )
    .unwrap()
    .improviser()
    .unwrap();
    c.bench_function("approximate sample (toy)", |b| {
        b.iter(|| approx.sample(&mut rng).unwrap())
    });
}

fn maxent(c: &mut Criterion) {
    let grid = encode(&parse_map(GRID).unwrap())
        .unwrap()
        .into_instance(grid_params(2))
        .unwrap();
    let p = &grid.params;
    let index = build_cost_class_table(
        &grid.hard,
        &grid.label,
        &grid.cost,
        &grid.labels,
        p.m,
        p.n,
        &SchemeOptions::default(),
    )
    .unwrap();
    let problem = MaxEntProblem::new(index.table.clone(), p);
    c.bench_function("maximum entropy on the grid table", |b| {
        b.iter(|| solve_melqci(black_box(&problem), &SolverOptions::default()).unwrap())
    });
}

criterion_group!(benches, counting, greedy, sampling, maxent);
criterion_main!(benches);
