mod common;

use std::collections::VecDeque;

use proptest::prelude::*;

use ternpath::algebra::{check_all, leq, Algebra, CheckConfig, Gamma};
use ternpath::graph::DirectedWeightedGraph;
use ternpath::instances::{minplus_degenerate, ExtInt, TableAlgebra};
use ternpath::path_eval::{oracle_opt, PathMode};
use ternpath::separation::{search_binary_factorization, BinaryTable};
use ternpath::solver::{
    check_descending, iteration_bound_report, relax_step, solve, IterationOutcome, SolveOptions, Valuation,
};

use common::{all_binary_carrier_ternaries, digit, random_dag, random_digraph, rng};

fn forced() -> SolveOptions {
    SolveOptions {
        force: true,
        ..SolveOptions::default()
    }
}

fn arb_dag(max_n: usize) -> impl Strategy<Value = (DirectedWeightedGraph<ExtInt>, usize)> {
    (1..=max_n, 0.2f64..0.8, any::<u64>(), any::<usize>())
        .prop_map(|(n, density, seed, s)| (random_dag(&mut rng(seed), n, density, digit), s % n))
}

fn arb_digraph(max_n: usize) -> impl Strategy<Value = (DirectedWeightedGraph<ExtInt>, usize)> {
    (1..=max_n, 0.1f64..0.4, any::<u64>(), any::<usize>())
        .prop_map(|(n, density, seed, s)| (random_digraph(&mut rng(seed), n, density, digit), s % n))
}

/// Shortest walk from `s` with an even number of edges, per vertex.
fn shortest_even_walk(g: &DirectedWeightedGraph<ExtInt>, s: usize) -> Vec<Option<usize>> {
    let n = g.vertex_count();
    let mut dist = vec![[None; 2]; n];
    dist[s][0] = Some(0);
    let mut queue = VecDeque::from([(s, 0usize)]);
    while let Some((u, parity)) = queue.pop_front() {
        let d = dist[u][parity].unwrap();
        for v in 0..n {
            if g.weight(u, v).is_some() && dist[v][1 - parity].is_none() {
                dist[v][1 - parity] = Some(d + 1);
                queue.push_back((v, 1 - parity));
            }
        }
    }
    dist.iter().map(|d| d[0]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dag_solution_is_the_even_path_optimum((g, s) in arb_dag(6)) {
        let mp = minplus_degenerate();
        let sol = solve(&g, s, &mp, Gamma(0), &SolveOptions::default()).unwrap();
        prop_assert!(sol.trace.stabilized);
        for v in 0..g.vertex_count() {
            let opt = oracle_opt(&mp, Gamma(0), &g, s, v, g.vertex_count(), PathMode::Simple).unwrap();
            let expected = if v == s { mp.aggregate(mp.seed(), opt.even_opt) } else { opt.even_opt };
            prop_assert_eq!(sol.valuation.get(v), expected, "vertex {}", v);
        }
    }

    #[test]
    fn nonnegative_cycles_match_even_walk_optimum((g, s) in arb_digraph(5)) {
        let mp = minplus_degenerate();
        let sol = solve(&g, s, &mp, Gamma(0), &SolveOptions::default()).unwrap();
        prop_assert!(sol.trace.stabilized);
        let bound = 2 * g.vertex_count();
        for v in 0..g.vertex_count() {
            let opt = oracle_opt(&mp, Gamma(0), &g, s, v, bound, PathMode::Walks).unwrap();
            let expected = if v == s { mp.aggregate(mp.seed(), opt.even_opt) } else { opt.even_opt };
            prop_assert_eq!(sol.valuation.get(v), expected, "vertex {}", v);
        }
    }

    #[test]
    fn dag_iterations_within_both_bounds((g, s) in arb_dag(6)) {
        prop_assume!(g.vertex_count() >= 3);
        let sol = solve(&g, s, &minplus_degenerate(), Gamma(0), &SolveOptions::default()).unwrap();
        let IterationOutcome::Converged(n) = sol.trace.iterations_to_fixpoint else {
            return Err(TestCaseError::fail("cap reached on a DAG"));
        };
        let longest = g.longest_path_edges().unwrap();
        prop_assert!(n <= g.vertex_count() - 2);
        prop_assert!(n <= longest.div_ceil(2));
        prop_assert!(iteration_bound_report(&g, &sol.trace, 2).within);
    }

    #[test]
    fn trace_descends_and_stays_local((g, s) in arb_digraph(7)) {
        let mp = minplus_degenerate();
        let sol = solve(&g, s, &mp, Gamma(0), &SolveOptions::default()).unwrap();
        prop_assert!(check_descending(&sol.trace, &mp));
        let reach = shortest_even_walk(&g, s);
        for (n, snap) in sol.trace.snapshots.iter().enumerate() {
            for v in 0..g.vertex_count() {
                if reach[v].is_none_or(|d| d > 2 * n) {
                    prop_assert_eq!(snap.get(v), ExtInt::Inf, "vertex {} at step {}", v, n);
                }
            }
        }
    }

    #[test]
    fn oracle_is_monotone_in_edge_budget((g, s) in arb_digraph(5), t in 0usize..5) {
        let mp = minplus_degenerate();
        let t = t % g.vertex_count();
        let mut prev = oracle_opt(&mp, Gamma(0), &g, s, t, 1, PathMode::Walks).unwrap();
        for k in 2..=8 {
            let cur = oracle_opt(&mp, Gamma(0), &g, s, t, k, PathMode::Walks).unwrap();
            prop_assert!(leq(&mp, cur.even_opt, prev.even_opt).unwrap());
            prop_assert!(leq(&mp, cur.odd_opt, prev.odd_opt).unwrap());
            prop_assert!(cur.even_paths >= prev.even_paths);
            prev = cur;
        }
    }

    #[test]
    fn parallel_relaxation_matches_serial((g, s) in arb_digraph(8)) {
        let mp = minplus_degenerate();
        let serial = solve(&g, s, &mp, Gamma(0), &SolveOptions::default()).unwrap();
        let opts = SolveOptions { parallel: true, ..SolveOptions::default() };
        let parallel = solve(&g, s, &mp, Gamma(0), &opts).unwrap();
        prop_assert_eq!(serial.trace.snapshots, parallel.trace.snapshots);
    }
}

/// Every ordered instance on `{0, 1}`, under both orders and both seeds.
fn ordered_two_element_instances() -> Vec<TableAlgebra> {
    let cfg = CheckConfig::default();
    let mut out = Vec::new();
    for (aggregate, top) in [(vec![vec![0, 0], vec![0, 1]], 1), (vec![vec![0, 1], vec![1, 1]], 0)] {
        for table in all_binary_carrier_ternaries() {
            for seed in 0..2 {
                let alg = TableAlgebra::from_parts(
                    2,
                    aggregate.clone(),
                    vec![("g0".into(), table.clone())],
                    top,
                    seed,
                    None,
                );
                if check_all(&alg, Gamma(0), &cfg).all_passed() {
                    out.push(alg);
                }
            }
        }
    }
    out
}

fn fixed_points(g: &DirectedWeightedGraph<usize>, s: usize, alg: &TableAlgebra) -> Vec<Valuation<usize>> {
    let n = g.vertex_count();
    (0..1u32 << n)
        .map(|bits| Valuation((0..n).map(|v| ((bits >> v) & 1) as usize).collect()))
        .filter(|h| h.get(s) == alg.seed())
        .filter(|h| &relax_step(g, s, alg, Gamma(0), h, 2).unwrap().0 == h)
        .collect()
}

#[test]
fn solution_dominates_every_fixed_point() {
    let instances = ordered_two_element_instances();
    assert!(instances.len() >= 4);
    let mut r = rng(17);
    let bit = |r: &mut rand_chacha::ChaCha8Rng| rand::Rng::gen_range(r, 0..2usize);
    for round in 0..40 {
        let n = 2 + round % 4;
        let dag = round % 2 == 0;
        let g = if dag {
            random_dag(&mut r, n, 0.5, bit)
        } else {
            random_digraph(&mut r, n, 0.35, bit)
        };
        let s = round % n;
        for alg in &instances {
            let sol = solve(&g, s, alg, Gamma(0), &SolveOptions::default()).unwrap();
            assert!(sol.trace.stabilized);
            let fps = fixed_points(&g, s, alg);
            assert!(fps.contains(&sol.valuation));
            for h in &fps {
                assert!(h.leq(alg, &sol.valuation), "fixed point above the iterate");
            }
            if dag {
                assert_eq!(fps.len(), 1, "DAG fixed points are unique");
            }
        }
    }
}

#[test]
fn cyclic_fixed_points_can_sit_below_the_iterate() {
    // First projection under the AND order; vertices 1 and 2 form a cycle
    // unreachable from 0, so any constant on them is a fixed point.
    let proj: Vec<usize> = (0..8).map(|i| (i >> 2) & 1).collect();
    let alg = TableAlgebra::from_parts(2, vec![vec![0, 0], vec![0, 1]], vec![("g0".into(), proj)], 1, 0, None);
    let g = DirectedWeightedGraph::new(3, [(1, 2, 0), (2, 1, 0)]).unwrap();
    let sol = solve(&g, 0, &alg, Gamma(0), &SolveOptions::default()).unwrap();
    assert_eq!(sol.valuation.0, vec![0, 1, 1]);
    let fps = fixed_points(&g, 0, &alg);
    let low = Valuation(vec![0, 0, 0]);
    assert!(fps.contains(&low));
    assert!(!sol.valuation.leq(&alg, &low));
}

/// Relaxation over single edges, tracking the parity of the walk length.
/// Odd states with no in-edges stay absent rather than taking top.
fn parity_relaxation(g: &DirectedWeightedGraph<usize>, s: usize, alg: &TableAlgebra, mul: &BinaryTable) -> Vec<usize> {
    let n = g.vertex_count();
    let mut even = vec![alg.top(); n];
    even[s] = alg.seed();
    loop {
        let odd: Vec<Option<usize>> = (0..n)
            .map(|v| {
                g.in_edges(v)
                    .iter()
                    .map(|&e| mul.get(even[g.edge(e).from], g.edge(e).weight))
                    .reduce(|a, b| alg.aggregate(a, b))
            })
            .collect();
        let next: Vec<usize> = (0..n)
            .map(|v| {
                if v == s {
                    return alg.seed();
                }
                g.in_edges(v)
                    .iter()
                    .filter_map(|&e| odd[g.edge(e).from].map(|o| mul.get(o, g.edge(e).weight)))
                    .fold(alg.top(), |a, b| alg.aggregate(a, b))
            })
            .collect();
        if next == even {
            return even;
        }
        even = next;
    }
}

#[test]
fn factorizing_instances_agree_with_binary_relaxation() {
    let mut r = rng(29);
    let bit = |r: &mut rand_chacha::ChaCha8Rng| rand::Rng::gen_range(r, 0..2usize);
    let graphs: Vec<(DirectedWeightedGraph<usize>, usize)> = (0..60)
        .map(|i| {
            let n = 1 + i % 5;
            (random_dag(&mut r, n, 0.6, bit), i % n)
        })
        .collect();
    let mut compared = 0;
    for alg in ordered_two_element_instances() {
        let report = search_binary_factorization(&alg, Gamma(0), 16).unwrap();
        for mul in &report.witnesses {
            compared += 1;
            for (g, s) in &graphs {
                let ternary = solve(g, *s, &alg, Gamma(0), &SolveOptions::default()).unwrap();
                assert_eq!(ternary.valuation.0, parity_relaxation(g, *s, &alg, mul));
            }
        }
    }
    assert!(compared > 0);
}

#[test]
fn gate_refuses_unless_forced() {
    let g = random_dag(&mut rng(5), 4, 0.7, |_| 1usize);
    let bad = ternpath::instances::bool_f2();
    assert!(matches!(
        solve(&g, 0, &bad, Gamma(0), &SolveOptions::default()),
        Err(ternpath::SolverError::TripleSystemOnly(_))
    ));
    assert!(solve(&g, 0, &bad, Gamma(0), &forced()).is_ok());
}
