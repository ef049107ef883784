use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use ternpath::algebra::{check_all, Algebra, CheckConfig};
use ternpath::graph::{build_window_graph, load_graph, walk_count, window_counts, DirectedWeightedGraph};
use ternpath::instances::{minplus_degenerate, resolve, ExtInt, Instance};
use ternpath::path_eval::{oracle_opt, PathMode};
use ternpath::separation::{search_nondegenerate_ttgs, separation_report};
use ternpath::solver::{check_descending, iteration_bound_report, solve as run_solver, SolveOptions, SolverError};

use crate::{AlgebraArgs, SolveArgs};

pub struct Output {
    pub doc: Value,
    pub code: u8,
}

pub struct Failure {
    pub message: String,
    pub code: u8,
    pub detail: Option<Value>,
}

type CmdResult = Result<Output, Failure>;

fn usage(message: impl ToString) -> Failure {
    Failure {
        message: message.to_string(),
        code: 2,
        detail: None,
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

/// Runs `$body` with `$alg` bound to the concrete instance.
macro_rules! with_instance {
    ($inst:expr, $alg:ident => $body:expr) => {
        match $inst {
            Instance::MinPlus($alg) => $body,
            Instance::Table($alg) => $body,
        }
    };
}

fn instance(selector: &str) -> Result<Instance, Failure> {
    resolve(selector).map_err(usage)
}

/// Top renders as "top"; everything else through the element's JSON form.
fn render<A: Algebra>(alg: &A, e: A::Elem) -> Value {
    if e == alg.top() {
        Value::from("top")
    } else {
        to_json(&e)
    }
}

fn render_all<A: Algebra>(alg: &A, values: &[A::Elem]) -> Value {
    Value::Array(values.iter().map(|&e| render(alg, e)).collect())
}

pub fn check(args: &AlgebraArgs, budget: usize, seed: u64) -> CmdResult {
    if budget == 0 {
        return Err(usage("--budget must be positive"));
    }
    with_instance!(instance(&args.alg)?, alg => {
        let gamma = alg.gamma(&args.gamma).map_err(usage)?;
        let suite = check_all(&alg, gamma, &CheckConfig { budget, seed });
        let passed = suite.all_passed();
        Ok(Output {
            doc: json!({
                "algebra": alg.name(),
                "triple_system_only": alg.triple_system_only(),
                "passed": passed,
                "reports": suite,
            }),
            code: if passed { 0 } else { 1 },
        })
    })
}

fn solver_failure(err: SolverError) -> Failure {
    let code = match err {
        SolverError::TripleSystemOnly(_) | SolverError::GateFailed { .. } => 1,
        _ => 2,
    };
    Failure {
        message: err.to_string(),
        code,
        detail: None,
    }
}

fn solve_options(args: &SolveArgs) -> Result<SolveOptions, Failure> {
    if args.max_iters == Some(0) {
        return Err(usage("--max-iters must be positive"));
    }
    if args.budget == 0 {
        return Err(usage("--budget must be positive"));
    }
    Ok(SolveOptions {
        width: args.width,
        max_iterations: args.max_iters,
        force: args.force,
        parallel: args.parallel,
        gate: CheckConfig {
            budget: args.budget,
            seed: args.seed,
        },
    })
}

pub fn solve(args: &SolveArgs) -> CmdResult {
    let opts = solve_options(args)?;
    with_instance!(instance(&args.alg.alg)?, alg => {
        let gamma = alg.gamma(&args.alg.gamma).map_err(usage)?;
        let g = load_graph(&args.graph, &alg).map_err(usage)?;
        let sol = run_solver(&g, args.source, &alg, gamma, &opts).map_err(solver_failure)?;
        let bounds = iteration_bound_report(&g, &sol.trace, args.width);
        let snapshots: Vec<Value> = sol.trace.snapshots.iter().map(|s| render_all(&alg, &s.0)).collect();
        let doc = json!({
            "algebra": alg.name(),
            "gamma": args.alg.gamma,
            "source": args.source,
            "width": args.width,
            "valuation": render_all(&alg, &sol.valuation.0),
            "iterations": sol.trace.iterations_to_fixpoint,
            "stabilized": sol.trace.stabilized,
            "windows_per_iteration": sol.trace.windows_examined,
            "window_arcs": window_counts(&g).arcs,
            "descending": check_descending(&sol.trace, &alg),
            "bounds": bounds,
            "snapshots": snapshots,
        });
        Ok(Output { doc, code: if sol.trace.stabilized { 0 } else { 3 } })
    })
}

pub fn oracle(
    args: &AlgebraArgs,
    graph: &Path,
    source: usize,
    target: usize,
    max_edges: Option<usize>,
    revisits: bool,
) -> CmdResult {
    with_instance!(instance(&args.alg)?, alg => {
        let gamma = alg.gamma(&args.gamma).map_err(usage)?;
        let g = load_graph(graph, &alg).map_err(usage)?;
        let max_edges = max_edges.unwrap_or(g.vertex_count());
        let mode = if revisits { PathMode::Walks } else { PathMode::Simple };
        let o = oracle_opt(&alg, gamma, &g, source, target, max_edges, mode).map_err(usage)?;
        Ok(Output {
            doc: json!({
                "algebra": alg.name(),
                "source": source,
                "target": target,
                "max_edges": max_edges,
                "mode": mode,
                "even_opt": render(&alg, o.even_opt),
                "odd_opt": render(&alg, o.odd_opt),
                "even_paths": o.even_paths,
                "odd_paths": o.odd_paths,
            }),
            code: 0,
        })
    })
}

pub fn compare(args: &SolveArgs) -> CmdResult {
    let opts = solve_options(args)?;
    if args.width != 2 {
        return Err(usage("compare supports window width 2 only"));
    }
    with_instance!(instance(&args.alg.alg)?, alg => {
        let gamma = alg.gamma(&args.alg.gamma).map_err(usage)?;
        let g = load_graph(&args.graph, &alg).map_err(usage)?;
        let sol = run_solver(&g, args.source, &alg, gamma, &opts).map_err(solver_failure)?;
        let max_edges = args.max_edges.unwrap_or(g.vertex_count());
        let mut rows = Vec::new();
        let mut all_match = true;
        for v in 0..g.vertex_count() {
            let o = oracle_opt(&alg, gamma, &g, args.source, v, max_edges, PathMode::Simple).map_err(usage)?;
            // the zero-edge path pins the source at the seed
            let even = if v == args.source { alg.aggregate(alg.seed(), o.even_opt) } else { o.even_opt };
            let solved = sol.valuation.get(v);
            let even_match = solved == even;
            all_match &= even_match;
            rows.push(json!({
                "vertex": v,
                "solve": render(&alg, solved),
                "even_opt": render(&alg, even),
                "odd_opt": if o.odd_paths > 0 { render(&alg, o.odd_opt) } else { Value::Null },
                "even_match": even_match,
                "all_paths_match": solved == alg.aggregate(even, o.odd_opt),
            }));
        }
        let doc = json!({
            "algebra": alg.name(),
            "source": args.source,
            "dag": g.is_dag(),
            "max_edges": max_edges,
            "stabilized": sol.trace.stabilized,
            "match": all_match,
            "vertices": rows,
        });
        Ok(Output { doc, code: if all_match { 0 } else { 1 } })
    })
}

#[derive(Serialize)]
struct Sizes {
    vertices: u128,
    arcs: u128,
}

fn window_rows<E: Copy>(g: &DirectedWeightedGraph<E>, widths: &[usize]) -> Result<(Vec<Value>, bool), Failure> {
    let mut rows = Vec::new();
    let mut agree = true;
    for &width in widths {
        let wg = build_window_graph(g, width).map_err(usage)?;
        let constructed = Sizes {
            vertices: wg.vertex_count() as u128,
            arcs: wg.arc_count() as u128,
        };
        let dp = Sizes {
            vertices: walk_count(g, width - 1),
            arcs: walk_count(g, width),
        };
        let mut row_agree = dp.vertices == constructed.vertices && dp.arcs == constructed.arcs;
        let mut row = json!({
            "width": width,
            "walk_dp": dp,
            "constructed": constructed,
        });
        if width == 2 {
            let f = window_counts(g);
            row_agree &= f.vertices as u128 == constructed.vertices && f.arcs as u128 == constructed.arcs;
            row["formula"] = to_json(&f);
        }
        let m = g.edge_count();
        let n = g.vertex_count();
        row["densities"] = json!({
            "edges_per_vertex_pair": if n == 0 { 0.0 } else { m as f64 / (n * n) as f64 },
            "arcs_per_edge": if m == 0 { 0.0 } else { constructed.arcs as f64 / m as f64 },
        });
        row["agree"] = Value::from(row_agree);
        agree &= row_agree;
        rows.push(row);
    }
    Ok((rows, agree))
}

pub fn windows(args: &AlgebraArgs, graph: &Path, widths: &[usize]) -> CmdResult {
    with_instance!(instance(&args.alg)?, alg => {
        let g = load_graph(graph, &alg).map_err(usage)?;
        let (rows, agree) = window_rows(&g, widths)?;
        Ok(Output {
            doc: json!({
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "agree": agree,
                "widths": rows,
            }),
            code: if agree { 0 } else { 1 },
        })
    })
}

pub fn separation(op: &str, gamma: &str) -> CmdResult {
    let Instance::Table(alg) = instance(op)? else {
        return Err(usage(
            "separation needs a finite table instance (boolf2 or table:<path>)",
        ));
    };
    let g = alg.gamma(gamma).map_err(usage)?;
    let report = separation_report(&alg, g).map_err(usage)?;
    let separated = report.separated();
    let mut doc = to_json(&report);
    doc["separated"] = Value::from(separated);
    Ok(Output {
        doc,
        code: if separated { 0 } else { 1 },
    })
}

pub fn search(size: usize, budget: u64, seed: u64, parallel: bool) -> CmdResult {
    if budget == 0 {
        return Err(usage("--budget must be positive"));
    }
    let report = search_nondegenerate_ttgs(size, budget, seed, parallel).map_err(usage)?;
    Ok(Output {
        doc: to_json(&report),
        code: 0,
    })
}

/// Nested family: one random edge order, growing prefixes.
pub fn bench(vertices: usize, steps: usize, seed: u64, parallel: bool) -> CmdResult {
    if vertices < 2 || steps == 0 {
        return Err(usage("bench needs at least 2 vertices and 1 step"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|u| (0..vertices).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(&mut rng);
    let weighted: Vec<(usize, usize, ExtInt)> = pairs
        .into_iter()
        .map(|(u, v)| (u, v, ExtInt::Finite(rng.gen_range(0..10))))
        .collect();
    let alg = minplus_degenerate();
    let gamma = alg.gamma("g0").map_err(usage)?;
    let opts = SolveOptions {
        parallel,
        ..SolveOptions::default()
    };
    let mut rows = vec!["edges,max_out_degree,arcs,windows_per_iteration,edges_times_degree,iterations".to_string()];
    let mut identity = true;
    let mut non_decreasing = true;
    let mut bounded = true;
    let mut previous = 0;
    for step in 1..=steps {
        let m = weighted.len() * step / steps;
        let g = DirectedWeightedGraph::new(vertices, weighted[..m].iter().copied()).map_err(usage)?;
        let sol = run_solver(&g, 0, &alg, gamma, &opts).map_err(solver_failure)?;
        let arcs = window_counts(&g).arcs;
        let per_iter = sol.trace.windows_examined[0];
        identity &= sol.trace.windows_examined.iter().all(|&w| w == arcs);
        non_decreasing &= per_iter >= previous;
        bounded &= per_iter <= m * g.max_out_degree();
        previous = per_iter;
        let iterations = serde_json::to_string(&sol.trace.iterations_to_fixpoint).expect("serializes");
        rows.push(format!(
            "{m},{},{arcs},{per_iter},{},{}",
            g.max_out_degree(),
            m * g.max_out_degree(),
            iterations.trim_matches('"')
        ));
    }
    let ok = identity && non_decreasing && bounded;
    Ok(Output {
        doc: json!({
            "vertices": vertices,
            "steps": steps,
            "seed": seed,
            "counter_identity": identity,
            "non_decreasing": non_decreasing,
            "within_edges_times_degree": bounded,
            "csv": rows,
        }),
        code: if ok { 0 } else { 1 },
    })
}
