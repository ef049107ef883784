//! Relaxation operator over vertex valuations and Kleene iteration from the
//! top-initialized state.
//!
//! For `v ≠ s` one step computes the aggregate, over every window
//! `(u_1, …, u_w, v)` of `w` edges ending at `v`, of
//! `⟨f(u_1), w(e_1), …, w(e_w)⟩`; the source stays pinned at the seed. At the
//! default width 2 this is the ternary operation.

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{check_all, Algebra, AlgebraError, AxiomReport, CheckConfig, Gamma, SampleRng, Witness};
use crate::graph::{enumerate_windows_into, DirectedWeightedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("source vertex {0} is not in the graph")]
    SourceOutOfRange(usize),
    #[error("instance `{0}` only satisfies the triple-system identities; pass the override to solve anyway")]
    TripleSystemOnly(String),
    #[error("instance fails the {axiom} axiom; pass the override to solve anyway")]
    GateFailed { axiom: String },
    #[error("window width must be at least 2, got {0}")]
    WidthTooSmall(usize),
    #[error("iteration cap must be at least 1")]
    ZeroIterationCap,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Total map from vertices to carrier values, ordered pointwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Valuation<E>(pub Vec<E>);

impl<E: Copy> Valuation<E> {
    pub fn get(&self, v: usize) -> E {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn leq<A: Algebra<Elem = E>>(&self, alg: &A, other: &Valuation<E>) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(&a, &b)| alg.leq_unchecked(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationOutcome {
    Converged(usize),
    CapReached,
}

impl Serialize for IterationOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            IterationOutcome::Converged(n) => s.serialize_u64(*n as u64),
            IterationOutcome::CapReached => s.serialize_str("cap-reached"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelaxationTrace<E> {
    /// `f⁽⁰⁾, f⁽¹⁾, …`, one snapshot per executed step plus the initial state.
    pub snapshots: Vec<Valuation<E>>,
    /// Windows enumerated by each executed step.
    pub windows_examined: Vec<usize>,
    pub stabilized: bool,
    pub iterations_to_fixpoint: IterationOutcome,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub width: usize,
    /// Defaults to `2·|V|` when unset.
    pub max_iterations: Option<usize>,
    pub force: bool,
    pub parallel: bool,
    pub gate: CheckConfig,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            width: 2,
            max_iterations: None,
            force: false,
            parallel: false,
            gate: CheckConfig { budget: 1000, seed: 0 },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution<E> {
    pub valuation: Valuation<E>,
    pub trace: RelaxationTrace<E>,
}

pub fn init_state<A: Algebra>(
    g: &DirectedWeightedGraph<A::Elem>,
    s: usize,
    alg: &A,
) -> Result<Valuation<A::Elem>, SolverError> {
    if s >= g.vertex_count() {
        return Err(SolverError::SourceOutOfRange(s));
    }
    let mut values = vec![alg.top(); g.vertex_count()];
    values[s] = alg.seed();
    Ok(Valuation(values))
}

/// Windows ending at each vertex, resolved to (start vertex, edge weights).
struct WindowPlan<E> {
    into: Vec<Vec<(usize, Vec<E>)>>,
    total: usize,
}

impl<E: Copy + Send + Sync> WindowPlan<E> {
    fn new(g: &DirectedWeightedGraph<E>, width: usize) -> Self {
        let into: Vec<Vec<(usize, Vec<E>)>> = (0..g.vertex_count())
            .map(|v| {
                enumerate_windows_into(g, v, width)
                    .into_iter()
                    .map(|w| (w.vertices[0], w.weights(g)))
                    .collect()
            })
            .collect();
        let total = into.iter().map(Vec::len).sum();
        WindowPlan { into, total }
    }

    fn apply<A: Algebra<Elem = E>>(
        &self,
        alg: &A,
        gamma: Gamma,
        s: usize,
        f: &Valuation<E>,
        parallel: bool,
    ) -> Result<Valuation<E>, AlgebraError> {
        let relax = |v: usize| -> Result<E, AlgebraError> {
            if v == s {
                return Ok(alg.seed());
            }
            let mut acc = alg.top();
            let mut args = Vec::new();
            for (start, ws) in &self.into[v] {
                let value = if ws.len() == 2 {
                    alg.ternary(gamma, f.get(*start), ws[0], ws[1])
                } else {
                    args.clear();
                    args.push(f.get(*start));
                    args.extend_from_slice(ws);
                    alg.kary(gamma, &args)?
                };
                acc = alg.aggregate(acc, value);
            }
            Ok(acc)
        };
        let values = if parallel {
            (0..f.len()).into_par_iter().map(relax).collect::<Result<Vec<_>, _>>()?
        } else {
            (0..f.len()).map(relax).collect::<Result<Vec<_>, _>>()?
        };
        Ok(Valuation(values))
    }
}

fn ensure_width<A: Algebra>(alg: &A, gamma: Gamma, width: usize) -> Result<(), SolverError> {
    if width < 2 {
        return Err(SolverError::WidthTooSmall(width));
    }
    if width > 2 {
        alg.kary(gamma, &vec![alg.top(); width + 1])?;
    }
    Ok(())
}

/// One application of the relaxation operator. Returns the new valuation and
/// the number of windows enumerated (all windows, including those into `s`).
pub fn relax_step<A: Algebra>(
    g: &DirectedWeightedGraph<A::Elem>,
    s: usize,
    alg: &A,
    gamma: Gamma,
    f: &Valuation<A::Elem>,
    width: usize,
) -> Result<(Valuation<A::Elem>, usize), SolverError> {
    if s >= g.vertex_count() {
        return Err(SolverError::SourceOutOfRange(s));
    }
    ensure_width(alg, gamma, width)?;
    let plan = WindowPlan::new(g, width);
    let next = plan.apply(alg, gamma, s, f, false)?;
    Ok((next, plan.total))
}

/// Refuses instances that are flagged triple-system-only or fail one of the
/// ordered axioms.
pub fn gate<A: Algebra>(alg: &A, gamma: Gamma, cfg: &CheckConfig) -> Result<(), SolverError> {
    if alg.triple_system_only() {
        return Err(SolverError::TripleSystemOnly(alg.name().to_string()));
    }
    let suite = check_all(alg, gamma, cfg);
    match suite.first_failure() {
        Some(r) => Err(SolverError::GateFailed {
            axiom: r.axiom_name.clone(),
        }),
        None => Ok(()),
    }
}

/// Kleene iteration from `init_state` until two consecutive valuations agree
/// or the cap is hit. Hitting the cap is reported in the trace.
pub fn solve<A: Algebra>(
    g: &DirectedWeightedGraph<A::Elem>,
    s: usize,
    alg: &A,
    gamma: Gamma,
    opts: &SolveOptions,
) -> Result<Solution<A::Elem>, SolverError> {
    let init = init_state(g, s, alg)?;
    ensure_width(alg, gamma, opts.width)?;
    if !opts.force {
        gate(alg, gamma, &opts.gate)?;
    }
    let cap = opts.max_iterations.unwrap_or(2 * g.vertex_count()).max(1);
    if opts.max_iterations == Some(0) {
        return Err(SolverError::ZeroIterationCap);
    }
    let plan = WindowPlan::new(g, opts.width);
    let mut snapshots = vec![init];
    let mut windows_examined = Vec::new();
    let mut outcome = IterationOutcome::CapReached;
    for step in 0..cap {
        let cur = snapshots.last().expect("nonempty");
        let next = plan.apply(alg, gamma, s, cur, opts.parallel)?;
        windows_examined.push(plan.total);
        let done = &next == cur;
        snapshots.push(next);
        if done {
            outcome = IterationOutcome::Converged(step);
            break;
        }
    }
    let valuation = snapshots.last().expect("nonempty").clone();
    Ok(Solution {
        valuation,
        trace: RelaxationTrace {
            snapshots,
            windows_examined,
            stabilized: matches!(outcome, IterationOutcome::Converged(_)),
            iterations_to_fixpoint: outcome,
        },
    })
}

/// Every consecutive pair of snapshots is pointwise non-increasing.
pub fn check_descending<A: Algebra>(trace: &RelaxationTrace<A::Elem>, alg: &A) -> bool {
    trace.snapshots.windows(2).all(|p| p[1].leq(alg, &p[0]))
}

/// Samples pairs `f ≤ h` and checks `F f ≤ F h` pointwise. Witness inputs are
/// the valuations `f` and `h`; the coordinate is the offending vertex.
#[allow(clippy::too_many_arguments)]
pub fn operator_monotonicity_probe<A: Algebra>(
    g: &DirectedWeightedGraph<A::Elem>,
    s: usize,
    alg: &A,
    gamma: Gamma,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport<A::Elem>, SolverError> {
    if s >= g.vertex_count() {
        return Err(SolverError::SourceOutOfRange(s));
    }
    let plan = WindowPlan::new(g, 2);
    let mut rng = SampleRng::seed_from_u64(seed);
    let n = g.vertex_count();
    for checked in 1..=samples {
        let h: Vec<A::Elem> = (0..n).map(|_| alg.sample(&mut rng)).collect();
        let f: Vec<A::Elem> = h.iter().map(|&x| alg.aggregate(x, alg.sample(&mut rng))).collect();
        let (f, h) = (Valuation(f), Valuation(h));
        let ff = plan.apply(alg, gamma, s, &f, false)?;
        let fh = plan.apply(alg, gamma, s, &h, false)?;
        if let Some(v) = (0..n).find(|&v| !alg.leq_unchecked(ff.get(v), fh.get(v))) {
            return Ok(AxiomReport {
                axiom_name: "operator-monotonicity".into(),
                passed: false,
                checked,
                exhaustive: false,
                witness: Some(Witness {
                    law: "operator-monotonicity".into(),
                    coordinate: Some(v),
                    lhs: ff.get(v),
                    rhs: fh.get(v),
                    inputs: f.0,
                    alt_inputs: Some(h.0),
                }),
            });
        }
    }
    Ok(AxiomReport {
        axiom_name: "operator-monotonicity".into(),
        passed: true,
        checked: samples,
        exhaustive: false,
        witness: None,
    })
}

/// Observed iterations against `|V|−2` and `⌈L/width⌉` (`L` the longest path).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub applicable: bool,
    pub bound_vertices: Option<usize>,
    pub bound_halved: Option<usize>,
    pub observed: Option<usize>,
    pub within: bool,
}

pub fn iteration_bound_report<E: Copy>(
    g: &DirectedWeightedGraph<E>,
    trace: &RelaxationTrace<E>,
    width: usize,
) -> BoundReport {
    let observed = match trace.iterations_to_fixpoint {
        IterationOutcome::Converged(n) => Some(n),
        IterationOutcome::CapReached => None,
    };
    let Some(longest) = g.longest_path_edges() else {
        return BoundReport {
            applicable: false,
            bound_vertices: None,
            bound_halved: None,
            observed,
            within: false,
        };
    };
    let bound_vertices = g.vertex_count().saturating_sub(2);
    let bound_halved = longest.div_ceil(width.max(1));
    BoundReport {
        applicable: true,
        bound_vertices: Some(bound_vertices),
        bound_halved: Some(bound_halved),
        observed,
        within: observed.is_some_and(|o| o <= bound_vertices.min(bound_halved)),
    }
}
