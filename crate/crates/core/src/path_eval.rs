//! Window folds along paths, admissible parenthesizations, and the
//! brute-force path-enumeration oracle.
//!
//! Odd-length weight sequences are contracted by consecutive triples
//! (`fold_odd`); even-length sequences are consumed two weights at a time
//! starting from a seed (`seeded_fold`), which is what the relaxation
//! operator computes. The two families are kept apart.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Gamma};
use crate::graph::DirectedWeightedGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("sequence of length {len} cannot be folded: {expected}")]
    Parity { len: usize, expected: &'static str },
    #[error("({0}, {1}) is not an edge of the graph")]
    NotAPath(usize, usize),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),
    #[error("tree has {tree} leaves but the sequence has {seq} elements")]
    ArityMismatch { tree: usize, seq: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn ensure_odd(len: usize) -> Result<(), PathError> {
    if len < 3 || len.is_multiple_of(2) {
        Err(PathError::Parity {
            len,
            expected: "odd length of at least 3",
        })
    } else {
        Ok(())
    }
}

/// `Fold(w_1..w_k) = [Fold(w_1..w_{k−2}), w_{k−1}, w_k]`, base case
/// `[w_1, w_2, w_3]`. Each weight is consumed exactly once.
pub fn fold_odd<A: Algebra>(alg: &A, gamma: Gamma, ws: &[A::Elem]) -> Result<A::Elem, PathError> {
    ensure_odd(ws.len())?;
    let mut acc = alg.ternary(gamma, ws[0], ws[1], ws[2]);
    for pair in ws[3..].chunks(2) {
        acc = alg.ternary(gamma, acc, pair[0], pair[1]);
    }
    Ok(acc)
}

/// The recursion `Fold(w_1..w_k) = [Fold(w_1..w_{k−1}), w_{k−1}, w_k]`, which
/// reuses `w_{k−1}`. Kept for comparison only; under min-plus it
/// double-counts interior weights.
pub fn fold_overlapping<A: Algebra>(alg: &A, gamma: Gamma, ws: &[A::Elem]) -> Result<A::Elem, PathError> {
    let k = ws.len();
    if k < 3 {
        return Err(PathError::Parity {
            len: k,
            expected: "length of at least 3",
        });
    }
    let mut acc = alg.ternary(gamma, ws[0], ws[1], ws[2]);
    for j in 4..=k {
        acc = alg.ternary(gamma, acc, ws[j - 2], ws[j - 1]);
    }
    Ok(acc)
}

/// `state ← [state, w_{2i+1}, w_{2i+2}]` starting from `seed`.
pub fn seeded_fold<A: Algebra>(alg: &A, gamma: Gamma, seed: A::Elem, ws: &[A::Elem]) -> Result<A::Elem, PathError> {
    if ws.len() < 2 || ws.len() % 2 != 0 {
        return Err(PathError::Parity {
            len: ws.len(),
            expected: "even length of at least 2",
        });
    }
    Ok(ws
        .chunks(2)
        .fold(seed, |state, pair| alg.ternary(gamma, state, pair[0], pair[1])))
}

/// Seeded fold consuming `width` weights per step through the
/// `(width+1)`-ary operation.
pub fn seeded_fold_width<A: Algebra>(
    alg: &A,
    gamma: Gamma,
    seed: A::Elem,
    ws: &[A::Elem],
    width: usize,
) -> Result<A::Elem, PathError> {
    if width < 2 || ws.is_empty() || ws.len() % width != 0 {
        return Err(PathError::Parity {
            len: ws.len(),
            expected: "a positive multiple of the window width",
        });
    }
    let mut args = Vec::with_capacity(width + 1);
    let mut state = seed;
    for chunk in ws.chunks(width) {
        args.clear();
        args.push(state);
        args.extend_from_slice(chunk);
        state = alg.kary(gamma, &args)?;
    }
    Ok(state)
}

/// Ternary tree over consecutive leaf positions (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParenthesizationTree {
    Leaf(usize),
    Node(Box<[ParenthesizationTree; 3]>),
}

impl ParenthesizationTree {
    pub fn leaf_count(&self) -> usize {
        match self {
            ParenthesizationTree::Leaf(_) => 1,
            ParenthesizationTree::Node(c) => c.iter().map(Self::leaf_count).sum(),
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        match self {
            ParenthesizationTree::Leaf(i) => vec![*i],
            ParenthesizationTree::Node(c) => c.iter().flat_map(Self::leaves).collect(),
        }
    }
}

impl fmt::Display for ParenthesizationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParenthesizationTree::Leaf(i) => write!(f, "{}", i + 1),
            ParenthesizationTree::Node(c) => write!(f, "[{},{},{}]", c[0], c[1], c[2]),
        }
    }
}

fn trees_over(lo: usize, len: usize) -> Vec<ParenthesizationTree> {
    if len == 1 {
        return vec![ParenthesizationTree::Leaf(lo)];
    }
    let mut out = Vec::new();
    for a in (1..len).step_by(2) {
        for b in (1..len - a).step_by(2) {
            let c = len - a - b;
            for left in trees_over(lo, a) {
                for mid in trees_over(lo + a, b) {
                    for right in trees_over(lo + a + b, c) {
                        out.push(ParenthesizationTree::Node(Box::new([left.clone(), mid.clone(), right])));
                    }
                }
            }
        }
    }
    out
}

/// Every ternary tree over `k` consecutive leaves.
pub fn enumerate_parenthesizations(k: usize) -> Result<Vec<ParenthesizationTree>, PathError> {
    ensure_odd(k)?;
    Ok(trees_over(0, k))
}

pub fn eval_parenthesization<A: Algebra>(
    alg: &A,
    gamma: Gamma,
    tree: &ParenthesizationTree,
    ws: &[A::Elem],
) -> Result<A::Elem, PathError> {
    let leaves = tree.leaf_count();
    if leaves != ws.len() {
        return Err(PathError::ArityMismatch {
            tree: leaves,
            seq: ws.len(),
        });
    }
    fn eval<A: Algebra>(alg: &A, gamma: Gamma, t: &ParenthesizationTree, ws: &[A::Elem]) -> A::Elem {
        match t {
            ParenthesizationTree::Leaf(i) => ws[*i],
            ParenthesizationTree::Node(c) => alg.ternary(
                gamma,
                eval(alg, gamma, &c[0], ws),
                eval(alg, gamma, &c[1], ws),
                eval(alg, gamma, &c[2], ws),
            ),
        }
    }
    Ok(eval(alg, gamma, tree, ws))
}

/// Weights along a vertex sequence, verifying every step is an edge.
pub fn path_weights<E: Copy>(g: &DirectedWeightedGraph<E>, path: &[usize]) -> Result<Vec<E>, PathError> {
    if let Some(&v) = path.iter().find(|&&v| v >= g.vertex_count()) {
        return Err(PathError::UnknownVertex(v));
    }
    path.windows(2)
        .map(|p| g.weight(p[0], p[1]).ok_or(PathError::NotAPath(p[0], p[1])))
        .collect()
}

/// Ternary cost of a path with an odd number (≥ 3) of edges.
pub fn path_cost<A: Algebra>(
    alg: &A,
    gamma: Gamma,
    g: &DirectedWeightedGraph<A::Elem>,
    path: &[usize],
) -> Result<A::Elem, PathError> {
    let ws = path_weights(g, path)?;
    fold_odd(alg, gamma, &ws)
}

/// Which vertex sequences the oracle enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathMode {
    /// No repeated vertices.
    #[default]
    Simple,
    /// Arbitrary walks, bounded by the edge budget.
    Walks,
}

/// Calls `visit` for every path `s ⇝ t` with between 1 and `max_edges`
/// edges, in lexicographic vertex order.
pub fn for_each_path<E: Copy>(
    g: &DirectedWeightedGraph<E>,
    s: usize,
    t: usize,
    max_edges: usize,
    mode: PathMode,
    mut visit: impl FnMut(&[usize]),
) -> Result<(), PathError> {
    for v in [s, t] {
        if v >= g.vertex_count() {
            return Err(PathError::UnknownVertex(v));
        }
    }
    let mut on_path = vec![false; g.vertex_count()];
    let mut cur = vec![s];
    on_path[s] = true;

    #[allow(clippy::too_many_arguments)]
    fn go<E: Copy>(
        g: &DirectedWeightedGraph<E>,
        t: usize,
        max_edges: usize,
        mode: PathMode,
        cur: &mut Vec<usize>,
        on_path: &mut [bool],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        let last = *cur.last().expect("nonempty");
        if cur.len() > 1 && last == t {
            visit(cur);
        }
        if cur.len() > max_edges {
            return;
        }
        for &e in g.out_edges(last) {
            let next = g.edge(e).to;
            if mode == PathMode::Simple && on_path[next] {
                continue;
            }
            cur.push(next);
            on_path[next] = true;
            go(g, t, max_edges, mode, cur, on_path, visit);
            cur.pop();
            if !cur.contains(&next) {
                on_path[next] = false;
            }
        }
    }
    go(g, t, max_edges, mode, &mut cur, &mut on_path, &mut visit);
    Ok(())
}

/// Brute-force optima per parity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleOpt<E> {
    /// Aggregate of seeded folds over even-length paths (k ≥ 2).
    pub even_opt: E,
    /// Aggregate of odd folds over odd-length paths (k ≥ 3).
    pub odd_opt: E,
    pub even_paths: usize,
    pub odd_paths: usize,
}

pub fn oracle_opt<A: Algebra>(
    alg: &A,
    gamma: Gamma,
    g: &DirectedWeightedGraph<A::Elem>,
    s: usize,
    t: usize,
    max_edges: usize,
    mode: PathMode,
) -> Result<OracleOpt<A::Elem>, PathError> {
    let mut out = OracleOpt {
        even_opt: alg.top(),
        odd_opt: alg.top(),
        even_paths: 0,
        odd_paths: 0,
    };
    let mut failure = None;
    for_each_path(g, s, t, max_edges, mode, |path| {
        let ws = path_weights(g, path).expect("enumerated paths follow edges");
        let k = ws.len();
        if k % 2 == 0 {
            match seeded_fold(alg, gamma, alg.seed(), &ws) {
                Ok(c) => {
                    out.even_opt = alg.aggregate(out.even_opt, c);
                    out.even_paths += 1;
                }
                Err(e) => failure = Some(e),
            }
        } else if k >= 3 {
            match fold_odd(alg, gamma, &ws) {
                Ok(c) => {
                    out.odd_opt = alg.aggregate(out.odd_opt, c);
                    out.odd_paths += 1;
                }
                Err(e) => failure = Some(e),
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Aggregate of width-`width` seeded folds over all paths whose edge count is
/// a positive multiple of `width`; top when there are none.
#[allow(clippy::too_many_arguments)]
pub fn oracle_seeded<A: Algebra>(
    alg: &A,
    gamma: Gamma,
    g: &DirectedWeightedGraph<A::Elem>,
    s: usize,
    t: usize,
    max_edges: usize,
    width: usize,
    mode: PathMode,
) -> Result<A::Elem, PathError> {
    let mut best = alg.top();
    let mut failure = None;
    for_each_path(g, s, t, max_edges, mode, |path| {
        let ws = path_weights(g, path).expect("enumerated paths follow edges");
        if ws.len() % width == 0 {
            match seeded_fold_width(alg, gamma, alg.seed(), &ws, width) {
                Ok(c) => best = alg.aggregate(best, c),
                Err(e) => failure = Some(e),
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}
