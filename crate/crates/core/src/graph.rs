//! Directed weighted graphs and the lifted window graph.
//!
//! A window of width `w` is a walk of `w` consecutive edges. The window graph
//! of width `w` has the `(w−1)`-edge walks as vertices and one arc per
//! `w`-edge walk, joining its prefix to its suffix. At width 2 the vertices
//! are exactly the edges of the base graph.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed graph file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("invalid weight on edge ({from}, {to}): {source}")]
    Weight {
        from: usize,
        to: usize,
        #[source]
        source: AlgebraError,
    },
    #[error("window width must be at least 2, got {0}")]
    WidthTooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge<E> {
    pub from: usize,
    pub to: usize,
    pub weight: E,
}

/// A simple directed graph (self-loops allowed, no parallel edges).
#[derive(Debug, Clone)]
pub struct DirectedWeightedGraph<E> {
    n: usize,
    // sorted by (from, to)
    edges: Vec<Edge<E>>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    index: BTreeMap<(usize, usize), usize>,
}

impl<E: Copy> DirectedWeightedGraph<E> {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, E)>) -> Result<Self, GraphError> {
        let mut by_pair = BTreeMap::new();
        for (from, to, weight) in edges {
            for v in [from, to] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, count: n });
                }
            }
            if by_pair.insert((from, to), weight).is_some() {
                return Err(GraphError::DuplicateEdge(from, to));
            }
        }
        let edges: Vec<Edge<E>> = by_pair
            .into_iter()
            .map(|((from, to), weight)| Edge { from, to, weight })
            .collect();
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        let mut index = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.from].push(i);
            in_edges[e.to].push(i);
            index.insert((e.from, e.to), i);
        }
        Ok(DirectedWeightedGraph {
            n,
            edges,
            out_edges,
            in_edges,
            index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<E>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge<E> {
        &self.edges[i]
    }

    /// Indices of edges leaving `v`, ordered by head.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    /// Indices of edges entering `v`, ordered by tail.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_edges[v].len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_edges[v].len()
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.n).map(|v| self.out_degree(v)).max().unwrap_or(0)
    }

    pub fn max_in_degree(&self) -> usize {
        (0..self.n).map(|v| self.in_degree(v)).max().unwrap_or(0)
    }

    pub fn weight(&self, from: usize, to: usize) -> Option<E> {
        self.index.get(&(from, to)).map(|&i| self.edges[i].weight)
    }

    /// Kahn topological order, `None` when a cycle (including a self-loop)
    /// exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = (0..self.n).map(|v| self.in_degree(v)).collect();
        let mut ready: Vec<usize> = (0..self.n).filter(|&v| indeg[v] == 0).rev().collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(u) = ready.pop() {
            order.push(u);
            for &e in &self.out_edges[u] {
                let t = self.edges[e].to;
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.push(t);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_dag(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Edge count of the longest path, for acyclic graphs.
    pub fn longest_path_edges(&self) -> Option<usize> {
        let order = self.topological_order()?;
        let mut best = vec![0usize; self.n];
        for &u in &order {
            for &e in &self.out_edges[u] {
                let t = self.edges[e].to;
                best[t] = best[t].max(best[u] + 1);
            }
        }
        Some(best.into_iter().max().unwrap_or(0))
    }

    pub fn map_weights<F: Copy>(&self, f: impl Fn(E) -> F) -> DirectedWeightedGraph<F> {
        DirectedWeightedGraph::new(self.n, self.edges.iter().map(|e| (e.from, e.to, f(e.weight))))
            .expect("same shape as a valid graph")
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum WeightLiteral {
    Text(String),
    Int(i64),
}

#[derive(Debug, Deserialize, Serialize)]
struct EdgeRecord {
    from: usize,
    to: usize,
    weight: WeightLiteral,
}

#[derive(Debug, Deserialize, Serialize)]
struct GraphFile {
    vertices: usize,
    edges: Vec<EdgeRecord>,
}

pub fn parse_graph<A: Algebra>(json: &str, alg: &A) -> Result<DirectedWeightedGraph<A::Elem>, GraphError> {
    let file: GraphFile = serde_json::from_str(json)?;
    let mut edges = Vec::with_capacity(file.edges.len());
    for rec in file.edges {
        let literal = match rec.weight {
            WeightLiteral::Text(s) => s,
            WeightLiteral::Int(i) => i.to_string(),
        };
        let weight = alg.parse_literal(&literal).map_err(|source| GraphError::Weight {
            from: rec.from,
            to: rec.to,
            source,
        })?;
        edges.push((rec.from, rec.to, weight));
    }
    DirectedWeightedGraph::new(file.vertices, edges)
}

pub fn load_graph<A: Algebra>(path: impl AsRef<Path>, alg: &A) -> Result<DirectedWeightedGraph<A::Elem>, GraphError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_graph(&text, alg)
}

/// Renders a graph in the on-disk JSON format.
pub fn graph_to_json<A: Algebra>(g: &DirectedWeightedGraph<A::Elem>, alg: &A) -> String {
    let file = GraphFile {
        vertices: g.vertex_count(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeRecord {
                from: e.from,
                to: e.to,
                weight: WeightLiteral::Text(alg.render(e.weight)),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("graph files always serialize")
}

/// A walk given by its vertex sequence; `vertices.len() - 1` edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Walk {
    pub vertices: Vec<usize>,
}

impl Walk {
    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn weights<E: Copy>(&self, g: &DirectedWeightedGraph<E>) -> Vec<E> {
        self.vertices
            .windows(2)
            .map(|p| g.weight(p[0], p[1]).expect("walk follows graph edges"))
            .collect()
    }
}

/// All walks with exactly `edges` edges, in lexicographic vertex order.
pub fn walks<E: Copy>(g: &DirectedWeightedGraph<E>, edges: usize) -> Vec<Walk> {
    fn extend<E: Copy>(g: &DirectedWeightedGraph<E>, cur: &mut Vec<usize>, left: usize, out: &mut Vec<Walk>) {
        if left == 0 {
            out.push(Walk { vertices: cur.clone() });
            return;
        }
        let last = *cur.last().expect("walks start at a vertex");
        for &e in g.out_edges(last) {
            cur.push(g.edge(e).to);
            extend(g, cur, left - 1, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        extend(g, &mut vec![v], edges, &mut out);
    }
    out
}

/// Number of walks with exactly `edges` edges, by dynamic programming over
/// in-adjacency.
pub fn walk_count<E: Copy>(g: &DirectedWeightedGraph<E>, edges: usize) -> u128 {
    let mut ending: Vec<u128> = vec![1; g.vertex_count()];
    for _ in 0..edges {
        let mut next = vec![0u128; g.vertex_count()];
        for e in g.edges() {
            next[e.to] += ending[e.from];
        }
        ending = next;
    }
    ending.iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowArc {
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone)]
pub struct WindowGraph {
    pub width: usize,
    pub vertices: Vec<Walk>,
    pub arcs: Vec<WindowArc>,
}

impl WindowGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }
}

pub fn build_window_graph<E: Copy>(g: &DirectedWeightedGraph<E>, width: usize) -> Result<WindowGraph, GraphError> {
    if width < 2 {
        return Err(GraphError::WidthTooSmall(width));
    }
    let vertices = walks(g, width - 1);
    let position: HashMap<&[usize], usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, w)| (w.vertices.as_slice(), i))
        .collect();
    let arcs = walks(g, width)
        .iter()
        .map(|w| {
            let k = w.vertices.len();
            WindowArc {
                source: position[&w.vertices[..k - 1]],
                target: position[&w.vertices[1..]],
            }
        })
        .collect();
    Ok(WindowGraph { width, vertices, arcs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowCounts {
    pub vertices: usize,
    pub arcs: usize,
}

/// Width-2 window-graph size from degree tables: `(|E|, Σ_u deg⁻(u)·deg⁺(u))`.
pub fn window_counts<E: Copy>(g: &DirectedWeightedGraph<E>) -> WindowCounts {
    WindowCounts {
        vertices: g.edge_count(),
        arcs: (0..g.vertex_count()).map(|u| g.in_degree(u) * g.out_degree(u)).sum(),
    }
}

/// All `width`-edge walks ending at `v`, in lexicographic vertex order.
pub fn enumerate_windows_into<E: Copy>(g: &DirectedWeightedGraph<E>, v: usize, width: usize) -> Vec<Walk> {
    fn back<E: Copy>(g: &DirectedWeightedGraph<E>, rev: &mut Vec<usize>, left: usize, out: &mut Vec<Walk>) {
        if left == 0 {
            out.push(Walk {
                vertices: rev.iter().rev().copied().collect(),
            });
            return;
        }
        let first = *rev.last().expect("nonempty");
        for &e in g.in_edges(first) {
            rev.push(g.edge(e).from);
            back(g, rev, left - 1, out);
            rev.pop();
        }
    }
    let mut out = Vec::new();
    if v < g.vertex_count() {
        back(g, &mut vec![v], width, &mut out);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{minplus_degenerate, ExtInt};

    fn unit(n: usize, edges: &[(usize, usize)]) -> DirectedWeightedGraph<ExtInt> {
        DirectedWeightedGraph::new(n, edges.iter().map(|&(a, b)| (a, b, ExtInt::Finite(1)))).unwrap()
    }

    fn star() -> DirectedWeightedGraph<ExtInt> {
        // a=0, b=1, u=2, c=3, d=4
        unit(5, &[(0, 2), (1, 2), (2, 3), (2, 4)])
    }

    #[test]
    fn load_path_file() {
        let json = r#"{"vertices": 5, "edges": [
            {"from": 0, "to": 1, "weight": "1"}, {"from": 1, "to": 2, "weight": "2"},
            {"from": 2, "to": 3, "weight": "inf"}, {"from": 3, "to": 4, "weight": 4}]}"#;
        let g = parse_graph(json, &minplus_degenerate()).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.weight(2, 3), Some(ExtInt::Inf));
        assert_eq!(g.weight(3, 4), Some(ExtInt::Finite(4)));
        assert_eq!((g.in_degree(1), g.out_degree(1)), (1, 1));
    }

    #[test]
    fn load_errors() {
        let mp = minplus_degenerate();
        let empty = parse_graph(r#"{"vertices": 3, "edges": []}"#, &mp).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let dup =
            r#"{"vertices": 2, "edges": [{"from": 0, "to": 1, "weight": "1"}, {"from": 0, "to": 1, "weight": "2"}]}"#;
        assert!(matches!(parse_graph(dup, &mp), Err(GraphError::DuplicateEdge(0, 1))));
        let bad = r#"{"vertices": 2, "edges": [{"from": 0, "to": 1, "weight": "x"}]}"#;
        assert!(matches!(parse_graph(bad, &mp), Err(GraphError::Weight { .. })));
        let range = r#"{"vertices": 2, "edges": [{"from": 0, "to": 2, "weight": "1"}]}"#;
        assert!(matches!(
            parse_graph(range, &mp),
            Err(GraphError::VertexOutOfRange { vertex: 2, count: 2 })
        ));
    }

    #[test]
    fn window_graph_examples() {
        let p = unit(3, &[(0, 1), (1, 2)]);
        let wg = build_window_graph(&p, 2).unwrap();
        assert_eq!((wg.vertex_count(), wg.arc_count()), (2, 1));

        let s = star();
        let wg = build_window_graph(&s, 2).unwrap();
        assert_eq!((wg.vertex_count(), wg.arc_count()), (4, 4));
        assert_eq!(window_counts(&s), WindowCounts { vertices: 4, arcs: 4 });

        let e = unit(4, &[]);
        for w in 2..5 {
            let wg = build_window_graph(&e, w).unwrap();
            assert_eq!((wg.vertex_count(), wg.arc_count()), (0, 0));
        }
        assert!(matches!(build_window_graph(&p, 1), Err(GraphError::WidthTooSmall(1))));
    }

    #[test]
    fn window_counts_on_path() {
        let p = unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(window_counts(&p), WindowCounts { vertices: 4, arcs: 3 });
        let three = unit(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(build_window_graph(&three, 3).unwrap().vertex_count(), 2);
        assert_eq!(walk_count(&three, 2), 2);
    }

    #[test]
    fn arcs_overlap_in_width_minus_one_edges() {
        let g = unit(4, &[(0, 1), (1, 2), (2, 0), (1, 3), (3, 3)]);
        for width in 2..5 {
            let wg = build_window_graph(&g, width).unwrap();
            for arc in &wg.arcs {
                let s = &wg.vertices[arc.source].vertices;
                let t = &wg.vertices[arc.target].vertices;
                assert_eq!(s[1..], t[..t.len() - 1]);
            }
        }
    }

    #[test]
    fn windows_into_examples() {
        let diamond = unit(4, &[(0, 1), (1, 3), (0, 2), (2, 3)]);
        let w = enumerate_windows_into(&diamond, 3, 2);
        assert_eq!(
            w.iter().map(|w| w.vertices.clone()).collect::<Vec<_>>(),
            vec![vec![0, 1, 3], vec![0, 2, 3]]
        );
        assert!(enumerate_windows_into(&diamond, 0, 2).is_empty());

        let looped = unit(2, &[(0, 0), (0, 1)]);
        let w = enumerate_windows_into(&looped, 1, 2);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].vertices, vec![0, 0, 1]);
    }

    #[test]
    fn dag_helpers() {
        let p = unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(p.is_dag());
        assert_eq!(p.longest_path_edges(), Some(4));
        let c = unit(2, &[(0, 1), (1, 0)]);
        assert!(!c.is_dag());
        assert_eq!(c.longest_path_edges(), None);
        assert!(!unit(1, &[(0, 0)]).is_dag());
    }

    #[test]
    fn graph_json_round_trip() {
        let mp = minplus_degenerate();
        let g = unit(3, &[(0, 1), (1, 2)]);
        let back = parse_graph(&graph_to_json(&g, &mp), &mp).unwrap();
        assert_eq!(back.edges(), g.edges());
    }
}
