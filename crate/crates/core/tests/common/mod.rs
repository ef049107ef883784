#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ternpath::graph::DirectedWeightedGraph;
use ternpath::instances::ExtInt;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random DAG on `n` vertices: edges go forward in a random vertex order.
pub fn random_dag<E: Copy>(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    mut weight: impl FnMut(&mut ChaCha8Rng) -> E,
) -> DirectedWeightedGraph<E> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((order[i], order[j], weight(rng)));
            }
        }
    }
    DirectedWeightedGraph::new(n, edges).unwrap()
}

/// Random digraph, self-loops included.
pub fn random_digraph<E: Copy>(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    mut weight: impl FnMut(&mut ChaCha8Rng) -> E,
) -> DirectedWeightedGraph<E> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(density) {
                edges.push((u, v, weight(rng)));
            }
        }
    }
    DirectedWeightedGraph::new(n, edges).unwrap()
}

pub fn digit(rng: &mut ChaCha8Rng) -> ExtInt {
    ExtInt::Finite(rng.gen_range(0..10))
}

/// All ternary tables on `{0,1}` in counting order (x-major flat layout).
pub fn all_binary_carrier_ternaries() -> Vec<Vec<usize>> {
    (0..256u32)
        .map(|bits| (0..8).map(|i| ((bits >> (7 - i)) & 1) as usize).collect())
        .collect()
}

pub fn is_ternary_associative(n: usize, t: &[usize]) -> bool {
    let op = |x: usize, y: usize, z: usize| t[(x * n + y) * n + z];
    let mut ok = true;
    for idx in 0..n.pow(5) {
        let d: Vec<usize> = (0..5).map(|i| (idx / n.pow(4 - i as u32)) % n).collect();
        let l = op(op(d[0], d[1], d[2]), d[3], d[4]);
        ok &= l == op(d[0], op(d[1], d[2], d[3]), d[4]) && l == op(d[0], d[1], op(d[2], d[3], d[4]));
    }
    ok
}
