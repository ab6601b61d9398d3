//! Exact maximum (weight) independent set by branch and bound.
//!
//! Vertices are considered in descending-degree order. The bound at each
//! node is a greedy clique cover of the candidate set: an independent set
//! holds at most one vertex per clique, so the sum over cliques of the
//! heaviest member bounds what the candidates can still add.

use crate::error::{Error, Result};
use crate::graph::{BitSet, Graph};

/// Default vertex cap for the exact solvers.
pub const DEFAULT_MAX_VERTICES: usize = 512;

const WEIGHT_EPS: f64 = 1e-12;

/// Outcome of an exact independence computation.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceResult {
    /// Cardinality (unweighted) or total weight of the witness.
    pub value: f64,
    /// The optimal independent set, ascending.
    pub witness: Vec<usize>,
    pub nodes_explored: u64,
}

impl IndependenceResult {
    /// `value` as an integer, for unweighted results.
    pub fn size(&self) -> usize {
        self.witness.len()
    }
}

struct Search<'a> {
    graph: &'a Graph,
    weights: &'a [f64],
    /// Vertices by descending degree, ties by index.
    order: Vec<usize>,
    best_value: f64,
    best_set: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    /// Greedy clique cover of `cand` in degree order. Returns the vertices
    /// in cover order together with the running bound after each clique.
    fn cover(&self, cand: &BitSet) -> Vec<(usize, f64)> {
        let mut remaining: Vec<usize> = self.order.iter().copied().filter(|&v| cand.contains(v)).collect();
        let mut out = Vec::with_capacity(remaining.len());
        let mut bound = 0.0;
        while !remaining.is_empty() {
            let mut clique: Vec<usize> = Vec::new();
            let mut rest = Vec::with_capacity(remaining.len());
            for &v in &remaining {
                if clique.iter().all(|&u| self.graph.has_edge(u, v)) {
                    clique.push(v);
                } else {
                    rest.push(v);
                }
            }
            bound += clique.iter().map(|&v| self.weights[v]).fold(0.0, f64::max);
            out.extend(clique.into_iter().map(|v| (v, bound)));
            remaining = rest;
        }
        out
    }

    fn expand(&mut self, mut cand: BitSet, value: f64) {
        self.nodes += 1;
        if value > self.best_value + WEIGHT_EPS {
            self.best_value = value;
            self.best_set = self.current.clone();
        }
        if cand.is_empty() {
            return;
        }
        let cover = self.cover(&cand);
        // Branch on vertices from the last clique backwards. When vertex
        // `v` is reached, the candidates left are covered by the cliques up
        // to and including `v`'s.
        for &(v, bound) in cover.iter().rev() {
            if value + bound <= self.best_value + WEIGHT_EPS {
                return;
            }
            let mut next = cand.difference(self.graph.neighbors(v));
            next.remove(v);
            self.current.push(v);
            self.expand(next, value + self.weights[v]);
            self.current.pop();
            cand.remove(v);
        }
    }
}

fn solve(graph: &Graph, weights: &[f64], max_vertices: usize) -> Result<IndependenceResult> {
    let n = graph.n();
    if n > max_vertices {
        return Err(Error::CapExceeded {
            what: "independence number vertex count",
            needed: n as u128,
            cap: max_vertices as u128,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));
    let mut search = Search {
        graph,
        weights,
        order,
        best_value: 0.0,
        best_set: Vec::new(),
        current: Vec::new(),
        nodes: 0,
    };
    // Seed with a greedy solution so pruning starts early.
    let mut greedy = Vec::new();
    let mut by_weight: Vec<usize> = (0..n).collect();
    by_weight.sort_by(|&u, &v| {
        weights[v]
            .partial_cmp(&weights[u])
            .unwrap()
            .then(graph.degree(u).cmp(&graph.degree(v)))
            .then(u.cmp(&v))
    });
    for v in by_weight {
        if weights[v] > 0.0 && greedy.iter().all(|&u| !graph.has_edge(u, v)) {
            greedy.push(v);
        }
    }
    search.best_value = greedy.iter().map(|&v| weights[v]).sum();
    search.best_set = greedy;
    search.expand(BitSet::full(n), 0.0);
    let mut witness = search.best_set;
    witness.sort_unstable();
    Ok(IndependenceResult {
        value: witness.iter().map(|&v| weights[v]).sum(),
        witness,
        nodes_explored: search.nodes,
    })
}

/// `α(G)` with a witness, for graphs up to [`DEFAULT_MAX_VERTICES`].
pub fn independence_number(graph: &Graph) -> Result<IndependenceResult> {
    independence_number_capped(graph, DEFAULT_MAX_VERTICES)
}

pub fn independence_number_capped(graph: &Graph, max_vertices: usize) -> Result<IndependenceResult> {
    solve(graph, &vec![1.0; graph.n()], max_vertices)
}

/// Maximum-weight independent set. Weights must be non-negative.
pub fn weighted_independence(graph: &Graph, weights: &[f64]) -> Result<IndependenceResult> {
    weighted_independence_capped(graph, weights, DEFAULT_MAX_VERTICES)
}

pub fn weighted_independence_capped(
    graph: &Graph,
    weights: &[f64],
    max_vertices: usize,
) -> Result<IndependenceResult> {
    if weights.len() != graph.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} vertices",
            weights.len(),
            graph.n()
        )));
    }
    if let Some((vertex, &weight)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
        return Err(Error::NegativeWeight { vertex, weight });
    }
    solve(graph, weights, max_vertices)
}
