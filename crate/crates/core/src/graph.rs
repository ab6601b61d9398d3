//! Simple graphs on bitset rows, and the game graph of a non-local game.
//!
//! The game graph has one vertex per winning quadruple `(x, y, a, b)`; two
//! quadruples are adjacent when they share Alice's input with different
//! answers, or share Bob's input with different answers. A deterministic
//! strategy never picks two adjacent quadruples, which is what ties its
//! independent sets to classical strategies.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, Quad};

/// Fixed-size bitset over vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::new(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// `self ∖ other`.
    pub fn difference(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    /// `self ∩ other`.
    pub fn intersection(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a |= b);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

/// An undirected simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<BitSet>,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph { n, rows: vec![BitSet::new(n); n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        if n >= 3 {
            for u in 0..n {
                g.add_edge(u, (u + 1) % n);
            }
        } else if n == 2 {
            g.add_edge(0, 1);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange { name: "vertex", value: u.max(v), size: n });
            }
            if u == v {
                return Err(Error::DimensionMismatch(format!("self-loop on vertex {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "simple graphs have no self-loops");
        self.rows[u].insert(v);
        self.rows[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u].remove(v);
        self.rows[v].remove(u);
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.rows[u].iter().filter(move |v| *v > u).map(move |v| (u, v)))
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = Graph::empty(self.n + other.n);
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(u + self.n, v + self.n);
        }
        g
    }

    /// Induced subgraph on `keep`, renumbered in increasing order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::empty(keep.len());
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// True when no two vertices of `set` are adjacent and all are in range.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().all(|&u| u < self.n)
            && set
                .iter()
                .enumerate()
                .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    /// DIMACS edge format: `p edge n m` followed by 1-based `e i j` lines.
    pub fn to_dimacs(&self, comment: &str) -> String {
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "c {line}");
        }
        let _ = writeln!(out, "p edge {} {}", self.n, self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        out
    }

    /// Reads the DIMACS edge format written by [`Graph::to_dimacs`].
    pub fn from_dimacs(text: &str) -> Result<Graph> {
        let mut graph: Option<Graph> = None;
        for (lineno, line) in text.lines().enumerate() {
            let err = |message: &str| Error::GraphFormat { line: lineno + 1, message: message.into() };
            let mut parts = line.split_whitespace();
            match parts.next() {
                None | Some("c") => continue,
                Some("p") => {
                    if graph.is_some() {
                        return Err(err("duplicate problem line"));
                    }
                    if parts.next() != Some("edge") {
                        return Err(err("expected `p edge n m`"));
                    }
                    let n: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err("bad vertex count"))?;
                    graph = Some(Graph::empty(n));
                }
                Some("e") => {
                    let g = graph.as_mut().ok_or_else(|| err("edge before problem line"))?;
                    let mut endpoint = || -> Result<usize> {
                        let v: usize = parts
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| err("bad edge endpoint"))?;
                        if v == 0 || v > g.n {
                            return Err(err("edge endpoint out of range"));
                        }
                        Ok(v - 1)
                    };
                    let (u, v) = (endpoint()?, endpoint()?);
                    if u == v {
                        return Err(err("self-loop"));
                    }
                    g.add_edge(u, v);
                }
                Some(_) => return Err(err("unknown line type")),
            }
        }
        graph.ok_or(Error::GraphFormat { line: 0, message: "missing problem line".into() })
    }
}

/// The game graph: winning quadruples joined when their answers are
/// inconsistent.
#[derive(Debug, Clone, PartialEq)]
pub struct GameGraph {
    vertices: Vec<Quad>,
    graph: Graph,
    weights: Option<Vec<f64>>,
    source_k: usize,
}

/// Edge rule between two quadruples.
#[inline]
pub fn quads_conflict(u: &Quad, v: &Quad) -> bool {
    (u.x == v.x && u.a != v.a) || (u.y == v.y && u.b != v.b)
}

fn build_edges(g: &Game, vertices: &[Quad]) -> Graph {
    let n = vertices.len();
    // For each input x (resp. y), the vertices asking x, and those asking
    // x and answering a. A vertex conflicts with everything that asks its
    // x but answers differently, and likewise on Bob's side.
    let mut by_x = vec![BitSet::new(n); g.nx()];
    let mut by_xa = vec![BitSet::new(n); g.nx() * g.na()];
    let mut by_y = vec![BitSet::new(n); g.ny()];
    let mut by_yb = vec![BitSet::new(n); g.ny() * g.nb()];
    for (i, q) in vertices.iter().enumerate() {
        by_x[q.x].insert(i);
        by_xa[q.x * g.na() + q.a].insert(i);
        by_y[q.y].insert(i);
        by_yb[q.y * g.nb() + q.b].insert(i);
    }
    let rows = vertices
        .iter()
        .map(|q| {
            let mut row = by_x[q.x].difference(&by_xa[q.x * g.na() + q.a]);
            row.union_with(&by_y[q.y].difference(&by_yb[q.y * g.nb() + q.b]));
            row
        })
        .collect();
    Graph { n, rows }
}

impl GameGraph {
    /// Game graph of a 0/1 game: vertices are the winning quadruples in
    /// lexicographic order.
    pub fn build(g: &Game) -> Result<GameGraph> {
        if let Some(q) = g.quads().find(|q| {
            let v = g.lambda(q.x, q.y, q.a, q.b);
            v != 0.0 && v != 1.0
        }) {
            return Err(Error::NonBooleanPredicate {
                x: q.x,
                y: q.y,
                a: q.a,
                b: q.b,
                value: g.lambda(q.x, q.y, q.a, q.b),
            });
        }
        let vertices = g.winning_quads();
        let graph = build_edges(g, &vertices);
        Ok(GameGraph { vertices, graph, weights: None, source_k: g.k() })
    }

    /// Weighted game graph: vertices are the quadruples with
    /// `λ(x,y,a,b)·π(x,y) > 0`, weighted by that product.
    pub fn build_weighted(g: &Game) -> GameGraph {
        let mut vertices = Vec::new();
        let mut weights = Vec::new();
        for q in g.quads() {
            let w = g.lambda(q.x, q.y, q.a, q.b) * g.pi(q.x, q.y);
            if w > 0.0 {
                vertices.push(q);
                weights.push(w);
            }
        }
        let graph = build_edges(g, &vertices);
        GameGraph { vertices, graph, weights: Some(weights), source_k: g.k() }
    }

    pub fn vertices(&self) -> &[Quad] {
        &self.vertices
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// `|X × Y|` of the game this graph came from.
    pub fn k(&self) -> usize {
        self.source_k
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Drops the labels and weights.
    pub fn to_plain_graph(&self) -> Graph {
        self.graph.clone()
    }

    /// Index of a quadruple in the vertex list.
    pub fn vertex_index(&self, q: &Quad) -> Option<usize> {
        self.vertices.binary_search(q).ok()
    }

    /// JSON sidecar for the DIMACS export: 1-based vertex index, the
    /// quadruple and its weight.
    pub fn sidecar_json(&self, game_name: &str) -> String {
        #[derive(Serialize, Deserialize)]
        struct Entry {
            index: usize,
            quad: [usize; 4],
            weight: f64,
        }
        #[derive(Serialize, Deserialize)]
        struct Sidecar {
            game: String,
            k: usize,
            encoding: &'static str,
            vertices: Vec<Entry>,
        }
        let uniform = 1.0 / self.source_k as f64;
        let sidecar = Sidecar {
            game: game_name.to_string(),
            k: self.source_k,
            encoding: "row-major mixed radix, first coordinate most significant",
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(i, q)| Entry {
                    index: i + 1,
                    quad: [q.x, q.y, q.a, q.b],
                    weight: self.weights.as_ref().map_or(uniform, |w| w[i]),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&sidecar).expect("sidecar always serializes")
    }
}
