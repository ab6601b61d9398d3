//! Random instances shared by the integration tests. Everything is driven
//! by an explicit seed so failures replay.

#![allow(dead_code)]

use nlbounds::game::Game;
use nlbounds::graph::Graph;
use nlbounds::linalg::{Matrix, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random 0/1 predicate with uniform inputs; each side of the four sizes
/// drawn from `lo..=hi`.
pub fn random_uniform_game(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Game {
    let sizes = (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi), rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
    let k = sizes.0 * sizes.1;
    Game::from_fn("random", sizes, vec![1.0 / k as f64; k], |_, _, _, _| rng.gen_bool(0.5)).unwrap()
}

/// Random 0/1 predicate with a random rational input distribution
/// (integer weights 0..=9, renormalized, never all zero).
pub fn random_weighted_game(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Game {
    let sizes = (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi), rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
    let k = sizes.0 * sizes.1;
    let mut ints: Vec<u32> = (0..k).map(|_| rng.gen_range(0..=9)).collect();
    if ints.iter().all(|&w| w == 0) {
        ints[0] = 1;
    }
    let total: u32 = ints.iter().sum();
    let pi = ints.iter().map(|&w| w as f64 / total as f64).collect();
    Game::from_fn("random-weighted", sizes, pi, |_, _, _, _| rng.gen_bool(0.5)).unwrap()
}

/// Erdős–Rényi graph.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// `AᵀA` for a random `r×n` matrix `A`; rank at most `r`.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, r: usize) -> SymMatrix {
    let a = Matrix::from_fn(r, n, |_, _| rng.gen_range(-1.0..1.0));
    SymMatrix::symmetrize(a.transpose().matmul(&a))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Exact α by subset enumeration; only for tiny graphs.
pub fn alpha_exhaustive(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 20);
    (0u32..1 << n)
        .filter(|mask| {
            (0..n).all(|u| mask >> u & 1 == 0 || (u + 1..n).all(|v| mask >> v & 1 == 0 || !g.has_edge(u, v)))
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}
