//! Canonical games and game transformations.

use super::{uniform_distribution, Game};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default cap on the predicate-table size produced by
/// [`parallel_repetition`].
pub const DEFAULT_REPETITION_CAP: u128 = 1 << 24;

/// CHSH: binary inputs and outputs, win iff `a ⊕ b = x ∧ y`.
pub fn chsh() -> Game {
    Game::from_fn("chsh", (2, 2, 2, 2), uniform_distribution(4), |x, y, a, b| {
        (a ^ b) == (x & y)
    })
    .expect("chsh tables are well formed")
}

/// The game that is won by every answer pair.
pub fn all_ones(nx: usize, ny: usize, na: usize, nb: usize) -> Game {
    Game::from_fn(
        "all-ones",
        (nx, ny, na, nb),
        uniform_distribution(nx * ny),
        |_, _, _, _| true,
    )
    .expect("sizes are positive")
}

/// Row bits `(r0, r1, r2)` for Alice's answer index: the index holds
/// `r0 r1` in binary and `r2` completes even parity.
pub fn magic_square_row_bits(a: usize) -> [usize; 3] {
    let (r0, r1) = ((a >> 1) & 1, a & 1);
    [r0, r1, r0 ^ r1]
}

/// Column bits for Bob's answer index: `c2` completes odd parity.
pub fn magic_square_column_bits(b: usize) -> [usize; 3] {
    let (c0, c1) = ((b >> 1) & 1, b & 1);
    [c0, c1, 1 ^ c0 ^ c1]
}

/// The Mermin–Peres magic square game. Alice fills row `x` with even
/// parity, Bob fills column `y` with odd parity, and they win iff they
/// agree on the shared cell.
pub fn magic_square() -> Game {
    Game::from_fn("magic-square", (3, 3, 4, 4), uniform_distribution(9), |x, y, a, b| {
        magic_square_row_bits(a)[y] == magic_square_column_bits(b)[x]
    })
    .expect("magic square tables are well formed")
}

/// The XOR game for `f`: binary outputs, win iff `a ⊕ b = f(x, y)`.
/// `distribution` defaults to uniform.
pub fn xor_game(f: &[Vec<u8>], distribution: Option<Vec<f64>>) -> Result<Game> {
    let nx = f.len();
    let ny = f.first().map_or(0, Vec::len);
    if nx == 0 || ny == 0 {
        return Err(Error::invalid("f", "table is empty"));
    }
    if let Some(row) = f.iter().position(|r| r.len() != ny) {
        return Err(Error::invalid("f", format!("row {row} has the wrong length")));
    }
    if f.iter().flatten().any(|v| *v > 1) {
        return Err(Error::invalid("f", "entries must be 0 or 1"));
    }
    let distribution = distribution.unwrap_or_else(|| uniform_distribution(nx * ny));
    Game::from_fn("xor", (nx, ny, 2, 2), distribution, |x, y, a, b| {
        (a ^ b) as u8 == f[x][y]
    })
}

/// Product of two games: inputs and outputs are pairs encoded
/// `first * size_second + second`, the predicate is the product of the
/// coordinate predicates, and the distribution the product distribution.
pub fn game_product(g: &Game, h: &Game) -> Result<Game> {
    let (nx, ny, na, nb) = (g.nx * h.nx, g.ny * h.ny, g.na * h.na, g.nb * h.nb);
    let mut predicate = Vec::with_capacity(nx * ny * na * nb);
    for x in 0..nx {
        let (x1, x2) = (x / h.nx, x % h.nx);
        for y in 0..ny {
            let (y1, y2) = (y / h.ny, y % h.ny);
            for a in 0..na {
                let (a1, a2) = (a / h.na, a % h.na);
                for b in 0..nb {
                    let (b1, b2) = (b / h.nb, b % h.nb);
                    predicate.push(g.lambda(x1, y1, a1, b1) * h.lambda(x2, y2, a2, b2));
                }
            }
        }
    }
    let mut distribution = Vec::with_capacity(nx * ny);
    for x in 0..nx {
        for y in 0..ny {
            distribution.push(g.pi(x / h.nx, y / h.ny) * h.pi(x % h.nx, y % h.ny));
        }
    }
    let sum: f64 = distribution.iter().sum();
    if (sum - 1.0).abs() > super::NORMALIZATION_TOL {
        distribution.iter_mut().for_each(|p| *p /= sum);
    }
    Game::new(format!("{}*{}", g.name, h.name), (nx, ny, na, nb), predicate, distribution)
}

/// The `n`-fold parallel repetition of `g`, with the default size cap.
pub fn parallel_repetition(g: &Game, n: usize) -> Result<Game> {
    parallel_repetition_capped(g, n, DEFAULT_REPETITION_CAP)
}

/// The `n`-fold parallel repetition of `g`. Coordinates are encoded
/// row-major, the first round most significant.
pub fn parallel_repetition_capped(g: &Game, n: usize, cap: u128) -> Result<Game> {
    if n == 0 {
        return Err(Error::invalid("n", "repetition count must be at least 1"));
    }
    let cells = (g.nx * g.ny * g.na * g.nb) as u128;
    let needed = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(cells)).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::CapExceeded { what: "repeated predicate table", needed, cap });
    }
    let mut out = g.clone();
    for _ in 1..n {
        out = game_product(&out, g)?;
    }
    let name = if n == 1 { g.name.clone() } else { format!("{}^{}", g.name, n) };
    Ok(out.with_name(name))
}

/// The independent-set game with parameter `t` on `graph`: inputs `[t]`,
/// outputs the vertex set, uniform inputs. The players lose when equal
/// inputs get different vertices, or distinct inputs get equal or
/// adjacent vertices.
pub fn independent_set_game(graph: &Graph, t: usize) -> Result<Game> {
    if t == 0 {
        return Err(Error::invalid("t", "must be at least 1"));
    }
    let n = graph.n();
    if n == 0 {
        return Err(Error::invalid("graph", "must have at least one vertex"));
    }
    Game::from_fn(
        format!("isg-t{t}"),
        (t, t, n, n),
        uniform_distribution(t * t),
        |x, y, v, w| {
            if x == y {
                v == w
            } else {
                v != w && !graph.has_edge(v, w)
            }
        },
    )
}

/// Names accepted by [`catalog_game`].
pub fn catalog_names() -> &'static [&'static str] {
    &["chsh", "magic-square", "isg-c5-t2", "isg-c5-t3", "xor-zero", "all-ones"]
}

/// Looks up a named game from the built-in catalog.
pub fn catalog_game(name: &str) -> Result<Game> {
    Ok(match name {
        "chsh" => chsh(),
        "magic-square" => magic_square(),
        "isg-c5-t2" => independent_set_game(&Graph::cycle(5), 2)?.with_name("isg-c5-t2"),
        "isg-c5-t3" => independent_set_game(&Graph::cycle(5), 3)?.with_name("isg-c5-t3"),
        "xor-zero" => xor_game(&[vec![0, 0], vec![0, 0]], None)?.with_name("xor-zero"),
        "all-ones" => all_ones(2, 2, 2, 2),
        _ => return Err(Error::UnknownCatalogEntry(name.to_string())),
    })
}
