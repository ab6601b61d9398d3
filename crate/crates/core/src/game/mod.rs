//! Two-player one-round games.
//!
//! A [`Game`] holds dense row-major tables: the predicate is indexed
//! `(x, y, a, b)` and the input distribution `(x, y)`. Multi-coordinate
//! inputs and outputs (see [`parallel_repetition`]) use row-major
//! mixed-radix encoding, most significant coordinate first.

mod catalog;
mod io;

pub use catalog::{
    all_ones, catalog_game, catalog_names, chsh, independent_set_game, magic_square,
    game_product, magic_square_column_bits, magic_square_row_bits, parallel_repetition_capped,
    parallel_repetition, xor_game, DEFAULT_REPETITION_CAP,
};
pub use io::{parse_game, serialize_game};

use crate::error::{Error, Result};

/// Tolerance on the total mass of the input distribution.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A quadruple `(x, y, a, b)`: inputs and outputs of one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quad {
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
}

impl Quad {
    pub fn new(x: usize, y: usize, a: usize, b: usize) -> Self {
        Quad { x, y, a, b }
    }
}

/// A non-local game with input sets `X`, `Y`, output sets `A`, `B`,
/// predicate `λ` and input distribution `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    name: String,
    nx: usize,
    ny: usize,
    na: usize,
    nb: usize,
    predicate: Vec<f64>,
    distribution: Vec<f64>,
}

impl Game {
    /// Builds a game, checking every table invariant.
    pub fn new(
        name: impl Into<String>,
        (nx, ny, na, nb): (usize, usize, usize, usize),
        predicate: Vec<f64>,
        distribution: Vec<f64>,
    ) -> Result<Self> {
        for (field, v) in [("nx", nx), ("ny", ny), ("na", na), ("nb", nb)] {
            if v == 0 {
                return Err(Error::invalid(field, "must be positive"));
            }
        }
        let cells = nx
            .checked_mul(ny)
            .and_then(|v| v.checked_mul(na))
            .and_then(|v| v.checked_mul(nb))
            .ok_or_else(|| Error::invalid("predicate", "table size overflows"))?;
        if predicate.len() != cells {
            return Err(Error::invalid(
                "predicate",
                format!("expected {cells} entries, got {}", predicate.len()),
            ));
        }
        if distribution.len() != nx * ny {
            return Err(Error::invalid(
                "distribution",
                format!("expected {} entries, got {}", nx * ny, distribution.len()),
            ));
        }
        if let Some((i, v)) = predicate
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::invalid(
                "predicate",
                format!("entry {i} = {v} is outside [0, 1]"),
            ));
        }
        if let Some((i, v)) = distribution
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::invalid(
                "distribution",
                format!("entry {i} = {v} is negative or not finite"),
            ));
        }
        let sum: f64 = distribution.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::DistributionNotNormalized { sum });
        }
        Ok(Game {
            name: name.into(),
            nx,
            ny,
            na,
            nb,
            predicate,
            distribution,
        })
    }

    /// Builds a game with the uniform input distribution.
    pub fn with_uniform(
        name: impl Into<String>,
        sizes: (usize, usize, usize, usize),
        predicate: Vec<f64>,
    ) -> Result<Self> {
        let k = sizes.0 * sizes.1;
        Self::new(name, sizes, predicate, uniform_distribution(k))
    }

    /// Builds a 0/1 game from a closure deciding each quadruple.
    pub fn from_fn(
        name: impl Into<String>,
        sizes: (usize, usize, usize, usize),
        distribution: Vec<f64>,
        mut wins: impl FnMut(usize, usize, usize, usize) -> bool,
    ) -> Result<Self> {
        let (nx, ny, na, nb) = sizes;
        let mut table = Vec::with_capacity(nx * ny * na * nb);
        for x in 0..nx {
            for y in 0..ny {
                for a in 0..na {
                    for b in 0..nb {
                        table.push(if wins(x, y, a, b) { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        Self::new(name, sizes, table, distribution)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn na(&self) -> usize {
        self.na
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn sizes(&self) -> (usize, usize, usize, usize) {
        (self.nx, self.ny, self.na, self.nb)
    }

    /// Number of question pairs, `|X × Y|`.
    pub fn k(&self) -> usize {
        self.nx * self.ny
    }

    pub fn predicate_table(&self) -> &[f64] {
        &self.predicate
    }

    pub fn distribution_table(&self) -> &[f64] {
        &self.distribution
    }

    #[inline]
    pub(crate) fn idx(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.ny + y) * self.na + a) * self.nb + b
    }

    /// The predicate `λ(x, y, a, b)`, without bounds checking beyond the
    /// slice's own.
    #[inline]
    pub fn lambda(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.predicate[self.idx(x, y, a, b)]
    }

    #[inline]
    pub fn pi(&self, x: usize, y: usize) -> f64 {
        self.distribution[x * self.ny + y]
    }

    /// The predicate at one quadruple, with range checks.
    pub fn eval_predicate(&self, x: usize, y: usize, a: usize, b: usize) -> Result<f64> {
        for (name, value, size) in [
            ("x", x, self.nx),
            ("y", y, self.ny),
            ("a", a, self.na),
            ("b", b, self.nb),
        ] {
            if value >= size {
                return Err(Error::IndexOutOfRange { name, value, size });
            }
        }
        Ok(self.lambda(x, y, a, b))
    }

    /// True when every predicate entry is exactly 0 or 1.
    pub fn is_boolean(&self) -> bool {
        self.predicate.iter().all(|v| *v == 0.0 || *v == 1.0)
    }

    /// True when all input pairs carry bit-identical probability.
    pub fn is_uniform(&self) -> bool {
        self.distribution.iter().all(|p| *p == self.distribution[0])
    }

    /// Every quadruple with `λ = 1`, in lexicographic order.
    pub fn winning_quads(&self) -> Vec<Quad> {
        self.quads().filter(|q| self.lambda(q.x, q.y, q.a, q.b) == 1.0).collect()
    }

    /// All quadruples in lexicographic `(x, y, a, b)` order.
    pub fn quads(&self) -> impl Iterator<Item = Quad> + '_ {
        let (nx, ny, na, nb) = self.sizes();
        (0..nx).flat_map(move |x| {
            (0..ny).flat_map(move |y| {
                (0..na).flat_map(move |a| (0..nb).map(move |b| Quad::new(x, y, a, b)))
            })
        })
    }

    /// `Σ π(x,y) λ(x,y,f_A(x),f_B(y))`.
    pub fn classical_winning_probability(&self, s: &ClassicalStrategy) -> Result<f64> {
        s.check(self)?;
        let mut total = 0.0;
        for x in 0..self.nx {
            for y in 0..self.ny {
                total += self.pi(x, y) * self.lambda(x, y, s.alice[x], s.bob[y]);
            }
        }
        Ok(total)
    }

    /// Number of input pairs a deterministic strategy wins, for 0/1 games.
    pub fn classical_wins(&self, s: &ClassicalStrategy) -> Result<usize> {
        s.check(self)?;
        let mut wins = 0;
        for x in 0..self.nx {
            for y in 0..self.ny {
                if self.lambda(x, y, s.alice[x], s.bob[y]) == 1.0 {
                    wins += 1;
                }
            }
        }
        Ok(wins)
    }
}

pub(crate) fn uniform_distribution(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

/// A deterministic strategy: Alice's map `X → A` and Bob's map `Y → B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl ClassicalStrategy {
    pub fn new(alice: Vec<usize>, bob: Vec<usize>) -> Self {
        ClassicalStrategy { alice, bob }
    }

    pub fn check(&self, g: &Game) -> Result<()> {
        if self.alice.len() != g.nx() || self.bob.len() != g.ny() {
            return Err(Error::DimensionMismatch(format!(
                "strategy has {}+{} inputs, game has {}+{}",
                self.alice.len(),
                self.bob.len(),
                g.nx(),
                g.ny()
            )));
        }
        if let Some(&a) = self.alice.iter().find(|a| **a >= g.na()) {
            return Err(Error::IndexOutOfRange { name: "a", value: a, size: g.na() });
        }
        if let Some(&b) = self.bob.iter().find(|b| **b >= g.nb()) {
            return Err(Error::IndexOutOfRange { name: "b", value: b, size: g.nb() });
        }
        Ok(())
    }
}
