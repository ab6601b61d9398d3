//! Classical game values.
//!
//! [`classical_value`] goes through the game graph: an independent set of
//! winning quadruples never asks a player for two different answers to the
//! same question, so it is a partial deterministic strategy, and the
//! quadruples any deterministic strategy wins form an independent set.
//! Hence the classical value is `α(G)/|X×Y|` for uniform 0/1 games, and the
//! maximum-weight independent set of the weighted graph in general.
//!
//! [`classical_value_brute`] is an independent oracle that enumerates
//! Alice's deterministic strategies and answers each with Bob's exact best
//! response.

use crate::error::{Error, Result};
use crate::game::{ClassicalStrategy, Game};
use crate::graph::GameGraph;
use crate::mis::{independence_number_capped, weighted_independence_capped, DEFAULT_MAX_VERTICES};
use crate::par::Exec;

/// Default cap on the number of Alice strategies the oracle enumerates.
pub const DEFAULT_BRUTE_CAP: u128 = 1 << 24;

/// Optimal classical play.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalOptimum {
    pub value: f64,
    pub strategy: ClassicalStrategy,
    /// For 0/1 games with uniform inputs: the number of input pairs won,
    /// i.e. `α(G)`. Exact integer, no rounding.
    pub winning_pairs: Option<usize>,
    /// Independent-set witness in game-graph vertex indices, when computed
    /// through the graph.
    pub witness: Option<Vec<usize>>,
}

/// Extracts a strategy from an independent set of game-graph vertices:
/// each player answers what the set dictates, lowest vertex index first,
/// and 0 on questions the set does not mention.
pub fn strategy_from_witness(g: &Game, gg: &GameGraph, witness: &[usize]) -> ClassicalStrategy {
    let mut alice: Vec<Option<usize>> = vec![None; g.nx()];
    let mut bob: Vec<Option<usize>> = vec![None; g.ny()];
    let mut sorted = witness.to_vec();
    sorted.sort_unstable();
    for v in sorted {
        let q = gg.vertices()[v];
        alice[q.x].get_or_insert(q.a);
        bob[q.y].get_or_insert(q.b);
    }
    ClassicalStrategy::new(
        alice.into_iter().map(|a| a.unwrap_or(0)).collect(),
        bob.into_iter().map(|b| b.unwrap_or(0)).collect(),
    )
}

/// Classical value through the game graph, with the default vertex cap.
pub fn classical_value(g: &Game) -> Result<ClassicalOptimum> {
    classical_value_capped(g, DEFAULT_MAX_VERTICES)
}

pub fn classical_value_capped(g: &Game, max_vertices: usize) -> Result<ClassicalOptimum> {
    let k = g.k();
    if g.is_boolean() && g.is_uniform() {
        let gg = GameGraph::build(g)?;
        let r = independence_number_capped(gg.graph(), max_vertices)?;
        let strategy = strategy_from_witness(g, &gg, &r.witness);
        Ok(ClassicalOptimum {
            value: r.size() as f64 / k as f64,
            strategy,
            winning_pairs: Some(r.size()),
            witness: Some(r.witness),
        })
    } else {
        let gg = GameGraph::build_weighted(g);
        let w = gg.weights().expect("weighted graph carries weights");
        let r = weighted_independence_capped(gg.graph(), w, max_vertices)?;
        let strategy = strategy_from_witness(g, &gg, &r.witness);
        Ok(ClassicalOptimum { value: r.value, strategy, winning_pairs: None, witness: Some(r.witness) })
    }
}

/// Exhaustive classical value with the default cap.
pub fn classical_value_brute(g: &Game) -> Result<ClassicalOptimum> {
    classical_value_brute_with(g, DEFAULT_BRUTE_CAP, Exec::default())
}

/// Enumerates all `na^nx` deterministic strategies of Alice; for each,
/// Bob's payoff separates over his inputs, so his best response is exact
/// and the maximum equals the maximum over all `na^nx · nb^ny` pairs.
/// Ties resolve to the first strategy in enumeration order.
pub fn classical_value_brute_with(g: &Game, cap: u128, exec: Exec) -> Result<ClassicalOptimum> {
    let (nx, ny, na, nb) = g.sizes();
    let count = (0..nx)
        .try_fold(1u128, |acc, _| acc.checked_mul(na as u128))
        .unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::CapExceeded { what: "Alice strategies", needed: count, cap });
    }
    // For uniform 0/1 games score in whole winning pairs so that ties and
    // the final count are exact.
    let counting = g.is_boolean() && g.is_uniform();
    let weight = |x: usize, y: usize, a: usize, b: usize| {
        if counting {
            g.lambda(x, y, a, b)
        } else {
            g.pi(x, y) * g.lambda(x, y, a, b)
        }
    };
    let count = count as usize;
    let decode = |mut idx: usize| -> Vec<usize> {
        // Alice's answer to x is digit x, most significant first.
        let mut alice = vec![0; nx];
        for x in (0..nx).rev() {
            alice[x] = idx % na;
            idx /= na;
        }
        alice
    };
    let best_response = |alice: &[usize]| -> (f64, Vec<usize>) {
        let mut total = 0.0;
        let mut bob = vec![0; ny];
        for (y, slot) in bob.iter_mut().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for b in 0..nb {
                let s: f64 = (0..nx).map(|x| weight(x, y, alice[x], b)).sum();
                if s > best {
                    best = s;
                    *slot = b;
                }
            }
            total += best;
        }
        (total, bob)
    };
    // Parallel chunks each report their best; chunk order keeps the
    // first-in-enumeration tie rule.
    let chunk = 4096usize;
    let chunks = count.div_ceil(chunk);
    let partial = exec.map_range(chunks, |c| {
        let mut best: Option<(f64, usize)> = None;
        for idx in c * chunk..((c + 1) * chunk).min(count) {
            let (v, _) = best_response(&decode(idx));
            if best.is_none_or(|(bv, _)| v > bv) {
                best = Some((v, idx));
            }
        }
        best.expect("chunks are non-empty")
    });
    let (best_value, best_idx) = partial
        .into_iter()
        .reduce(|acc, cur| if cur.0 > acc.0 { cur } else { acc })
        .expect("at least one strategy");
    let alice = decode(best_idx);
    let (_, bob) = best_response(&alice);
    let strategy = ClassicalStrategy::new(alice, bob);
    if counting {
        let wins = best_value as usize;
        Ok(ClassicalOptimum {
            value: wins as f64 / g.k() as f64,
            strategy,
            winning_pairs: Some(wins),
            witness: None,
        })
    } else {
        Ok(ClassicalOptimum { value: best_value, strategy, winning_pairs: None, witness: None })
    }
}
