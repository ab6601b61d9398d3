//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed. Built with `harness = false`, so
//! `cargo test --test acceptance` shows the lines as they happen.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{alpha_exhaustive, random_psd, random_uniform_game, random_vector, random_weighted_game, rng};
use nlbounds::game::{chsh, independent_set_game, magic_square, parallel_repetition, Game};
use nlbounds::graph::{GameGraph, Graph};
use nlbounds::quantum::{
    chsh_optimal_strategy, check_lemma1, lift_qis_to_strategy, magic_square_strategy, strategy_to_qis,
    verify_quantum_independent_set, winning_probability, QuantumStrategy,
};
use nlbounds::sdp::{lovasz_theta, weighted_theta, xor_tsirelson_value, ThetaResult};
use nlbounds::{classical_value, classical_value_brute, independence_number, weighted_independence};
use rand::Rng;

const SDP_TOL: f64 = 1e-7;
const SANDWICH_SLACK: f64 = 10.0 * SDP_TOL;

const C1_THETA_TOL: f64 = 1e-4;
const C1_RUNTIME: Duration = Duration::from_secs(1);
const C2_GAMES: usize = 100;
const C2_SEED: u64 = 0x5eed_0002;
const C2_RUNTIME: Duration = Duration::from_secs(30);
const C3_GAMES: usize = 50;
const C3_SEED: u64 = 0x5eed_0003;
const C3_TOL: f64 = 1e-10;
const C4_STRICT_GAP: f64 = 1e-3;
const C4_LOWER_SLACK: f64 = 1e-6;
const C4_RUNTIME: Duration = Duration::from_secs(120);
const C5_THETA_SLACK: f64 = 1e-4;
const C5_QIS_TOL: f64 = 1e-9;
const C5_LIFT_TOL: f64 = 1e-8;
const C5_RUNTIME: Duration = Duration::from_secs(120);
const C6_TRIALS: usize = 1000;
const C6_SEED: u64 = 0x5eed_0006;
const C8_TOL: f64 = 1e-5;
const C9_TOL: f64 = 1e-6;
const C9_CONSISTENCY: f64 = 1e-4;
const C10_MAX_VERTICES: usize = 5;

/// A graph some criterion produced, with its exact (weighted) independence
/// number, kept for the sandwich check.
struct SuiteGraph {
    label: String,
    graph: Graph,
    weights: Option<Vec<f64>>,
    alpha: f64,
    theta: Option<ThetaResult>,
}

#[derive(Default)]
struct Suite {
    graphs: Vec<SuiteGraph>,
    failures: Vec<String>,
}

impl Suite {
    fn record(&mut self, label: impl Into<String>, graph: Graph, alpha: f64, theta: Option<ThetaResult>) {
        self.graphs.push(SuiteGraph { label: label.into(), graph, weights: None, alpha, theta });
    }

    fn record_weighted(&mut self, label: impl Into<String>, graph: Graph, weights: Vec<f64>, alpha: f64) {
        self.graphs.push(SuiteGraph { label: label.into(), graph, weights: Some(weights), alpha, theta: None });
    }

    /// Runs one criterion. `Ok` carries the detail for a pass, `Err` the
    /// reason for a failure; panics count as failures.
    fn run(&mut self, id: &str, title: &str, f: impl FnOnce(&mut Suite) -> Result<String, String>) {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| f(self)))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id} {title}: {detail} [{secs:.2}s]"),
            Err(reason) => {
                println!("FAIL {id} {title}: {reason} [{secs:.2}s]");
                self.failures.push(id.to_string());
            }
        }
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_runtime(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn theta_of(g: &Graph) -> Result<ThetaResult, String> {
    let t = lovasz_theta(g, SDP_TOL).map_err(|e| e.to_string())?;
    ensure(t.converged, || format!("solver did not converge (gap {:e})", t.gap))?;
    Ok(t)
}

/// Winning pairs of the best classical strategy by exhaustive search.
fn brute_wins(g: &Game) -> Result<usize, String> {
    classical_value_brute(g).map_err(|e| e.to_string())?.winning_pairs.ok_or_else(|| "not a uniform 0/1 game".into())
}

fn c1(s: &mut Suite) -> Result<String, String> {
    let start = Instant::now();
    let g = chsh();
    let gg = GameGraph::build(&g).map_err(|e| e.to_string())?;
    let alpha = independence_number(gg.graph()).map_err(|e| e.to_string())?.size();
    ensure(alpha == 3, || format!("α = {alpha}, expected 3"))?;
    let c = classical_value(&g).map_err(|e| e.to_string())?;
    // ω = wins/k compared as a fraction: wins·4 == 3·k.
    let wins = c.winning_pairs.ok_or("no exact count")?;
    ensure(wins * 4 == 3 * g.k(), || format!("ω = {wins}/{}, expected 3/4", g.k()))?;
    let theta = theta_of(gg.graph())?;
    let expected = 2.0 + 2f64.sqrt();
    ensure((theta.value - expected).abs() <= C1_THETA_TOL, || format!("ϑ = {}, expected {expected}", theta.value))?;
    let per_k = theta.value / g.k() as f64;
    let omega_star = 0.5 + 0.5 / 2f64.sqrt();
    ensure((per_k - omega_star).abs() <= C1_THETA_TOL, || format!("ϑ/k = {per_k}, expected {omega_star}"))?;
    within_runtime(start, C1_RUNTIME)?;
    s.record("chsh", gg.graph().clone(), alpha as f64, Some(theta.clone()));
    Ok(format!("α = 3, ω = 3/4, ϑ = {:.9}, ϑ/k = {per_k:.9}", theta.value))
}

fn c2(s: &mut Suite) -> Result<String, String> {
    let start = Instant::now();
    let mut r = rng(C2_SEED);
    for i in 0..C2_GAMES {
        let g = random_uniform_game(&mut r, 2, 3);
        let c = classical_value(&g).map_err(|e| e.to_string())?;
        let alpha = c.winning_pairs.ok_or("no exact count")?;
        let brute = brute_wins(&g)?;
        ensure(alpha == brute, || format!("game {i} {:?}: α = {alpha}, brute force {brute}", g.sizes()))?;
        let gg = GameGraph::build(&g).map_err(|e| e.to_string())?;
        s.record(format!("random game {i}"), gg.graph().clone(), alpha as f64, None);
    }
    within_runtime(start, C2_RUNTIME)?;
    Ok(format!("{C2_GAMES} games, α/k equals brute force exactly (seed {C2_SEED:#x})"))
}

fn c3(s: &mut Suite) -> Result<String, String> {
    let mut r = rng(C3_SEED);
    let mut worst: f64 = 0.0;
    for i in 0..C3_GAMES {
        let g = random_weighted_game(&mut r, 2, 3);
        let gg = GameGraph::build_weighted(&g);
        let w = gg.weights().expect("weighted").to_vec();
        let via_graph = weighted_independence(gg.graph(), &w).map_err(|e| e.to_string())?.value;
        let brute = classical_value_brute(&g).map_err(|e| e.to_string())?.value;
        let diff = (via_graph - brute).abs();
        worst = worst.max(diff);
        ensure(diff <= C3_TOL, || format!("game {i}: weighted α = {via_graph}, brute force {brute}"))?;
        s.record_weighted(format!("random weighted game {i}"), gg.graph().clone(), w, via_graph);
    }
    Ok(format!("{C3_GAMES} games, max |difference| = {worst:e} (seed {C3_SEED:#x})"))
}

/// The optimal CHSH strategy played on both coordinates at once.
fn chsh_product_strategy() -> QuantumStrategy {
    let s = chsh_optimal_strategy();
    let family = |side: &[Vec<nlbounds::quantum::CMatrix>]| {
        (0..4)
            .map(|x| (0..4).map(|a| side[x / 2][a / 2].kron(&side[x % 2][a % 2])).collect())
            .collect()
    };
    QuantumStrategy::maximally_entangled(4, family(s.alice()), family(s.bob())).expect("product of valid strategies")
}

fn c4(s: &mut Suite) -> Result<String, String> {
    let start = Instant::now();
    let g = parallel_repetition(&chsh(), 2).map_err(|e| e.to_string())?;
    let gg = GameGraph::build(&g).map_err(|e| e.to_string())?;
    ensure(gg.n() == 64, || format!("|V| = {}, expected 64", gg.n()))?;
    let alpha = independence_number(gg.graph()).map_err(|e| e.to_string())?.size();
    let brute = brute_wins(&g)?;
    ensure(alpha == 10 && brute == 10, || format!("α = {alpha}, brute force {brute}, expected 10"))?;
    let theta = theta_of(gg.graph())?;
    let per_k = theta.value / 16.0;
    let cos4 = (PI / 8.0).cos().powi(4);
    let product = winning_probability(&g, &chsh_product_strategy()).map_err(|e| e.to_string())?;
    ensure((product - cos4).abs() <= 1e-12, || format!("product strategy wins {product}, expected {cos4}"))?;
    ensure(per_k - cos4 > C4_STRICT_GAP, || format!("ϑ/16 - cos⁴(π/8) = {:e}", per_k - cos4))?;
    ensure(per_k >= cos4 - C4_LOWER_SLACK, || format!("ϑ/16 = {per_k} below cos⁴(π/8) = {cos4}"))?;
    within_runtime(start, C4_RUNTIME)?;
    s.record("chsh x2", gg.graph().clone(), alpha as f64, Some(theta.clone()));
    Ok(format!(
        "α = 10, ω = 10/16, ϑ = {:.9}, ϑ/16 = {per_k:.9}, cos⁴(π/8) = {cos4:.9}, gap = {:.3e}",
        theta.value,
        per_k - cos4
    ))
}

fn c5_bounds(s: &mut Suite) -> Result<String, String> {
    let start = Instant::now();
    let g = magic_square();
    let gg = GameGraph::build(&g).map_err(|e| e.to_string())?;
    let alpha = independence_number(gg.graph()).map_err(|e| e.to_string())?.size();
    let brute = brute_wins(&g)?;
    ensure(alpha == 8 && brute == 8, || format!("α = {alpha}, brute force {brute}, expected 8"))?;
    let theta = theta_of(gg.graph())?;
    let per_k = theta.value / 9.0;
    ensure(per_k >= 1.0 - C5_THETA_SLACK, || format!("ϑ/9 = {per_k}"))?;
    let p = winning_probability(&g, &magic_square_strategy()).map_err(|e| e.to_string())?;
    ensure((p - 1.0).abs() <= C5_LIFT_TOL, || format!("reference strategy wins {p}"))?;
    within_runtime(start, C5_RUNTIME)?;
    s.record("magic square", gg.graph().clone(), alpha as f64, Some(theta.clone()));
    Ok(format!("α = 8, ω = 8/9, ϑ/9 = {per_k:.9}, reference strategy wins {p:.12}"))
}

fn c5_qis(_: &mut Suite) -> Result<String, String> {
    let start = Instant::now();
    let g = magic_square();
    let gg = GameGraph::build(&g).map_err(|e| e.to_string())?;
    let qis = strategy_to_qis(&g, &magic_square_strategy(), C5_QIS_TOL).map_err(|e| format!("strategy_to_qis: {e}"))?;
    ensure(qis.t() == 9, || format!("t = {}", qis.t()))?;
    let report = verify_quantum_independent_set(&gg, &qis, C5_QIS_TOL);
    ensure(report.valid, || {
        format!("{} violations, first: {}", report.violations.len(), report.violations[0])
    })?;
    let lifted = lift_qis_to_strategy(&g, &gg, &qis).map_err(|e| e.to_string())?;
    let p = winning_probability(&g, &lifted).map_err(|e| e.to_string())?;
    ensure((p - 1.0).abs() <= C5_LIFT_TOL, || format!("lifted strategy wins {p}"))?;
    within_runtime(start, C5_RUNTIME)?;
    Ok(format!("t = 9, d = {}, lifted strategy wins {p:.12}", qis.d()))
}

fn c6(_: &mut Suite) -> Result<String, String> {
    let mut r = rng(C6_SEED);
    let mut failures = 0;
    for _ in 0..C6_TRIALS {
        let n = r.gen_range(1..=8);
        let (rm, rn) = (r.gen_range(0..=n), r.gen_range(0..=n));
        let m = random_psd(&mut r, n, rm);
        let k = random_psd(&mut r, n, rn);
        let v = random_vector(&mut r, n);
        if !check_lemma1(&m, &k, &v).map_err(|e| e.to_string())? {
            failures += 1;
        }
    }
    ensure(failures == 0, || format!("{failures} of {C6_TRIALS} trials violated the inequality"))?;
    Ok(format!("{C6_TRIALS} trials, 0 failures (seed {C6_SEED:#x})"))
}

fn c7(s: &mut Suite) -> Result<String, String> {
    let mut worst = f64::INFINITY;
    let mut worst_label = String::new();
    let count = s.graphs.len();
    for sg in &mut s.graphs {
        let theta = match sg.theta.take() {
            Some(t) => t,
            None => {
                let t = match &sg.weights {
                    Some(w) => weighted_theta(&sg.graph, w, SDP_TOL),
                    None => lovasz_theta(&sg.graph, SDP_TOL),
                }
                .map_err(|e| format!("{}: {e}", sg.label))?;
                ensure(t.converged, || format!("{}: solver did not converge", sg.label))?;
                t
            }
        };
        let margin = theta.value - sg.alpha;
        if margin < worst {
            worst = margin;
            worst_label = sg.label.clone();
        }
        ensure(sg.alpha <= theta.value + SANDWICH_SLACK, || {
            format!("{}: α = {} > ϑ = {}", sg.label, sg.alpha, theta.value)
        })?;
    }
    Ok(format!("{count} graphs, smallest ϑ - α = {worst:.3e} ({worst_label})"))
}

fn c8(s: &mut Suite) -> Result<String, String> {
    let mut cases: Vec<(String, Graph, f64)> = Vec::new();
    for n in 1..=6 {
        cases.push((format!("K{n}"), Graph::complete(n), 1.0));
        cases.push((format!("edgeless {n}"), Graph::empty(n), n as f64));
    }
    cases.push(("C5".into(), Graph::cycle(5), 5f64.sqrt()));
    let mut worst: f64 = 0.0;
    for (label, g, expected) in cases {
        let t = theta_of(&g).map_err(|e| format!("{label}: {e}"))?;
        ensure((t.value - expected).abs() <= C8_TOL, || format!("{label}: ϑ = {}, expected {expected}", t.value))?;
        ensure(t.gap < C8_TOL, || format!("{label}: gap {:e}", t.gap))?;
        worst = worst.max((t.value - expected).abs());
        let alpha = independence_number(&g).map_err(|e| e.to_string())?.size();
        s.record(label, g, alpha as f64, Some(t));
    }
    Ok(format!("K1..K6, edgeless 1..6, C5; max error {worst:.3e}"))
}

fn c9(_: &mut Suite) -> Result<String, String> {
    let g = chsh();
    let v = xor_tsirelson_value(&g).map_err(|e| e.to_string())?;
    let expected = 0.5 + 0.5 / 2f64.sqrt();
    ensure((v - expected).abs() <= C9_TOL, || format!("value {v}, expected {expected}"))?;
    let gg = GameGraph::build(&g).map_err(|e| e.to_string())?;
    let per_k = theta_of(gg.graph())?.value / g.k() as f64;
    ensure(v <= per_k + C9_CONSISTENCY, || format!("{v} exceeds ϑ/k = {per_k}"))?;
    Ok(format!("value = {v:.9}, ϑ/k = {per_k:.9}"))
}

/// Smallest edge mask over all relabelings.
fn canonical_mask(n: usize, edges: &[(usize, usize)], mask: u32) -> u32 {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    let index = |u: usize, v: usize| edges.iter().position(|&e| e == (u.min(v), u.max(v))).expect("pair");
    permutations(n)
        .iter()
        .map(|p| {
            edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u32, |acc, (_, &(u, v))| acc | 1 << index(p[u], p[v]))
        })
        .min()
        .expect("at least one permutation")
}

fn c10(s: &mut Suite) -> Result<String, String> {
    let mut graphs = 0;
    let mut games = 0;
    for n in 1..=C10_MAX_VERTICES {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut seen = BTreeSet::new();
        for mask in 0u32..1 << pairs.len() {
            if !seen.insert(canonical_mask(n, &pairs, mask)) {
                continue;
            }
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let g = Graph::from_edges(n, &edges).map_err(|e| e.to_string())?;
            let alpha = alpha_exhaustive(&g);
            let bb = independence_number(&g).map_err(|e| e.to_string())?.size();
            ensure(alpha == bb, || format!("{edges:?}: exhaustive α = {alpha}, branch and bound {bb}"))?;
            for t in 1..=alpha + 1 {
                let game = independent_set_game(&g, t).map_err(|e| e.to_string())?;
                let wins = brute_wins(&game)?;
                let perfect = wins == game.k();
                ensure(perfect == (t <= alpha), || {
                    format!("n = {n}, edges {edges:?}, t = {t}: {wins}/{} pairs won, α = {alpha}", game.k())
                })?;
                games += 1;
            }
            s.record(format!("{n}-vertex graph {edges:?}"), g, alpha as f64, None);
            graphs += 1;
        }
    }
    Ok(format!("{graphs} graphs up to isomorphism, {games} games"))
}

fn main() {
    let start = Instant::now();
    let mut suite = Suite::default();
    suite.run("C1", "CHSH exact chain", c1);
    suite.run("C2", "classical value equals α/k on random games", c2);
    suite.run("C3", "weighted classical value on random distributions", c3);
    suite.run("C4", "2-fold CHSH is not theta-tight", c4);
    suite.run("C5a", "magic square bounds", c5_bounds);
    suite.run("C5b", "magic square strategy to size-9 QIS and back", c5_qis);
    suite.run("C6", "support monotonicity fuzz", c6);
    suite.run("C8", "theta calibration", c8);
    suite.run("C9", "XOR entangled value of CHSH", c9);
    suite.run("C10", "independent-set games on all graphs up to 5 vertices", c10);
    // Last, so it sees every graph the others built.
    suite.run("C7", "α ≤ ϑ on every graph above", c7);
    let secs = start.elapsed().as_secs_f64();
    if suite.failures.is_empty() {
        println!("acceptance: all criteria passed [{secs:.1}s]");
    } else {
        println!("acceptance: {} failed: {} [{secs:.1}s]", suite.failures.len(), suite.failures.join(", "));
        std::process::exit(1);
    }
}
