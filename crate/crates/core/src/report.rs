//! The analysis pipeline and its text and JSON reports.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde_json::{json, Map, Value};

use crate::classical::classical_value_capped;
use crate::error::Result;
use crate::game::Game;
use crate::graph::GameGraph;
use crate::mis::DEFAULT_MAX_VERTICES;
use crate::sdp::{lovasz_theta, weighted_theta, xor_tsirelson, ThetaResult, DEFAULT_TOL};

/// Settings for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub tol: f64,
    /// Use the weighted graph even for uniform 0/1 games.
    pub force_weighted: bool,
    pub max_vertices: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { tol: DEFAULT_TOL, force_weighted: false, max_vertices: DEFAULT_MAX_VERTICES }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timings {
    pub graph: Duration,
    pub classical: Duration,
    pub theta: Duration,
    pub xor: Duration,
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub game: String,
    pub sizes: (usize, usize, usize, usize),
    pub k: usize,
    pub weighted: bool,
    pub tol: f64,
    pub vertices: usize,
    pub edges: usize,
    /// Independence number, for the unweighted pipeline.
    pub alpha: Option<usize>,
    /// `α` or the maximum independent weight.
    pub independent_value: f64,
    /// Witness as `(x, y, a, b)` quadruples.
    pub witness: Vec<[usize; 4]>,
    pub classical_strategy: (Vec<usize>, Vec<usize>),
    pub omega_classical: f64,
    pub theta: ThetaResult,
    /// `ϑ/k` (weighted theta as is), from the feasible primal value. Absent
    /// when the solver did not converge.
    pub theta_over_k: Option<f64>,
    /// Certified upper bound on the entangled value, from the dual.
    pub quantum_upper_bound: f64,
    pub xor_value: Option<f64>,
    /// `ϑ/k` exceeds `ω` by more than `10·tol`, using the primal value,
    /// which never overestimates `ϑ`.
    pub bell_gap_certificate: bool,
    /// `ω` above the certified upper bound by more than `10·tol`, which
    /// can only mean a solver failure.
    pub solver_failure: bool,
    pub timings: Timings,
}

impl AnalysisReport {
    pub fn converged(&self) -> bool {
        self.theta.converged
    }

    /// `(ϑ/k) / ω`, the certified surrogate for the quantum advantage ratio.
    pub fn bound_ratio(&self) -> Option<f64> {
        match self.theta_over_k {
            Some(t) if self.omega_classical > 0.0 => Some(t / self.omega_classical),
            _ => None,
        }
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, Duration)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed()))
}

/// Game graph, exact classical value, theta, and for XOR games the
/// entangled value.
pub fn analyze(g: &Game, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let weighted = opts.force_weighted || !(g.is_boolean() && g.is_uniform());
    let (gg, t_graph) =
        timed(|| if weighted { Ok(GameGraph::build_weighted(g)) } else { GameGraph::build(g) })?;
    let (classical, t_classical) = timed(|| {
        if weighted {
            let w = gg.weights().expect("weighted graph");
            let r = crate::mis::weighted_independence_capped(gg.graph(), w, opts.max_vertices)?;
            let strategy = crate::classical::strategy_from_witness(g, &gg, &r.witness);
            Ok((None, r.value, r.witness, strategy))
        } else {
            let c = classical_value_capped(g, opts.max_vertices)?;
            let witness = c.witness.expect("graph pipeline has a witness");
            Ok((c.winning_pairs, c.winning_pairs.unwrap_or(0) as f64, witness, c.strategy))
        }
    })?;
    let (alpha, independent_value, witness, strategy) = classical;
    let k = g.k();
    let omega = if weighted { independent_value } else { independent_value / k as f64 };
    let (theta, t_theta) = timed(|| {
        if weighted {
            weighted_theta(gg.graph(), gg.weights().expect("weighted graph"), opts.tol)
        } else {
            lovasz_theta(gg.graph(), opts.tol)
        }
    })?;
    let scale = if weighted { 1.0 } else { k as f64 };
    let theta_over_k = theta.converged.then(|| theta.value / scale);
    let quantum_upper_bound = theta.dual_bound / scale;
    let (xor_value, t_xor) = timed(|| Ok(xor_tsirelson(g, opts.tol).ok().map(|r| r.value)))?;
    let margin = 10.0 * opts.tol;
    let report = AnalysisReport {
        game: g.name().to_string(),
        sizes: g.sizes(),
        k,
        weighted,
        tol: opts.tol,
        vertices: gg.n(),
        edges: gg.graph().edge_count(),
        alpha,
        independent_value,
        witness: witness
            .iter()
            .map(|&v| {
                let q = gg.vertices()[v];
                [q.x, q.y, q.a, q.b]
            })
            .collect(),
        classical_strategy: (strategy.alice, strategy.bob),
        omega_classical: omega,
        bell_gap_certificate: theta_over_k.is_some_and(|t| t > omega + margin),
        solver_failure: omega > quantum_upper_bound + margin,
        theta,
        theta_over_k,
        quantum_upper_bound,
        xor_value,
        timings: Timings { graph: t_graph, classical: t_classical, theta: t_theta, xor: t_xor },
    };
    Ok(report)
}

/// Human-readable report. Timings only when asked, so that the default
/// output is reproducible byte for byte.
pub fn render_text(r: &AnalysisReport, timings: bool) -> String {
    let mut s = String::new();
    let (nx, ny, na, nb) = r.sizes;
    let f = |v: f64| format!("{v:.10}");
    let _ = writeln!(s, "game              {}", r.game);
    let _ = writeln!(s, "sizes             |X|={nx} |Y|={ny} |A|={na} |B|={nb}  k={}", r.k);
    let _ = writeln!(s, "pipeline          {}", if r.weighted { "weighted" } else { "uniform 0/1" });
    let _ = writeln!(s, "game graph        {} vertices, {} edges", r.vertices, r.edges);
    match r.alpha {
        Some(a) => {
            let _ = writeln!(s, "alpha             {a}");
        }
        None => {
            let _ = writeln!(s, "max weight        {}", f(r.independent_value));
        }
    }
    let quads: Vec<String> = r.witness.iter().map(|q| format!("({},{},{},{})", q[0], q[1], q[2], q[3])).collect();
    let _ = writeln!(s, "witness           {}", quads.join(" "));
    let _ = writeln!(s, "strategy          alice={:?} bob={:?}", r.classical_strategy.0, r.classical_strategy.1);
    let _ = writeln!(s, "omega_classical   {}", f(r.omega_classical));
    let t = &r.theta;
    let _ = writeln!(
        s,
        "theta             {} (dual {}, gap {:.3e}, {} iterations, {})",
        f(t.value),
        f(t.dual_bound),
        t.gap,
        t.iterations,
        if t.converged { "converged" } else { "NOT converged" }
    );
    match r.theta_over_k {
        Some(v) => {
            let _ = writeln!(s, "theta_over_k      {}", f(v));
        }
        None => {
            let _ = writeln!(s, "theta_over_k      unavailable (solver did not converge)");
        }
    }
    let _ = writeln!(s, "quantum_upper     {}", f(r.quantum_upper_bound));
    if let Some(x) = r.xor_value {
        let _ = writeln!(s, "xor_value         {}", f(x));
    }
    if let Some(ratio) = r.bound_ratio() {
        let _ = writeln!(s, "bound_ratio       {}", f(ratio));
    }
    let _ = writeln!(s, "bell_gap          {}", if r.bell_gap_certificate { "yes" } else { "no" });
    if r.solver_failure {
        let _ = writeln!(s, "solver_failure    classical value exceeds the certified upper bound");
    }
    if timings {
        let ms = |d: Duration| d.as_secs_f64() * 1e3;
        let tm = &r.timings;
        let _ = writeln!(
            s,
            "timings_ms        graph={:.3} classical={:.3} theta={:.3} xor={:.3}",
            ms(tm.graph),
            ms(tm.classical),
            ms(tm.theta),
            ms(tm.xor)
        );
    }
    s
}

/// JSON value of a report; see `schemas/report.schema.json`.
pub fn report_json(r: &AnalysisReport, timings: bool) -> Value {
    let (nx, ny, na, nb) = r.sizes;
    let mut obj = Map::new();
    obj.insert("game".into(), json!(r.game));
    obj.insert("sizes".into(), json!({"nx": nx, "ny": ny, "na": na, "nb": nb}));
    obj.insert("k".into(), json!(r.k));
    obj.insert("index_encoding".into(), json!("row-major mixed radix, first coordinate most significant"));
    obj.insert("pipeline".into(), json!(if r.weighted { "weighted" } else { "uniform" }));
    obj.insert("tol".into(), json!(r.tol));
    obj.insert("graph".into(), json!({"vertices": r.vertices, "edges": r.edges}));
    obj.insert("alpha".into(), json!(r.alpha));
    obj.insert("independent_value".into(), json!(r.independent_value));
    obj.insert("witness".into(), json!(r.witness));
    obj.insert(
        "classical_strategy".into(),
        json!({"alice": r.classical_strategy.0, "bob": r.classical_strategy.1}),
    );
    obj.insert("omega_classical".into(), json!(r.omega_classical));
    let t = &r.theta;
    obj.insert(
        "theta".into(),
        json!({
            "value": t.value,
            "dual_bound": t.dual_bound,
            "gap": t.gap,
            "iterations": t.iterations,
            "converged": t.converged,
        }),
    );
    obj.insert("theta_over_k".into(), json!(r.theta_over_k));
    obj.insert("quantum_upper_bound".into(), json!(r.quantum_upper_bound));
    obj.insert("xor_value".into(), json!(r.xor_value));
    obj.insert("bound_ratio".into(), json!(r.bound_ratio()));
    obj.insert("bell_gap_certificate".into(), json!(r.bell_gap_certificate));
    obj.insert("solver_failure".into(), json!(r.solver_failure));
    if timings {
        let ms = |d: Duration| d.as_secs_f64() * 1e3;
        let tm = &r.timings;
        obj.insert(
            "timings_ms".into(),
            json!({"graph": ms(tm.graph), "classical": ms(tm.classical), "theta": ms(tm.theta), "xor": ms(tm.xor)}),
        );
    }
    Value::Object(obj)
}

/// Serializes JSON with every float written to 17 significant digits.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', 2 * n));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("f64 number");
                let _ = write!(out, "{x:.16e}");
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) => {
            if items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}
