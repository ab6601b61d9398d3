use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlbounds::game::{catalog_game, catalog_names, parallel_repetition, parse_game, serialize_game};
use nlbounds::quantum::{
    chsh_optimal_strategy, lift_qis_to_strategy, magic_square_strategy, parse_qis, parse_strategy, serialize_qis,
    serialize_strategy, strategy_to_qis, verify_quantum_independent_set, winning_probability, QuantumStrategy,
    DEFAULT_QIS_TOL,
};
use nlbounds::report::{analyze, render_text, report_json, to_json_string, AnalysisReport, AnalyzeOptions};
use nlbounds::{Error, Game, GameGraph};
use serde_json::Value;

const EXIT_ERROR: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_INVALID: u8 = 3;

// Stdout writes that tolerate a closed pipe (`nlbounds ... | head`).
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "nlbounds", version, about = "Classical and entangled value bounds for non-local games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Game graph, exact classical value, Lovász theta bound and, for XOR
    /// games, the entangled value.
    Analyze {
        /// Game files or catalog names; several run in parallel.
        #[arg(required = true)]
        sources: Vec<String>,
        #[arg(long, default_value_t = 1e-7, value_parser = positive)]
        tol: f64,
        #[arg(long)]
        json: bool,
        /// Analyze the n-fold parallel repetition.
        #[arg(long, default_value_t = 1)]
        rep: usize,
        /// Use the weighted pipeline even for uniform 0/1 games.
        #[arg(long)]
        weighted: bool,
        #[arg(long, default_value_t = 512)]
        max_verts: usize,
        /// Reserved; every algorithm is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the game graph in DIMACS form, plus a `.json` sidecar.
        #[arg(long, value_name = "PATH")]
        export_graph: Option<PathBuf>,
        /// Include per-stage timings (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Check a quantum independent set against a game graph.
    VerifyQis {
        game: String,
        qis: PathBuf,
        #[arg(long, default_value_t = DEFAULT_QIS_TOL, value_parser = positive)]
        tol: f64,
    },
    /// Turn a quantum independent set into an entangled strategy.
    Lift {
        game: String,
        qis: PathBuf,
        /// Where to write the strategy JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn a perfect commuting strategy into a quantum independent set.
    ToQis {
        game: String,
        /// Strategy file, or a built-in name (chsh-optimal, magic-square).
        strategy: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9, value_parser = positive)]
        tol: f64,
    },
    /// Built-in games and strategies.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List game names.
    List,
    /// Print a game as JSON.
    Emit { name: String },
    /// Print a built-in strategy as JSON.
    Strategy { name: String },
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_ERROR, message: e.to_string() }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err("must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn load_game(source: &str) -> Result<Game, Failure> {
    let path = Path::new(source);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| fail(EXIT_ERROR, format!("{source}: {e}")))?;
        parse_game(&text).map_err(|e| fail(EXIT_ERROR, format!("{source}: {e}")))
    } else {
        catalog_game(source).map_err(|_| fail(EXIT_ERROR, format!("{source}: no such file or catalog game")))
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", p.display()))),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn builtin_strategy(name: &str) -> Option<QuantumStrategy> {
    match name {
        "chsh-optimal" => Some(chsh_optimal_strategy()),
        "magic-square" => Some(magic_square_strategy()),
        _ => None,
    }
}

/// Runs `f` over the inputs on the rayon pool when available.
fn fan_out<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    sources: &[String],
    tol: f64,
    json: bool,
    rep: usize,
    weighted: bool,
    max_verts: usize,
    export_graph: Option<&Path>,
    timings: bool,
) -> Result<u8, Failure> {
    if export_graph.is_some() && sources.len() != 1 {
        return Err(fail(EXIT_ERROR, "--export-graph needs exactly one game"));
    }
    let opts = AnalyzeOptions { tol, force_weighted: weighted, max_vertices: max_verts };
    let games = sources
        .iter()
        .map(|s| {
            let g = load_game(s)?;
            Ok(if rep == 1 { g } else { parallel_repetition(&g, rep)? })
        })
        .collect::<Result<Vec<Game>, Failure>>()?;
    if let Some(path) = export_graph {
        let g = &games[0];
        let gg = if weighted || !(g.is_boolean() && g.is_uniform()) {
            GameGraph::build_weighted(g)
        } else {
            GameGraph::build(g)?
        };
        let dimacs = gg.graph().to_dimacs(&format!("game graph of {}", g.name()));
        fs::write(path, dimacs).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", path.display())))?;
        let mut sidecar = path.as_os_str().to_owned();
        sidecar.push(".json");
        fs::write(&sidecar, gg.sidecar_json(g.name()))
            .map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", Path::new(&sidecar).display())))?;
    }
    let reports: Vec<AnalysisReport> =
        fan_out(&games, |g| analyze(g, &opts)).into_iter().collect::<Result<_, Error>>()?;
    if json {
        let values: Vec<Value> = reports.iter().map(|r| report_json(r, timings)).collect();
        let doc = if values.len() == 1 { values.into_iter().next().expect("one report") } else { Value::Array(values) };
        out!("{}", to_json_string(&doc));
    } else {
        let texts: Vec<String> = reports.iter().map(|r| render_text(r, timings)).collect();
        out!("{}", texts.join("\n"));
    }
    let converged = reports.iter().all(|r| r.converged());
    Ok(if converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn cmd_verify_qis(game: &str, qis_path: &Path, tol: f64) -> Result<u8, Failure> {
    let g = load_game(game)?;
    let gg = GameGraph::build(&g)?;
    let qis = parse_qis(&read(qis_path)?, &gg)?;
    let report = verify_quantum_independent_set(&gg, &qis, tol);
    if report.valid {
        outln!("valid: t={} d={}", qis.t(), qis.d());
        Ok(0)
    } else {
        outln!("invalid: {} violations", report.violations.len());
        for v in &report.violations {
            outln!("  {v}");
        }
        Ok(EXIT_INVALID)
    }
}

fn cmd_lift(game: &str, qis_path: &Path, output: Option<&Path>) -> Result<u8, Failure> {
    let g = load_game(game)?;
    let gg = GameGraph::build(&g)?;
    let qis = parse_qis(&read(qis_path)?, &gg)?;
    let s = match lift_qis_to_strategy(&g, &gg, &qis) {
        Ok(s) => s,
        Err(e @ Error::InvalidQis(_)) => return Err(fail(EXIT_INVALID, e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let p = winning_probability(&g, &s)?;
    let k = g.k() as f64;
    if let Some(path) = output {
        write_or_print(Some(path), &serialize_strategy(&s))?;
    }
    outln!("t={} d={} winning_probability={p:.16e} lower_bound_t_over_k={:.16e}", qis.t(), qis.d(), qis.t() as f64 / k);
    Ok(0)
}

fn cmd_to_qis(game: &str, strategy: &str, output: Option<&Path>, tol: f64) -> Result<u8, Failure> {
    let g = load_game(game)?;
    let s = match builtin_strategy(strategy) {
        Some(s) if !Path::new(strategy).is_file() => s,
        _ => parse_strategy(&read(Path::new(strategy))?)?,
    };
    let qis = match strategy_to_qis(&g, &s, tol) {
        Ok(q) => q,
        Err(e @ (Error::NotPseudoTelepathy { .. } | Error::NonCommuting { .. } | Error::NotMaximallyEntangled)) => {
            return Err(fail(EXIT_INVALID, e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let gg = GameGraph::build(&g)?;
    write_or_print(output, &serialize_qis(&qis, &gg))?;
    Ok(0)
}

fn cmd_catalog(action: &CatalogAction) -> Result<u8, Failure> {
    match action {
        CatalogAction::List => {
            for name in catalog_names() {
                outln!("{name}");
            }
            outln!("strategies: chsh-optimal magic-square");
        }
        CatalogAction::Emit { name } => {
            let g = catalog_game(name)?;
            outln!("{}", serialize_game(&g));
        }
        CatalogAction::Strategy { name } => {
            let s = builtin_strategy(name).ok_or_else(|| fail(EXIT_ERROR, format!("unknown strategy `{name}`")))?;
            outln!("{}", serialize_strategy(&s));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which here means "not converged".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Analyze { sources, tol, json, rep, weighted, max_verts, seed: _, export_graph, timings } => {
            cmd_analyze(sources, *tol, *json, *rep, *weighted, *max_verts, export_graph.as_deref(), *timings)
        }
        Command::VerifyQis { game, qis, tol } => cmd_verify_qis(game, qis, *tol),
        Command::Lift { game, qis, output } => cmd_lift(game, qis, output.as_deref()),
        Command::ToQis { game, strategy, output, tol } => cmd_to_qis(game, strategy, output.as_deref(), *tol),
        Command::Catalog { action } => cmd_catalog(action),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
