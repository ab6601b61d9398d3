//! JSON documents for strategies and quantum independent sets.
//!
//! Strategy:
//!
//! ```json
//! { "d_a": 2, "d_b": 2,
//!   "state": [[re, im], ...],
//!   "alice": [[matrix, ...], ...],
//!   "bob": [[matrix, ...], ...] }
//! ```
//!
//! where a complex `matrix` is a list of rows of `[re, im]` pairs, and
//! `alice[x][a]` is the projector for answer `a` on input `x`.
//!
//! Quantum independent set, with real matrices as lists of rows and
//! vertices named by their quadruple; omitted vertices have projector 0:
//!
//! ```json
//! { "d": 1, "t": 2,
//!   "measurements": [[{ "vertex": [x, y, a, b], "matrix": [[1.0]] }], ...] }
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Quad;
use crate::graph::GameGraph;
use crate::linalg::Matrix;

use super::cmatrix::CMatrix;
use super::qis::QuantumIndependentSet;
use super::strategy::QuantumStrategy;

type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyDoc {
    d_a: usize,
    d_b: usize,
    state: Vec<[f64; 2]>,
    alice: Vec<Vec<ComplexRows>>,
    bob: Vec<Vec<ComplexRows>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QisDoc {
    d: usize,
    t: usize,
    measurements: Vec<Vec<OutcomeDoc>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomeDoc {
    vertex: [usize; 4],
    matrix: Vec<Vec<f64>>,
}

fn complex_rows(m: &CMatrix) -> ComplexRows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn from_complex_rows(rows: &ComplexRows, d: usize) -> Result<CMatrix> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch(format!("expected a {d}x{d} matrix")));
    }
    let data = rows.iter().flatten().map(|[re, im]| Complex64::new(*re, *im)).collect();
    CMatrix::from_vec(d, d, data)
}

fn real_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn from_real_rows(rows: &[Vec<f64>], d: usize) -> Result<Matrix> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch(format!("expected a {d}x{d} matrix")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidQis("non-finite matrix entry".into()));
    }
    Matrix::from_vec(d, d, rows.concat())
}

pub fn parse_strategy(text: &str) -> Result<QuantumStrategy> {
    let doc: StrategyDoc = serde_json::from_str(text)?;
    let family = |fams: &[Vec<ComplexRows>], d: usize| -> Result<Vec<Vec<CMatrix>>> {
        fams.iter().map(|f| f.iter().map(|m| from_complex_rows(m, d)).collect()).collect()
    };
    let alice = family(&doc.alice, doc.d_a)?;
    let bob = family(&doc.bob, doc.d_b)?;
    let state = doc.state.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    QuantumStrategy::new(doc.d_a, doc.d_b, state, alice, bob)
}

pub fn serialize_strategy(s: &QuantumStrategy) -> String {
    let family = |fams: &[Vec<CMatrix>]| -> Vec<Vec<ComplexRows>> {
        fams.iter().map(|f| f.iter().map(complex_rows).collect()).collect()
    };
    let doc = StrategyDoc {
        d_a: s.d_a(),
        d_b: s.d_b(),
        state: s.state().iter().map(|z| [z.re, z.im]).collect(),
        alice: family(s.alice()),
        bob: family(s.bob()),
    };
    serde_json::to_string_pretty(&doc).expect("strategy documents serialize")
}

/// Parses a quantum independent set for the vertices of `gg`.
pub fn parse_qis(text: &str, gg: &GameGraph) -> Result<QuantumIndependentSet> {
    let doc: QisDoc = serde_json::from_str(text)?;
    if doc.t != doc.measurements.len() {
        return Err(Error::InvalidQis(format!("t = {} but {} measurements given", doc.t, doc.measurements.len())));
    }
    let d = doc.d;
    let mut projectors = Vec::with_capacity(doc.t);
    for (i, outcomes) in doc.measurements.iter().enumerate() {
        let mut fam = vec![Matrix::zeros(d, d); gg.n()];
        for o in outcomes {
            let [x, y, a, b] = o.vertex;
            let q = Quad::new(x, y, a, b);
            let v = gg
                .vertex_index(&q)
                .ok_or_else(|| Error::InvalidQis(format!("measurement {i}: ({x},{y},{a},{b}) is not a vertex")))?;
            fam[v] = from_real_rows(&o.matrix, d)?;
        }
        projectors.push(fam);
    }
    QuantumIndependentSet::new(d, projectors)
}

/// Writes the nonzero projectors of `qis`, naming vertices by quadruple.
pub fn serialize_qis(qis: &QuantumIndependentSet, gg: &GameGraph) -> String {
    let measurements = qis
        .projectors()
        .iter()
        .map(|fam| {
            fam.iter()
                .enumerate()
                .filter(|(_, p)| p.as_slice().iter().any(|x| *x != 0.0))
                .map(|(v, p)| {
                    let q = gg.vertices()[v];
                    OutcomeDoc { vertex: [q.x, q.y, q.a, q.b], matrix: real_rows(p) }
                })
                .collect()
        })
        .collect();
    let doc = QisDoc { d: qis.d(), t: qis.t(), measurements };
    serde_json::to_string_pretty(&doc).expect("qis documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::chsh;
    use crate::quantum::catalog::{chsh_optimal_strategy, qis_from_independent_set};

    #[test]
    fn strategy_round_trip() {
        let s = chsh_optimal_strategy();
        assert_eq!(parse_strategy(&serialize_strategy(&s)).unwrap(), s);
    }

    #[test]
    fn qis_round_trip() {
        let gg = GameGraph::build(&chsh()).unwrap();
        let qis = qis_from_independent_set(&gg, &[0, 3]).unwrap();
        let text = serialize_qis(&qis, &gg);
        assert_eq!(parse_qis(&text, &gg).unwrap(), qis);
    }

    #[test]
    fn malformed_documents() {
        let gg = GameGraph::build(&chsh()).unwrap();
        assert!(matches!(parse_qis("{", &gg), Err(Error::Syntax { .. })));
        let bad_vertex = r#"{"d":1,"t":1,"measurements":[[{"vertex":[1,1,0,0],"matrix":[[1.0]]}]]}"#;
        assert!(matches!(parse_qis(bad_vertex, &gg), Err(Error::InvalidQis(_))));
        let bad_t = r#"{"d":1,"t":2,"measurements":[]}"#;
        assert!(parse_qis(bad_t, &gg).is_err());
        let bad_shape = r#"{"d":2,"t":1,"measurements":[[{"vertex":[0,0,0,0],"matrix":[[1.0]]}]]}"#;
        assert!(matches!(parse_qis(bad_shape, &gg), Err(Error::DimensionMismatch(_))));
    }
}
