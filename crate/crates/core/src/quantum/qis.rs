use std::fmt;

use crate::error::{Error, Result};
use crate::game::Game;
use crate::graph::GameGraph;
use crate::linalg::{Matrix, SymMatrix};

use super::cmatrix::CMatrix;
use super::strategy::{winning_probability, QuantumStrategy};
use super::support::{supp, DEFAULT_SUPP_TOL};

/// Default tolerance for [`verify_quantum_independent_set`].
pub const DEFAULT_QIS_TOL: f64 = 1e-9;

/// `t` projective measurements on `R^d` whose outcomes are game-graph
/// vertices. `projectors[i][v]` is the projector for outcome `v` of
/// measurement `i` (possibly zero).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumIndependentSet {
    d: usize,
    projectors: Vec<Vec<Matrix>>,
}

impl QuantumIndependentSet {
    /// Checks only that every matrix is `d×d` and every measurement has the
    /// same number of outcomes; the rest is [`verify_quantum_independent_set`].
    pub fn new(d: usize, projectors: Vec<Vec<Matrix>>) -> Result<Self> {
        let outcomes = projectors.first().map_or(0, |m| m.len());
        for (i, m) in projectors.iter().enumerate() {
            if m.len() != outcomes {
                return Err(Error::InvalidQis(format!(
                    "measurement {i} has {} outcomes, measurement 0 has {outcomes}",
                    m.len()
                )));
            }
            if let Some(v) = m.iter().position(|p| p.rows() != d || p.cols() != d) {
                return Err(Error::InvalidQis(format!("projector ({i}, {v}) is not {d}x{d}")));
            }
        }
        Ok(QuantumIndependentSet { d, projectors })
    }

    pub fn t(&self) -> usize {
        self.projectors.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn projectors(&self) -> &[Vec<Matrix>] {
        &self.projectors
    }

    pub fn projector(&self, i: usize, v: usize) -> &Matrix {
        &self.projectors[i][v]
    }

    /// Mutable access, for building corrupted or hand-made sets.
    pub fn projector_mut(&mut self, i: usize, v: usize) -> &mut Matrix {
        &mut self.projectors[i][v]
    }
}

/// One failed condition of a quantum independent set.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Outcome count does not match the graph.
    Shape { outcomes: usize, vertices: usize },
    /// `P^i_v` is not a symmetric idempotent.
    NotProjector { measurement: usize, vertex: usize, residual: f64 },
    /// `Σ_v P^i_v ≠ I`.
    Incomplete { measurement: usize, residual: f64 },
    /// `P^i_u P^j_v ≠ 0` for `i ≠ j` and `u = v` or `u ~ v`.
    NotOrthogonal { i: usize, j: usize, u: usize, v: usize, norm: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { outcomes, vertices } => {
                write!(f, "shape: {outcomes} outcomes per measurement, graph has {vertices} vertices")
            }
            Violation::NotProjector { measurement, vertex, residual } => {
                write!(f, "not a projector: measurement {measurement}, vertex {vertex}, residual {residual:e}")
            }
            Violation::Incomplete { measurement, residual } => {
                write!(f, "incomplete: measurement {measurement} sums to identity within {residual:e}")
            }
            Violation::NotOrthogonal { i, j, u, v, norm } => {
                write!(f, "consistency: |P^{i}_{u} P^{j}_{v}|_F = {norm:e}")
            }
        }
    }
}

/// Result of [`verify_quantum_independent_set`].
#[derive(Debug, Clone, PartialEq)]
pub struct QisReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Checks that each measurement is projective and complete, and that
/// `‖P^i_u P^j_v‖_F ≤ tol` whenever `i ≠ j` and `u`, `v` are equal or
/// adjacent. Violations are collected, not raised.
pub fn verify_quantum_independent_set(gg: &GameGraph, qis: &QuantumIndependentSet, tol: f64) -> QisReport {
    let n = gg.n();
    let d = qis.d;
    let mut violations = Vec::new();
    let outcomes = qis.projectors.first().map_or(n, |m| m.len());
    if outcomes != n {
        violations.push(Violation::Shape { outcomes, vertices: n });
        return QisReport { valid: false, violations };
    }
    let nonzero: Vec<Vec<bool>> =
        qis.projectors.iter().map(|m| m.iter().map(|p| p.as_slice().iter().any(|x| *x != 0.0)).collect()).collect();
    for (i, family) in qis.projectors.iter().enumerate() {
        let mut total = Matrix::zeros(d, d);
        for (v, p) in family.iter().enumerate() {
            if !nonzero[i][v] {
                continue;
            }
            let residual = p.matmul(p).sub(p).frobenius_norm().max(p.max_asymmetry());
            if residual > tol {
                violations.push(Violation::NotProjector { measurement: i, vertex: v, residual });
            }
            total = total.add(p);
        }
        let residual = total.sub(&Matrix::identity(d)).frobenius_norm();
        if residual > tol {
            violations.push(Violation::Incomplete { measurement: i, residual });
        }
    }
    let g = gg.graph();
    for i in 0..qis.t() {
        for j in i + 1..qis.t() {
            for u in (0..n).filter(|&u| nonzero[i][u]) {
                let conflicts = std::iter::once(u).chain(g.neighbors(u).iter());
                for v in conflicts.filter(|&v| nonzero[j][v]) {
                    let norm = qis.projectors[i][u].matmul(&qis.projectors[j][v]).frobenius_norm();
                    if norm > tol {
                        violations.push(Violation::NotOrthogonal { i, j, u, v, norm });
                    }
                }
            }
        }
    }
    QisReport { valid: violations.is_empty(), violations }
}

fn check_graph_matches(g: &Game, gg: &GameGraph) -> Result<()> {
    let fits = gg.k() == g.k()
        && gg.vertices().iter().all(|q| q.x < g.nx() && q.y < g.ny() && q.a < g.na() && q.b < g.nb());
    if fits {
        Ok(())
    } else {
        Err(Error::DimensionMismatch("game graph does not belong to this game".into()))
    }
}

/// Builds the entangled strategy of a quantum independent set: Alice's
/// `P^x_a` is the support of `Σ_{y,b} Σ_i P^i_{xyab}`, Bob's `Q^y_b` the
/// support of `Σ_{x,a} Σ_i P^i_{xyab}`, each family completed by
/// `I - Σ P` at outcome index `na` (resp. `nb`), and the players share the
/// maximally entangled state of dimension `d`.
pub fn lift_qis_to_strategy(g: &Game, gg: &GameGraph, qis: &QuantumIndependentSet) -> Result<QuantumStrategy> {
    check_graph_matches(g, gg)?;
    let report = verify_quantum_independent_set(gg, qis, DEFAULT_QIS_TOL);
    if let Some(first) = report.violations.first() {
        return Err(Error::InvalidQis(format!("{first} ({} violations)", report.violations.len())));
    }
    let d = qis.d;
    let mut alice_sums = vec![vec![Matrix::zeros(d, d); g.na()]; g.nx()];
    let mut bob_sums = vec![vec![Matrix::zeros(d, d); g.nb()]; g.ny()];
    for (v, q) in gg.vertices().iter().enumerate() {
        for family in &qis.projectors {
            let p = &family[v];
            if p.as_slice().iter().all(|x| *x == 0.0) {
                continue;
            }
            alice_sums[q.x][q.a] = alice_sums[q.x][q.a].add(p);
            bob_sums[q.y][q.b] = bob_sums[q.y][q.b].add(p);
        }
    }
    let measure = |sums: Vec<Matrix>| -> Result<Vec<CMatrix>> {
        let mut out = Vec::with_capacity(sums.len() + 1);
        let mut rest = Matrix::identity(d);
        for s in sums {
            let p = supp(&SymMatrix::symmetrize(s), DEFAULT_SUPP_TOL)?.into_matrix();
            rest = rest.sub(&p);
            out.push(CMatrix::from_real(&p));
        }
        out.push(CMatrix::from_real(SymMatrix::symmetrize(rest).matrix()));
        Ok(out)
    };
    let alice = alice_sums.into_iter().map(measure).collect::<Result<Vec<_>>>()?;
    let bob = bob_sums.into_iter().map(measure).collect::<Result<Vec<_>>>()?;
    QuantumStrategy::maximally_entangled(d, alice, bob)
}

/// Turns a perfect strategy with commuting measurements into a quantum
/// independent set with one measurement per input pair.
///
/// With the maximally entangled state, `P ⊗ Q` acts on it as `P Qᵀ ⊗ I`,
/// so Bob's operator on Alice's side is `Qᵀ`. When `P^x_a` and
/// `(Q^y_b)ᵀ` commute, `Π_xyab = P^x_a (Q^y_b)ᵀ` is a projector; these form
/// measurement `x·ny + y` over the winning quadruples. Complex products
/// are embedded as real matrices of twice the dimension.
pub fn strategy_to_qis(g: &Game, s: &QuantumStrategy, tol: f64) -> Result<QuantumIndependentSet> {
    if s.d_a() != s.d_b() {
        return Err(Error::DimensionMismatch(format!("local dimensions differ: {} vs {}", s.d_a(), s.d_b())));
    }
    if !s.is_maximally_entangled() {
        return Err(Error::NotMaximallyEntangled);
    }
    let gg = GameGraph::build(g)?;
    let value = winning_probability(g, s)?;
    if value < 1.0 - tol {
        return Err(Error::NotPseudoTelepathy { value });
    }
    let zero = || CMatrix::zeros(s.d_a(), s.d_a());
    let answers = |fam: &[CMatrix], k: usize| fam.get(k).cloned().unwrap_or_else(zero);
    let alice: Vec<Vec<CMatrix>> =
        s.alice().iter().map(|fam| (0..g.na()).map(|a| answers(fam, a)).collect()).collect();
    let bob_t: Vec<Vec<CMatrix>> =
        s.bob().iter().map(|fam| (0..g.nb()).map(|b| answers(fam, b).transpose()).collect()).collect();
    for (x, fa) in alice.iter().enumerate() {
        for (y, fb) in bob_t.iter().enumerate() {
            for (a, p) in fa.iter().enumerate() {
                for (b, q) in fb.iter().enumerate() {
                    let norm = p.matmul(q).sub(&q.matmul(p)).frobenius_norm();
                    if norm > tol {
                        return Err(Error::NonCommuting { x, y, a, b, norm });
                    }
                }
            }
        }
    }
    let products: Vec<CMatrix> = gg.vertices().iter().map(|q| alice[q.x][q.a].matmul(&bob_t[q.y][q.b])).collect();
    let complex = products.iter().any(|p| p.max_imaginary() > 1e-15);
    let d = if complex { 2 * s.d_a() } else { s.d_a() };
    let to_real = |p: &CMatrix| {
        let m = if complex { p.realify() } else { p.real_part() };
        SymMatrix::symmetrize(m).into_matrix()
    };
    let ny = g.ny();
    let mut projectors = vec![vec![Matrix::zeros(d, d); gg.n()]; g.k()];
    for (v, q) in gg.vertices().iter().enumerate() {
        projectors[q.x * ny + q.y][v] = to_real(&products[v]);
    }
    QuantumIndependentSet::new(d, projectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_value;
    use crate::game::{chsh, independent_set_game};
    use crate::graph::Graph;
    use crate::quantum::catalog::qis_from_independent_set;

    #[test]
    fn classical_witness_is_a_qis() {
        let g = independent_set_game(&Graph::cycle(5), 2).unwrap();
        let gg = GameGraph::build(&g).unwrap();
        let w = classical_value(&g).unwrap().witness.unwrap();
        let qis = qis_from_independent_set(&gg, &w[..2]).unwrap();
        let r = verify_quantum_independent_set(&gg, &qis, DEFAULT_QIS_TOL);
        assert!(r.valid, "{:?}", r.violations);
    }

    #[test]
    fn shared_projector_on_adjacent_vertices() {
        let gg = GameGraph::build(&chsh()).unwrap();
        let (u, v) = gg.graph().edges().next().unwrap();
        // Second outcome of each measurement: a vertex at distance >= 2 from
        // the other measurement's pair.
        let (u2, v2) = (0..gg.n())
            .flat_map(|a| (0..gg.n()).map(move |b| (a, b)))
            .find(|&(a, b)| {
                a != u && b != v && a != b && !gg.graph().has_edge(a, b) && a != v && b != u
            })
            .unwrap();
        let e0 = Matrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let e1 = Matrix::from_vec(2, 2, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let fam = || vec![Matrix::zeros(2, 2); gg.n()];
        let mut m1 = fam();
        let mut m2 = fam();
        m1[u] = e0.clone();
        m1[u2] = e1.clone();
        m2[v] = e0;
        m2[v2] = e1;
        let qis = QuantumIndependentSet::new(2, vec![m1, m2]).unwrap();
        let r = verify_quantum_independent_set(&gg, &qis, DEFAULT_QIS_TOL);
        assert!(!r.valid);
        assert_eq!(r.violations, vec![Violation::NotOrthogonal { i: 0, j: 1, u, v, norm: 1.0 }]);
    }

    #[test]
    fn incomplete_and_misshapen_sets() {
        let gg = GameGraph::build(&chsh()).unwrap();
        let qis = QuantumIndependentSet::new(1, vec![vec![Matrix::zeros(1, 1); gg.n()]]).unwrap();
        let r = verify_quantum_independent_set(&gg, &qis, DEFAULT_QIS_TOL);
        assert!(matches!(r.violations[..], [Violation::Incomplete { measurement: 0, .. }]));
        let qis = QuantumIndependentSet::new(1, vec![vec![Matrix::identity(1); 3]]).unwrap();
        assert!(matches!(
            verify_quantum_independent_set(&gg, &qis, DEFAULT_QIS_TOL).violations[..],
            [Violation::Shape { outcomes: 3, vertices: 8 }]
        ));
        assert!(QuantumIndependentSet::new(2, vec![vec![Matrix::identity(1)]]).is_err());
    }

    #[test]
    fn lift_rejects_invalid_sets() {
        let g = chsh();
        let gg = GameGraph::build(&g).unwrap();
        let qis = QuantumIndependentSet::new(1, vec![vec![Matrix::zeros(1, 1); gg.n()]]).unwrap();
        assert!(matches!(lift_qis_to_strategy(&g, &gg, &qis), Err(Error::InvalidQis(_))));
    }
}
