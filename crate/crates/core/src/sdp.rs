//! Lovász theta and the XOR-game SDP by ADMM.
//!
//! Both programs have the shape `maximize ⟨C, X⟩` over PSD `X` in an affine
//! subspace whose orthogonal projection is cheap:
//!
//! * theta: `Tr X = 1`, `X_uv = 0` on edges, `C = J` (or `√w √wᵀ` for
//!   vertex weights);
//! * XOR games: `X_ii = 1`, with `C` the signed correlation payoffs.
//!
//! The splitting alternates the affine projection with an eigenvalue
//! projection onto the PSD cone. Every reported `value` is the objective of
//! a repaired, exactly feasible primal matrix, and every `dual_bound` is a
//! rigorous upper bound built from the multipliers, so the pair brackets
//! the optimum whether or not the run converged.
//!
//! ADMM is slow on degenerate instances, where the optimal face is large
//! and the repaired primal lags the dual. Small problems that have not
//! converged after [`IPM_HANDOFF`] iterations go to an interior-point
//! refinement whose iterates are certified the same way.

mod ipm;

use crate::error::{Error, Result};
use crate::game::Game;
use crate::graph::{GameGraph, Graph};
use crate::linalg::{jacobi_eigh, jacobi_eigh_warm, project_psd_eigen, Eigen, Matrix, SymMatrix};
use ipm::Constraint;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const MAX_ITERATIONS: usize = 200_000;
/// ADMM iterations after which a small problem that has not converged is
/// handed to the interior-point refinement.
pub const IPM_HANDOFF: usize = 2_000;
/// Largest constraint count for the refinement, whose dense Schur
/// complement costs `O(p³)` per step.
const IPM_MAX_CONSTRAINTS: usize = 1_500;

/// Over-relaxation factor for the PSD step.
const RELAXATION: f64 = 1.6;
const RHO_INTERVAL: usize = 10;
const MAX_RHO_UPDATES: usize = 40;

/// Outcome of an SDP solve.
#[derive(Debug, Clone)]
pub struct ThetaResult {
    /// Objective of a feasible primal matrix.
    pub value: f64,
    /// Certified upper bound on the optimum.
    pub dual_bound: f64,
    /// `dual_bound - value`.
    pub gap: f64,
    pub iterations: usize,
    /// Residuals below tolerance and `gap <= tol`, so `value` is within `tol` of the optimum.
    pub converged: bool,
    pub primal_matrix: SymMatrix,
}

enum Affine {
    /// `Tr X = 1` and zero entries on the listed pairs.
    Theta { edges: Vec<(usize, usize)> },
    /// `X_ii = 1`.
    UnitDiagonal,
}

impl Affine {
    fn project(&self, m: &mut Matrix) {
        let n = m.rows();
        match self {
            Affine::Theta { edges } => {
                for &(u, v) in edges {
                    m[(u, v)] = 0.0;
                    m[(v, u)] = 0.0;
                }
                let shift = (1.0 - m.trace()) / n as f64;
                for i in 0..n {
                    m[(i, i)] += shift;
                }
            }
            Affine::UnitDiagonal => {
                for i in 0..n {
                    m[(i, i)] = 1.0;
                }
            }
        }
    }

    /// Upper bound from the multiplier estimate `S = C - ρU`, whose
    /// restriction to the constrained coordinates is the dual variable.
    fn dual_bound(&self, c: &SymMatrix, s: &Matrix) -> f64 {
        let n = c.n();
        let mut slack = c.matrix().clone();
        match self {
            Affine::Theta { edges } => {
                // For feasible X, ⟨C, X⟩ = ⟨C - Y, X⟩ ≤ λ_max(C - Y) Tr X.
                for &(u, v) in edges {
                    let y = 0.5 * (s[(u, v)] + s[(v, u)]);
                    slack[(u, v)] -= y;
                    slack[(v, u)] -= y;
                }
                max_eigenvalue(SymMatrix::symmetrize(slack))
            }
            Affine::UnitDiagonal => {
                // ⟨C, X⟩ = Σ d_i + ⟨C - Diag(d), X⟩ ≤ Σ d_i + n λ_max(C - Diag(d)).
                let mut total = 0.0;
                for i in 0..n {
                    let d = s[(i, i)];
                    total += d;
                    slack[(i, i)] -= d;
                }
                total + n as f64 * max_eigenvalue(SymMatrix::symmetrize(slack))
            }
        }
    }

    /// Maps a PSD iterate to a nearby exactly feasible matrix.
    fn repair(&self, z: &SymMatrix) -> SymMatrix {
        let n = z.n();
        let mut m = z.matrix().clone();
        match self {
            Affine::Theta { .. } => self.shift_repair(m),
            Affine::UnitDiagonal => {
                // D^{-1/2} Z D^{-1/2} is a congruence of Z, hence PSD.
                let scale: Vec<f64> = (0..n)
                    .map(|i| {
                        let d = m[(i, i)];
                        if d > 0.0 {
                            1.0 / d.sqrt()
                        } else {
                            0.0
                        }
                    })
                    .collect();
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] *= scale[i] * scale[j];
                    }
                }
                for (i, s) in scale.iter().enumerate() {
                    if *s == 0.0 {
                        for j in 0..n {
                            m[(i, j)] = 0.0;
                            m[(j, i)] = 0.0;
                        }
                    }
                    m[(i, i)] = 1.0;
                }
                SymMatrix::symmetrize(m)
            }
        }
    }
}

impl Affine {
    fn constraints(&self, n: usize) -> Vec<Constraint> {
        match self {
            Affine::Theta { edges } => {
                let trace = Constraint { entries: (0..n).map(|i| (i, i, 1.0)).collect(), rhs: 1.0 };
                let zeros = edges.iter().map(|&(u, v)| Constraint {
                    entries: vec![(u, v, 0.5), (v, u, 0.5)],
                    rhs: 0.0,
                });
                std::iter::once(trace).chain(zeros).collect()
            }
            Affine::UnitDiagonal => {
                (0..n).map(|i| Constraint { entries: vec![(i, i, 1.0)], rhs: 1.0 }).collect()
            }
        }
    }

    /// Affine projection, then `(X - λ_min I) / Tr(X - λ_min I)` if needed,
    /// which keeps the zero pattern and the unit trace.
    fn shift_repair(&self, mut m: Matrix) -> SymMatrix {
        let n = m.rows();
        self.project(&mut m);
        let m = SymMatrix::symmetrize(m);
        let lmin = jacobi_eigh(&m).values[0];
        if lmin >= 0.0 {
            return m;
        }
        let denom = 1.0 - n as f64 * lmin;
        let mut out = m.into_matrix();
        for i in 0..n {
            out[(i, i)] -= lmin;
        }
        SymMatrix::symmetrize(out.scale(1.0 / denom))
    }
}

fn max_eigenvalue(m: SymMatrix) -> f64 {
    *jacobi_eigh(&m).values.last().expect("non-empty matrix")
}

struct Certificate {
    value: f64,
    dual: f64,
    matrix: SymMatrix,
}

/// Scaled ADMM for `max ⟨C, X⟩` over the affine set intersected with the
/// PSD cone.
fn admm(c: &SymMatrix, affine: &Affine, start: SymMatrix, tol: f64) -> ThetaResult {
    let n = c.n();
    let cm = c.matrix();
    let mut rho = 1.0;
    let mut z = start.into_matrix();
    let mut u = Matrix::zeros(n, n);
    let mut basis: Option<Matrix> = None;
    let mut best: Option<Certificate> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut rho_updates = 0;
    // Residual target, tightened whenever a certificate falls short.
    let mut target = tol;
    let constraints = affine.constraints(n);

    // `s` is a multiplier estimate; only its constrained entries are read.
    let certify = |z: &Matrix, s: &Matrix, best: &mut Option<Certificate>| {
        let zs = SymMatrix::symmetrize(z.clone());
        let primal = affine.repair(&zs);
        let value = c.matrix().dot(primal.matrix());
        let dual = affine.dual_bound(c, &s);
        match best {
            None => *best = Some(Certificate { value, dual, matrix: primal }),
            Some(b) => {
                if value > b.value {
                    b.value = value;
                    b.matrix = primal;
                }
                b.dual = b.dual.min(dual);
            }
        }
        let b = best.as_ref().expect("just set");
        b.dual - b.value
    };

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // X-step: affine projection of Z - U + C/ρ.
        let mut x = z.sub(&u).add(&cm.scale(1.0 / rho));
        affine.project(&mut x);
        // Z-step: PSD projection of X + U.
        let xr = x.scale(RELAXATION).add(&z.scale(1.0 - RELAXATION));
        let v = SymMatrix::symmetrize(xr.add(&u));
        let eig: Eigen = match &basis {
            Some(q) => jacobi_eigh_warm(&v, q),
            None => jacobi_eigh(&v),
        };
        let z_new = project_psd_eigen(&eig).into_matrix();
        basis = Some(eig.vectors);
        // U-step.
        let r = x.sub(&z_new);
        u = u.add(&xr.sub(&z_new));
        let primal_res = r.frobenius_norm();
        let dual_res = rho * z_new.sub(&z).frobenius_norm();
        z = z_new;

        let eps = target * (1.0 + x.frobenius_norm());
        if primal_res < eps && dual_res < eps {
            let gap = certify(&z, &cm.sub(&u.scale(rho)), &mut best);
            if gap <= tol {
                converged = true;
                break;
            }
            target *= 0.5;
        }

        if iterations == IPM_HANDOFF && constraints.len() <= IPM_MAX_CONSTRAINTS {
            let accepted = ipm::solve(c, &constraints, |x, y| {
                let mut s = Matrix::zeros(n, n);
                for (k, yk) in constraints.iter().zip(y) {
                    for &(i, j, v) in &k.entries {
                        s[(i, j)] += yk * v;
                    }
                }
                certify(x, &s, &mut best) <= tol
            });
            if accepted {
                converged = true;
                break;
            }
        }

        // Residual balancing. A penalty that keeps moving can cycle, so it
        // is revisited only every few iterations and frozen after a while.
        if rho_updates < MAX_RHO_UPDATES && iterations % RHO_INTERVAL == 0 {
            if primal_res > 10.0 * dual_res {
                rho *= 2.0;
                u = u.scale(0.5);
                rho_updates += 1;
            } else if dual_res > 10.0 * primal_res {
                rho *= 0.5;
                u = u.scale(2.0);
                rho_updates += 1;
            }
        }
    }
    if !converged {
        certify(&z, &cm.sub(&u.scale(rho)), &mut best);
    }
    let b = best.expect("certificate computed");
    ThetaResult {
        value: b.value,
        dual_bound: b.dual,
        gap: b.dual - b.value,
        iterations,
        converged,
        primal_matrix: b.matrix,
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("tol", format!("tolerance must be positive, got {tol}")))
    }
}

fn empty_result() -> ThetaResult {
    ThetaResult {
        value: 0.0,
        dual_bound: 0.0,
        gap: 0.0,
        iterations: 0,
        converged: true,
        primal_matrix: SymMatrix::zeros(0),
    }
}

/// `ϑ(G) = max ⟨J, X⟩` subject to `Tr X = 1`, `X_uv = 0` on edges, `X ⪰ 0`.
pub fn lovasz_theta(g: &Graph, tol: f64) -> Result<ThetaResult> {
    weighted_theta(g, &vec![1.0; g.n()], tol)
}

/// Weighted theta: objective `Σ √(w_u w_v) X_uv`.
pub fn weighted_theta(g: &Graph, w: &[f64], tol: f64) -> Result<ThetaResult> {
    check_tol(tol)?;
    if w.len() != g.n() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} vertices", w.len(), g.n())));
    }
    if let Some((vertex, &weight)) = w.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
        return Err(Error::NegativeWeight { vertex, weight });
    }
    let n = g.n();
    if n == 0 {
        return Ok(empty_result());
    }
    let root: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let c = SymMatrix::symmetrize(Matrix::outer(&root));
    let affine = Affine::Theta { edges: g.edges().collect() };
    Ok(admm(&c, &affine, SymMatrix::identity(n).scale(1.0 / n as f64), tol))
}

/// Upper bound on the entangled value of a game.
#[derive(Debug, Clone)]
pub struct QuantumBound {
    /// `ϑ/k` for uniform 0/1 games, the weighted theta otherwise. Only a
    /// certified bound when `theta.converged`; `theta.dual_bound` (scaled
    /// the same way) is always one.
    pub value: f64,
    /// Certified upper bound, scaled like `value`.
    pub certified: f64,
    pub weighted: bool,
    pub theta: ThetaResult,
}

/// `ϑ(G)/k` for uniform 0/1 games, weighted theta of the weighted game
/// graph otherwise.
pub fn quantum_upper_bound(g: &Game, tol: f64) -> Result<QuantumBound> {
    if g.is_boolean() && g.is_uniform() {
        let gg = GameGraph::build(g)?;
        let theta = lovasz_theta(gg.graph(), tol)?;
        let k = g.k() as f64;
        Ok(QuantumBound { value: theta.value / k, certified: theta.dual_bound / k, weighted: false, theta })
    } else {
        quantum_upper_bound_weighted(g, tol)
    }
}

/// Weighted pipeline regardless of the game's shape.
pub fn quantum_upper_bound_weighted(g: &Game, tol: f64) -> Result<QuantumBound> {
    let gg = GameGraph::build_weighted(g);
    let theta = weighted_theta(gg.graph(), gg.weights().expect("weighted"), tol)?;
    Ok(QuantumBound { value: theta.value, certified: theta.dual_bound, weighted: true, theta })
}

/// Winning probabilities of an XOR-type game: `λ(x,y,a,b)` is `same[x][y]`
/// when `a = b` and `diff[x][y]` otherwise.
struct XorPayoffs {
    same: Vec<f64>,
    diff: Vec<f64>,
}

fn xor_payoffs(g: &Game) -> Result<XorPayoffs> {
    let (nx, ny, na, nb) = g.sizes();
    if na != 2 || nb != 2 {
        return Err(Error::NotXorGame(format!("outputs must be binary, got {na}x{nb}")));
    }
    let mut same = Vec::with_capacity(nx * ny);
    let mut diff = Vec::with_capacity(nx * ny);
    for x in 0..nx {
        for y in 0..ny {
            let (s0, s1) = (g.lambda(x, y, 0, 0), g.lambda(x, y, 1, 1));
            let (d0, d1) = (g.lambda(x, y, 0, 1), g.lambda(x, y, 1, 0));
            if s0 != s1 || d0 != d1 {
                return Err(Error::NotXorGame(format!(
                    "predicate at (x={x}, y={y}) depends on more than a xor b"
                )));
            }
            same.push(s0);
            diff.push(d0);
        }
    }
    Ok(XorPayoffs { same, diff })
}

/// Entangled value of an XOR game from the vector program over unit
/// vectors `u_x`, `v_y`: `Σ π (same + diff)/2 + π (same - diff)/2 ⟨u_x, v_y⟩`.
pub fn xor_tsirelson_value(g: &Game) -> Result<f64> {
    xor_tsirelson(g, 1e-9).map(|r| r.value)
}

/// As [`xor_tsirelson_value`] with the full solver output. `value` and
/// `dual_bound` are in winning-probability units.
pub fn xor_tsirelson(g: &Game, tol: f64) -> Result<ThetaResult> {
    check_tol(tol)?;
    let p = xor_payoffs(g)?;
    let (nx, ny) = (g.nx(), g.ny());
    let n = nx + ny;
    let mut c = Matrix::zeros(n, n);
    let mut constant = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let i = x * ny + y;
            let pi = g.pi(x, y);
            constant += pi * (p.same[i] + p.diff[i]) / 2.0;
            let coef = pi * (p.same[i] - p.diff[i]) / 4.0;
            c[(x, nx + y)] = coef;
            c[(nx + y, x)] = coef;
        }
    }
    let c = SymMatrix::symmetrize(c);
    let mut r = admm(&c, &Affine::UnitDiagonal, SymMatrix::identity(n), tol);
    r.value += constant;
    r.dual_bound += constant;
    Ok(r)
}
