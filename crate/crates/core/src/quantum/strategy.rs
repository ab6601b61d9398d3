use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game::Game;

use super::cmatrix::CMatrix;

/// Tolerance for projectivity and completeness of measurements.
pub const MEASUREMENT_TOL: f64 = 1e-9;
/// Tolerance on the norm of the shared state.
pub const STATE_TOL: f64 = 1e-10;

/// Shared state plus local projective measurements.
///
/// `alice[x][a]` acts on `C^dA`, `bob[y][b]` on `C^dB`, and `state` lives in
/// `C^dA ⊗ C^dB` with index `i * dB + j`. A family may have more outcomes
/// than the game has answers; those extra outcomes always lose.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    d_a: usize,
    d_b: usize,
    state: Vec<Complex64>,
    alice: Vec<Vec<CMatrix>>,
    bob: Vec<Vec<CMatrix>>,
}

fn check_family(who: &str, input: usize, family: &[CMatrix], d: usize) -> Result<()> {
    if family.is_empty() {
        return Err(Error::InvalidMeasurement(format!("{who} input {input} has no outcomes")));
    }
    let mut total = CMatrix::zeros(d, d);
    for (k, p) in family.iter().enumerate() {
        if p.rows() != d || p.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{who} input {input} outcome {k} is {}x{}, expected {d}x{d}",
                p.rows(),
                p.cols()
            )));
        }
        let herm = p.sub(&p.adjoint()).frobenius_norm();
        let idem = p.matmul(p).sub(p).frobenius_norm();
        if herm > MEASUREMENT_TOL || idem > MEASUREMENT_TOL {
            return Err(Error::InvalidMeasurement(format!(
                "{who} input {input} outcome {k} is not a projector (|P-P*| = {herm:e}, |P^2-P| = {idem:e})"
            )));
        }
        total = total.add(p);
    }
    let defect = total.sub(&CMatrix::identity(d)).frobenius_norm();
    if defect > MEASUREMENT_TOL {
        return Err(Error::InvalidMeasurement(format!(
            "{who} input {input} outcomes sum to identity only within {defect:e}"
        )));
    }
    Ok(())
}

/// `(1/√d) Σ_i |i,i⟩`.
pub fn maximally_entangled_state(d: usize) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        psi[i * d + i] = Complex64::new(amp, 0.0);
    }
    psi
}

impl QuantumStrategy {
    /// Validates dimensions, projectivity, completeness and normalization.
    pub fn new(
        d_a: usize,
        d_b: usize,
        state: Vec<Complex64>,
        alice: Vec<Vec<CMatrix>>,
        bob: Vec<Vec<CMatrix>>,
    ) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::DimensionMismatch("local dimensions must be positive".into()));
        }
        if state.len() != d_a * d_b {
            return Err(Error::DimensionMismatch(format!(
                "state has {} amplitudes, expected {}",
                state.len(),
                d_a * d_b
            )));
        }
        let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidMeasurement(format!("state norm is {norm}, expected 1")));
        }
        for (x, fam) in alice.iter().enumerate() {
            check_family("alice", x, fam, d_a)?;
        }
        for (y, fam) in bob.iter().enumerate() {
            check_family("bob", y, fam, d_b)?;
        }
        Ok(QuantumStrategy { d_a, d_b, state, alice, bob })
    }

    /// Shares `(1/√d) Σ|i,i⟩` with `d = dA = dB`.
    pub fn maximally_entangled(d: usize, alice: Vec<Vec<CMatrix>>, bob: Vec<Vec<CMatrix>>) -> Result<Self> {
        Self::new(d, d, maximally_entangled_state(d), alice, bob)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn state(&self) -> &[Complex64] {
        &self.state
    }

    pub fn alice(&self) -> &[Vec<CMatrix>] {
        &self.alice
    }

    pub fn bob(&self) -> &[Vec<CMatrix>] {
        &self.bob
    }

    /// Whether the state is `(1/√d) Σ|i,i⟩` to within `1e-12` per amplitude.
    pub fn is_maximally_entangled(&self) -> bool {
        self.d_a == self.d_b
            && self
                .state
                .iter()
                .zip(maximally_entangled_state(self.d_a))
                .all(|(a, b)| (a - b).norm() <= 1e-12)
    }

    fn check_game(&self, g: &Game) -> Result<()> {
        if self.alice.len() != g.nx() || self.bob.len() != g.ny() {
            return Err(Error::DimensionMismatch(format!(
                "strategy has {}x{} inputs, game has {}x{}",
                self.alice.len(),
                self.bob.len(),
                g.nx(),
                g.ny()
            )));
        }
        Ok(())
    }
}

/// `⟨ψ|P ⊗ Q|ψ⟩ = Σ_ij conj(Ψ_ij) (P Ψ Qᵀ)_ij`, with `Ψ` the `dA×dB`
/// reshaping of `ψ`.
fn expectation_dense(psi: &CMatrix, p: &CMatrix, q: &CMatrix) -> f64 {
    let m = p.matmul(psi).matmul(&q.transpose());
    psi.as_slice().iter().zip(m.as_slice()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// `⟨Φ|P ⊗ Q|Φ⟩ = Tr(P Qᵀ)/d` for the maximally entangled state.
fn expectation_max_entangled(p: &CMatrix, q: &CMatrix, d: usize) -> f64 {
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            tr += p[(i, j)] * q[(i, j)];
        }
    }
    tr.re / d as f64
}

fn winning_sum(g: &Game, s: &QuantumStrategy, expect: impl Fn(&CMatrix, &CMatrix) -> f64) -> Result<f64> {
    s.check_game(g)?;
    let mut total = 0.0;
    for x in 0..g.nx() {
        for y in 0..g.ny() {
            let pi = g.pi(x, y);
            if pi == 0.0 {
                continue;
            }
            for (a, p) in s.alice[x].iter().enumerate().take(g.na()) {
                for (b, q) in s.bob[y].iter().enumerate().take(g.nb()) {
                    let lam = g.lambda(x, y, a, b);
                    if lam == 0.0 {
                        continue;
                    }
                    total += pi * lam * expect(p, q);
                }
            }
        }
    }
    Ok(total)
}

/// `Σ π(x,y) λ(x,y,a,b) ⟨ψ|P^x_a ⊗ Q^y_b|ψ⟩`. Uses the trace formula when
/// the state is maximally entangled.
pub fn winning_probability(g: &Game, s: &QuantumStrategy) -> Result<f64> {
    if s.is_maximally_entangled() {
        winning_probability_max_entangled(g, s)
    } else {
        winning_probability_dense(g, s)
    }
}

/// The general tensor-product evaluation.
pub fn winning_probability_dense(g: &Game, s: &QuantumStrategy) -> Result<f64> {
    let psi = CMatrix::from_vec(s.d_a, s.d_b, s.state.clone())?;
    winning_sum(g, s, |p, q| expectation_dense(&psi, p, q))
}

/// The trace formula; errors unless the state is maximally entangled.
pub fn winning_probability_max_entangled(g: &Game, s: &QuantumStrategy) -> Result<f64> {
    if !s.is_maximally_entangled() {
        return Err(Error::NotMaximallyEntangled);
    }
    winning_sum(g, s, |p, q| expectation_max_entangled(p, q, s.d_a))
}
