//! Reference strategies and quantum independent sets used as fixtures.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game::{magic_square_column_bits, magic_square_row_bits, ClassicalStrategy, Game};
use crate::graph::GameGraph;
use crate::linalg::Matrix;

use super::cmatrix::CMatrix;
use super::qis::QuantumIndependentSet;
use super::strategy::QuantumStrategy;

/// Projectors onto `(cos θ, sin θ)` and its orthogonal complement.
fn real_basis(theta: f64) -> Vec<CMatrix> {
    let (c, s) = (theta.cos(), theta.sin());
    let v = [Complex64::new(c, 0.0), Complex64::new(s, 0.0)];
    let w = [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)];
    vec![CMatrix::outer(&v), CMatrix::outer(&w)]
}

/// The optimal CHSH strategy: Alice measures at angles 0 and π/4, Bob at
/// ±π/8, on `(|00⟩ + |11⟩)/√2`. Wins with probability `cos²(π/8)`.
pub fn chsh_optimal_strategy() -> QuantumStrategy {
    let alice = vec![real_basis(0.0), real_basis(PI / 4.0)];
    let bob = vec![real_basis(PI / 8.0), real_basis(-PI / 8.0)];
    QuantumStrategy::maximally_entangled(2, alice, bob).expect("valid by construction")
}

fn pauli() -> [CMatrix; 4] {
    let r = |rows: &[&[f64]]| CMatrix::from_real_rows(rows);
    let i = Complex64::new(0.0, 1.0);
    let y = CMatrix::from_vec(2, 2, vec![0.0.into(), -i, i, 0.0.into()]).expect("2x2");
    [r(&[&[1.0, 0.0], &[0.0, 1.0]]), r(&[&[0.0, 1.0], &[1.0, 0.0]]), y, r(&[&[1.0, 0.0], &[0.0, -1.0]])]
}

/// The Mermin–Peres square of two-qubit observables. Each row multiplies
/// to `+I` and each column to `-I`; all entries are real symmetric.
pub fn magic_square_observables() -> [[CMatrix; 3]; 3] {
    let [i, x, y, z] = pauli();
    [
        [x.kron(&i), i.kron(&x), x.kron(&x)],
        [i.kron(&z), z.kron(&i), z.kron(&z)],
        [x.kron(&z).scale(-1.0), z.kron(&x).scale(-1.0), y.kron(&y)],
    ]
}

/// `Π_j (I + (-1)^{bit_j} O_j) / 2` over commuting observables.
fn joint_projector(observables: &[&CMatrix], bits: &[usize]) -> CMatrix {
    let id = CMatrix::identity(4);
    observables.iter().zip(bits).fold(id.clone(), |acc, (o, &bit)| {
        let sign = if bit == 0 { 1.0 } else { -1.0 };
        acc.matmul(&id.add(&o.scale(sign)).scale(0.5))
    })
}

/// The standard perfect magic-square strategy on two pairs of maximally
/// entangled qubits (`d = 4`). Alice measures the observables of row `x`
/// and Bob those of column `y`; Bob's projectors are transposed, which is
/// what makes his outcome for a shared cell equal Alice's.
pub fn magic_square_strategy() -> QuantumStrategy {
    let obs = magic_square_observables();
    let alice = (0..3)
        .map(|x| {
            let row: Vec<&CMatrix> = obs[x].iter().collect();
            (0..4).map(|a| joint_projector(&row, &magic_square_row_bits(a))).collect()
        })
        .collect();
    let bob = (0..3)
        .map(|y| {
            let col: Vec<&CMatrix> = (0..3).map(|x| &obs[x][y]).collect();
            (0..4).map(|b| joint_projector(&col, &magic_square_column_bits(b)).transpose()).collect()
        })
        .collect();
    QuantumStrategy::maximally_entangled(4, alice, bob).expect("valid by construction")
}

/// Runs deterministic strategies side by side: basis state `k` of a
/// `d = strategies.len()` maximally entangled state follows strategy `k`.
/// All projectors are diagonal, so they commute.
pub fn diagonal_strategy(g: &Game, strategies: &[ClassicalStrategy]) -> Result<QuantumStrategy> {
    if strategies.is_empty() {
        return Err(Error::invalid("strategies", "need at least one strategy"));
    }
    for s in strategies {
        s.check(g)?;
    }
    let d = strategies.len();
    let family = |answers: Vec<usize>, outcomes: usize| -> Vec<CMatrix> {
        (0..outcomes)
            .map(|o| {
                let mut p = CMatrix::zeros(d, d);
                for (k, &ans) in answers.iter().enumerate() {
                    if ans == o {
                        p[(k, k)] = Complex64::new(1.0, 0.0);
                    }
                }
                p
            })
            .collect()
    };
    let alice = (0..g.nx()).map(|x| family(strategies.iter().map(|s| s.alice[x]).collect(), g.na())).collect();
    let bob = (0..g.ny()).map(|y| family(strategies.iter().map(|s| s.bob[y]).collect(), g.nb())).collect();
    QuantumStrategy::maximally_entangled(d, alice, bob)
}

/// A classical independent set as a one-dimensional quantum independent
/// set: measurement `i` always outputs `set[i]`.
pub fn qis_from_independent_set(gg: &GameGraph, set: &[usize]) -> Result<QuantumIndependentSet> {
    if let Some(&v) = set.iter().find(|&&v| v >= gg.n()) {
        return Err(Error::IndexOutOfRange { name: "vertex", value: v, size: gg.n() });
    }
    let projectors = set
        .iter()
        .map(|&v| {
            let mut fam = vec![Matrix::zeros(1, 1); gg.n()];
            fam[v] = Matrix::identity(1);
            fam
        })
        .collect();
    QuantumIndependentSet::new(1, projectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magic_square_products() {
        let obs = magic_square_observables();
        let id = CMatrix::identity(4);
        for x in 0..3 {
            let p = obs[x][0].matmul(&obs[x][1]).matmul(&obs[x][2]);
            assert!(p.sub(&id).frobenius_norm() < 1e-15);
        }
        for y in 0..3 {
            let p = obs[0][y].matmul(&obs[1][y]).matmul(&obs[2][y]);
            assert!(p.add(&id).frobenius_norm() < 1e-15);
        }
        for row in &obs {
            for o in row {
                assert_eq!(o.max_imaginary(), 0.0);
                assert_eq!(*o, o.transpose());
            }
        }
    }
}
