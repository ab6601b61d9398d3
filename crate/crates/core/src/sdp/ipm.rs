//! Primal-dual interior-point refinement for small SDPs.
//!
//! Infeasible-start path following with the HKM search direction and a
//! Mehrotra predictor-corrector step. ADMM hands over to this when it
//! stalls on a degenerate instance: the optimal face is then known only
//! to the accuracy of the dual, and a feasible primal inside it cannot be
//! recovered by projection alone.

use crate::linalg::{cholesky, cholesky_solve, jacobi_eigh, lower_inverse, Matrix, SymMatrix};

/// A symmetric constraint matrix given by its nonzero entries, both
/// triangles listed.
pub(super) struct Constraint {
    pub entries: Vec<(usize, usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    fn apply(&self, m: &Matrix) -> f64 {
        self.entries.iter().map(|&(i, j, v)| v * m[(i, j)]).sum()
    }

    fn add_to(&self, m: &mut Matrix, scale: f64) {
        for &(i, j, v) in &self.entries {
            m[(i, j)] += scale * v;
        }
    }
}

const MAX_STEPS: usize = 80;
const REFINE: usize = 6;
/// Iterates are offered once every relative residual is below this.
const OFFER: f64 = 1e-7;

fn sym(m: Matrix) -> Matrix {
    let t = m.transpose();
    m.add(&t).scale(0.5)
}

/// Largest step in `[0, 1]` along `d` keeping `L Lᵀ + t d` PSD, times `gamma`.
fn step_length(l: &Matrix, d: &Matrix, gamma: f64) -> f64 {
    let li = lower_inverse(l);
    let t = SymMatrix::symmetrize(li.matmul(d).matmul(&li.transpose()));
    let lmin = jacobi_eigh(&t).values[0];
    if lmin >= 0.0 {
        1.0
    } else {
        (gamma / -lmin).min(1.0)
    }
}

/// `Mᵢⱼ = ⟨Aᵢ, G Aⱼ H⟩` for symmetric `G`, `H`.
fn schur(cons: &[Constraint], g: &Matrix, h: &Matrix) -> Matrix {
    let p = cons.len();
    let mut m = Matrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let mut v = 0.0;
            for &(a, b, va) in &cons[i].entries {
                for &(c, d, vc) in &cons[j].entries {
                    v += va * vc * g[(a, c)] * h[(d, b)];
                }
            }
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Removes the primal residual `rp` with the correction `X Aᵀ(z) X` of
/// least norm in the metric of `X`. Relative to `X` the change is of the
/// size of the residual, so the result stays PSD while an unscaled
/// projection would push the small eigenvalues negative.
fn restore_feasibility(x: &Matrix, cons: &[Constraint], rp: &[f64]) -> Option<Matrix> {
    let l = cholesky(&schur(cons, x, x))?;
    let z = cholesky_solve(&l, rp);
    let mut az = Matrix::zeros(x.rows(), x.rows());
    for (k, zk) in cons.iter().zip(&z) {
        k.add_to(&mut az, *zk);
    }
    Some(sym(x.add(&x.matmul(&az).matmul(x))))
}

/// Maximizes `⟨C, X⟩` subject to the constraints and `X ⪰ 0`.
///
/// Each iterate close enough to the optimum is offered to `accept` as a
/// nearly feasible primal `X` and multipliers `y` for which `Σ y_i A_i - C`
/// is nearly PSD. The run stops once `accept` returns true; the result
/// says whether it did. Late iterates can lose primal feasibility to
/// rounding, so the caller, not this loop, decides which one is good.
pub(super) fn solve(
    c: &SymMatrix,
    cons: &[Constraint],
    mut accept: impl FnMut(&Matrix, &[f64]) -> bool,
) -> bool {
    let n = c.n();
    let p = cons.len();
    // Internally: minimize ⟨-C, X⟩, dual max bᵀy with Aᵀy + S = -C.
    let cmin = c.matrix().scale(-1.0);
    let b: Vec<f64> = cons.iter().map(|k| k.rhs).collect();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cnorm = cmin.frobenius_norm();
    let anorm = cons
        .iter()
        .map(|k| k.entries.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let root_n = (n as f64).sqrt();
    let zeta = cons
        .iter()
        .zip(&b)
        .map(|(k, bi)| {
            let norm = k.entries.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt();
            n as f64 * (1.0 + bi.abs()) / (1.0 + norm)
        })
        .fold(root_n.max(10.0), f64::max);
    let eta = root_n.max(10.0).max(cnorm).max(anorm);
    let mut x = Matrix::identity(n).scale(zeta);
    let mut s = Matrix::identity(n).scale(eta);
    let mut y = vec![0.0; p];

    let aty = |v: &[f64]| {
        let mut m = Matrix::zeros(n, n);
        for (k, vi) in cons.iter().zip(v) {
            k.add_to(&mut m, *vi);
        }
        m
    };

    for _ in 0..MAX_STEPS {
        let rp: Vec<f64> = cons.iter().zip(&b).map(|(k, bi)| bi - k.apply(&x)).collect();
        let rd = cmin.sub(&s).sub(&aty(&y));
        let mu = x.dot(&s) / n as f64;
        let pobj = cmin.dot(&x);
        let dobj: f64 = b.iter().zip(&y).map(|(a, c)| a * c).sum();
        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + bnorm);
        let dinf = rd.frobenius_norm() / (1.0 + cnorm);
        let rgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf.max(dinf).max(rgap) < OFFER {
            let multipliers: Vec<f64> = y.iter().map(|v| -v).collect();
            let offered = restore_feasibility(&x, cons, &rp).unwrap_or_else(|| x.clone());
            if accept(&offered, &multipliers) {
                return true;
            }
        }
        let (Some(lx), Some(ls)) = (cholesky(&x), cholesky(&s)) else {
            break;
        };
        let lsi = lower_inverse(&ls);
        let sinv = lsi.transpose().matmul(&lsi);

        // Schur complement M_ij = ⟨A_i, X A_j S⁻¹⟩.
        let mut m = schur(cons, &x, &sinv);
        let lm = match cholesky(&m) {
            Some(l) => l,
            None => {
                let bump = 1e-14 * (0..p).map(|i| m[(i, i)]).fold(0.0, f64::max).max(1e-300);
                for i in 0..p {
                    m[(i, i)] += bump;
                }
                match cholesky(&m) {
                    Some(l) => l,
                    None => break,
                }
            }
        };
        let xrs = x.matmul(&rd).matmul(&sinv);
        let direction = |sigma: f64, corr: Option<&Matrix>| {
            // ΔX = σμS⁻¹ - X - sym(X ΔS S⁻¹) - corr, with A(ΔX) = Rp.
            let mut base = sinv.scale(sigma * mu).sub(&x).sub(&xrs);
            if let Some(k) = corr {
                base = base.sub(k);
            }
            let rhs: Vec<f64> = cons.iter().zip(&rp).map(|(k, r)| r - k.apply(&base)).collect();
            let mut dy = cholesky_solve(&lm, &rhs);
            let assemble = |dy: &[f64]| {
                let ds = rd.sub(&aty(dy));
                let mut dx = sinv.scale(sigma * mu).sub(&x).sub(&sym(x.matmul(&ds).matmul(&sinv)));
                if let Some(k) = corr {
                    dx = dx.sub(k);
                }
                (dx, ds)
            };
            let (mut dx, mut ds) = assemble(&dy);
            // M is badly conditioned near a degenerate optimum; refining
            // against A(ΔX) itself keeps the primal residual at rounding level.
            for _ in 0..REFINE {
                let err: Vec<f64> = cons.iter().zip(&rp).map(|(k, r)| r - k.apply(&dx)).collect();
                let fix = cholesky_solve(&lm, &err);
                dy.iter_mut().zip(&fix).for_each(|(a, b)| *a += b);
                (dx, ds) = assemble(&dy);
            }
            (dx, dy, ds)
        };

        let (dxa, _, dsa) = direction(0.0, None);
        let ap = step_length(&lx, &dxa, 1.0);
        let ad = step_length(&ls, &dsa, 1.0);
        let mu_aff = x.add(&dxa.scale(ap)).dot(&s.add(&dsa.scale(ad))) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let corr = sym(dxa.matmul(&dsa).matmul(&sinv));
        let (dx, dy, ds) = direction(sigma, Some(&corr));
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let ap = step_length(&lx, &dx, gamma);
        let ad = step_length(&ls, &ds, gamma);
        x = sym(x.add(&dx.scale(ap)));
        s = sym(s.add(&ds.scale(ad)));
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += ad * d;
        }
    }
    false
}
