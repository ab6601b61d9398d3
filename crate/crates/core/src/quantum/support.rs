use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigh, SymMatrix};

use super::cmatrix::CMatrix;

/// Default relative eigenvalue threshold for [`supp`].
pub const DEFAULT_SUPP_TOL: f64 = 1e-8;

/// Projector onto the column space of a PSD matrix: the span of the
/// eigenvectors with eigenvalue above `tol · λ_max`. Errors when an
/// eigenvalue is below `-tol · max(λ_max, 1)`.
pub fn supp(m: &SymMatrix, tol: f64) -> Result<SymMatrix> {
    let n = m.n();
    if n == 0 {
        return Ok(SymMatrix::zeros(0));
    }
    let e = jacobi_eigh(m);
    let lmin = e.values[0];
    let lmax = e.values[n - 1];
    if lmin < -tol * lmax.max(1.0) {
        return Err(Error::NotPsd { min_eigenvalue: lmin });
    }
    if lmax <= 0.0 {
        return Ok(SymMatrix::zeros(n));
    }
    let cut = tol * lmax;
    Ok(e.reconstruct(|l| if l > cut { 1.0 } else { 0.0 }))
}

/// [`supp`] for Hermitian matrices, through the real `2n × 2n` embedding.
pub fn supp_hermitian(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let asym = m.sub(&m.adjoint()).frobenius_norm();
    if asym > 1e-12 * m.frobenius_norm().max(1.0) {
        return Err(Error::DimensionMismatch(format!("matrix is not Hermitian (|M - M*| = {asym:e})")));
    }
    let real = SymMatrix::symmetrize(m.realify());
    Ok(CMatrix::from_realified(supp(&real, tol)?.matrix()))
}

/// Checks `⟨v|supp(M+N)|v⟩ ≥ ⟨v|supp(M)|v⟩ - 1e-9` for PSD `M`, `N`.
pub fn check_lemma1(m: &SymMatrix, n: &SymMatrix, v: &[f64]) -> Result<bool> {
    if m.n() != n.n() || v.len() != m.n() {
        return Err(Error::DimensionMismatch(format!(
            "M is {0}x{0}, N is {1}x{1}, v has length {2}",
            m.n(),
            n.n(),
            v.len()
        )));
    }
    let left = supp(&m.add(n), DEFAULT_SUPP_TOL)?.matrix().quadratic_form(v);
    supp(n, DEFAULT_SUPP_TOL)?;
    let right = supp(m, DEFAULT_SUPP_TOL)?.matrix().quadratic_form(v);
    Ok(left >= right - 1e-9)
}
