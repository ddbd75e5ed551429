//! Proximal and projection operators shared by every solver.
//!
//! All functions take their inputs by reference and return fresh matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::Matrix;

const POWER_MAX_ITER: usize = 1000;
const POWER_REL_TOL: f64 = 1e-10;

pub(crate) fn ensure_finite(m: &Matrix, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} contains a non-finite entry")))
    }
}

#[inline]
pub(crate) fn shrink(v: f64, tau: f64) -> f64 {
    v.signum() * (v.abs() - tau).max(0.0)
}

/// Elementwise soft thresholding, the proximal map of `tau * |.|_1`.
pub fn soft_threshold(m: &Matrix, tau: f64) -> Result<Matrix> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "soft threshold must be finite and nonnegative, got {tau}"
        )));
    }
    ensure_finite(m, "soft_threshold input")?;
    Ok(m.map(|v| shrink(v, tau)))
}

/// Thin SVD `(U, sigma, V^T)`, mapping a non-converging decomposition to
/// [`Error::NumericalFailure`].
pub fn thin_svd(m: &Matrix) -> Result<(Matrix, DVector<f64>, Matrix)> {
    ensure_finite(m, "svd input")?;
    if m.nrows() == 0 || m.ncols() == 0 {
        let k = 0;
        return Ok((
            DMatrix::zeros(m.nrows(), k),
            DVector::zeros(k),
            DMatrix::zeros(k, m.ncols()),
        ));
    }
    let svd = nalgebra::SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let u = svd.u.ok_or_else(|| Error::NumericalFailure("SVD returned no U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::NumericalFailure("SVD returned no V^T".into()))?;
    Ok((u, svd.singular_values, v_t))
}

/// Singular values of `m` (unordered as returned by the decomposition).
pub fn singular_values(m: &Matrix) -> Result<DVector<f64>> {
    Ok(thin_svd(m)?.1)
}

/// Singular value thresholding, the proximal map of `tau * ||.||_*`.
pub fn svt(m: &Matrix, tau: f64) -> Result<Matrix> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "singular value threshold must be finite and nonnegative, got {tau}"
        )));
    }
    let (u, sigma, v_t) = thin_svd(m)?;
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (k, &s) in sigma.iter().enumerate() {
        let shrunk = s - tau;
        if shrunk > 0.0 {
            out += (u.column(k) * shrunk) * v_t.row(k);
        }
    }
    Ok(out)
}

/// Zeroes entries `(i, i)` for `i < n_diag`, leaving every other entry alone.
///
/// This is the Euclidean projection onto `{W : W_ii = 0, i < n_diag}`.
pub fn zero_diagonal_project(m: &Matrix, n_diag: usize) -> Result<Matrix> {
    let mut out = m.clone();
    zero_diagonal_in_place(&mut out, n_diag)?;
    Ok(out)
}

pub(crate) fn zero_diagonal_in_place(m: &mut Matrix, n_diag: usize) -> Result<()> {
    if n_diag > m.nrows().min(m.ncols()) {
        return Err(Error::InvalidParameter(format!(
            "cannot zero {n_diag} diagonal entries of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    for i in 0..n_diag {
        m[(i, i)] = 0.0;
    }
    Ok(())
}

/// Largest singular value.
///
/// Power iteration on `m^T m`, falling back to a full SVD when the iteration
/// does not settle within its budget.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    ensure_finite(m, "spectral_norm input")?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let gram = m.transpose() * m;
    let n = gram.ncols();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 + 1.0) / (n as f64 + 1.0));
    v.normalize_mut();

    let mut estimate = 0.0_f64;
    for _ in 0..POWER_MAX_ITER {
        let w = &gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            // start vector hit the null space; let the SVD decide
            break;
        }
        let next = v.dot(&w).max(0.0);
        v = w / norm;
        if (next - estimate).abs() <= POWER_REL_TOL * next.max(f64::MIN_POSITIVE) {
            // one more Rayleigh quotient with the refreshed vector
            let refined = v.dot(&(&gram * &v)).max(next);
            return Ok(refined.sqrt());
        }
        estimate = next;
    }
    Ok(singular_values(m)?.max())
}

/// Sum of singular values.
pub fn nuclear_norm(m: &Matrix) -> Result<f64> {
    Ok(singular_values(m)?.sum())
}

/// Entrywise l1 norm.
pub fn l1_norm(m: &Matrix) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}
