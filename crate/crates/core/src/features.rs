//! Eigenface projection and column normalization.
//!
//! The basis is fitted on labeled samples only, centered by their mean.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::prox::thin_svd;
use crate::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenfaceBasis {
    /// `d x p`, orthonormal columns ordered by decreasing variance.
    pub u: Matrix,
    pub mean: DVector<f64>,
}

impl EigenfaceBasis {
    pub fn dim(&self) -> usize {
        self.u.ncols()
    }

    pub fn input_dim(&self) -> usize {
        self.u.nrows()
    }
}

/// Projected, unit-normalized columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    pub data: Matrix,
    /// Columns that projected to zero and were left unnormalized.
    pub zero_columns: Vec<usize>,
}

pub fn fit_eigenfaces(x: &Matrix, p: usize) -> Result<EigenfaceBasis> {
    let (d, s_c) = x.shape();
    if s_c < 2 {
        return Err(Error::InvalidInput("need at least two labeled samples".into()));
    }
    if p == 0 || p > d.min(s_c) {
        return Err(Error::InvalidParameter(format!(
            "feature dimension {p} must lie in 1..={}",
            d.min(s_c)
        )));
    }
    let mean = x.column_mean();
    let mut centered = x.clone();
    for mut col in centered.column_iter_mut() {
        col -= &mean;
    }
    if centered.norm() <= 1e-12 * x.norm().max(1.0) {
        return Err(Error::DegenerateData("labeled samples have zero variance".into()));
    }
    let (u, sigma, _) = thin_svd(&centered)?;
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));
    let mut basis = DMatrix::zeros(d, p);
    for (k, &idx) in order.iter().take(p).enumerate() {
        basis.set_column(k, &u.column(idx));
    }
    Ok(EigenfaceBasis { u: basis, mean })
}

/// Centers, projects onto the basis, then scales each column to unit norm.
pub fn transform(basis: &EigenfaceBasis, m: &Matrix) -> Result<Features> {
    if m.nrows() != basis.input_dim() {
        return Err(Error::InvalidInput(format!(
            "basis expects {} rows, got {}",
            basis.input_dim(),
            m.nrows()
        )));
    }
    let mut centered = m.clone();
    for mut col in centered.column_iter_mut() {
        col -= &basis.mean;
    }
    Ok(normalize_columns(basis.u.transpose() * centered))
}

/// Unit l2 normalization; exact-zero columns are flagged instead.
pub fn normalize_columns(mut data: Matrix) -> Features {
    let mut zero_columns = Vec::new();
    for (j, mut col) in data.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm <= 1e-14 {
            zero_columns.push(j);
        } else {
            col /= norm;
        }
    }
    Features { data, zero_columns }
}
