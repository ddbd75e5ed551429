//! Positive-projection SRC baselines: each query is coded over the labeled
//! samples (optionally plus the other unlabeled samples) by an l1-penalized
//! least-squares fit and assigned to the category with the smallest
//! class-restricted reconstruction residual.

use nalgebra::{DMatrix, DVector};

use crate::classifier::Label;
use crate::error::{Error, Result};
use crate::prox::{shrink, spectral_norm};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoConfig {
    pub lambda: f64,
    pub max_iter: usize,
    /// Stop when `||g^{k+1} - g^k||_2 <= tol * max(||g^k||_2, 1)`.
    pub tol: f64,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            max_iter: 5000,
            tol: 1e-8,
        }
    }
}

impl LassoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() || self.max_iter == 0 || !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(
                "lasso needs lambda > 0, max_iter >= 1, tol > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrcDecision {
    pub label: Label,
    /// `||y - X delta_j(gamma)||_2` per category.
    pub residuals: Vec<f64>,
}

/// Proximal gradient (ISTA) for `1/2 ||X g - y||^2 + lambda ||g||_1` with
/// step `1 / ||X^T X||_2`.
pub fn solve_src(x: &Matrix, y: &DVector<f64>, cfg: &LassoConfig) -> Result<DVector<f64>> {
    if y.len() != x.nrows() {
        return Err(Error::InvalidInput(format!(
            "query has {} entries, dictionary has {} rows",
            y.len(),
            x.nrows()
        )));
    }
    cfg.validate()?;
    let n = x.ncols();
    let gram = x.transpose() * x;
    let xty = x.transpose() * y;
    let lipschitz = spectral_norm(&gram)?;
    let mut g = DVector::zeros(n);
    if lipschitz == 0.0 {
        return Ok(g);
    }
    let step = 1.0 / lipschitz;
    for _ in 0..cfg.max_iter {
        let grad = &gram * &g - &xty;
        let next = (&g - grad * step).map(|v| shrink(v, cfg.lambda * step));
        let change = (&next - &g).norm();
        let scale = g.norm().max(1.0);
        g = next;
        if change <= cfg.tol * scale {
            break;
        }
    }
    Ok(g)
}

/// Lasso over `[X | Y]`, dropping column `exclude` of `Y` (normally the
/// query itself). The returned vector is aligned with that reduced
/// dictionary: first `s_c` entries for `X`, then the kept `Y` columns.
pub fn solve_src_plus_test(
    x: &Matrix,
    unlabeled: &Matrix,
    y: &DVector<f64>,
    exclude: Option<usize>,
    cfg: &LassoConfig,
) -> Result<DVector<f64>> {
    if unlabeled.nrows() != x.nrows() {
        return Err(Error::InvalidInput("X and Y row counts differ".into()));
    }
    let keep: Vec<usize> = (0..unlabeled.ncols()).filter(|&l| Some(l) != exclude).collect();
    let s_c = x.ncols();
    let mut dict = DMatrix::zeros(x.nrows(), s_c + keep.len());
    dict.columns_mut(0, s_c).copy_from(x);
    for (k, &l) in keep.iter().enumerate() {
        dict.set_column(s_c + k, &unlabeled.column(l));
    }
    solve_src(&dict, y, cfg)
}

/// Minimum class-restricted residual over the labeled block of `gamma`
/// (its first `labels.len()` entries).
pub fn classify_src(
    x: &Matrix,
    labels: &[usize],
    gamma: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<SrcDecision> {
    let s_c = x.ncols();
    if labels.len() != s_c || gamma.len() < s_c || y.len() != x.nrows() {
        return Err(Error::InvalidInput("shapes of X, labels, gamma and y disagree".into()));
    }
    let c = labels.iter().copied().max().unwrap_or(0);
    let mut residuals = Vec::with_capacity(c);
    for j in 1..=c {
        let masked = DVector::from_fn(s_c, |i, _| if labels[i] == j { gamma[i] } else { 0.0 });
        residuals.push((y - x * masked).norm());
    }
    if gamma.rows(0, s_c).iter().all(|g| *g == 0.0) {
        return Ok(SrcDecision {
            label: Label::Unclassified,
            residuals,
        });
    }
    let mut best = 0;
    for j in 1..residuals.len() {
        if residuals[j] < residuals[best] {
            best = j;
        }
    }
    Ok(SrcDecision {
        label: Label::Category(best + 1),
        residuals,
    })
}
