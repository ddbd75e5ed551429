//! Evaluation indices: accuracy, category concentration (CCI), relative
//! stability (RSI) and the least-squares perturbation bound.

use nalgebra::{DMatrix, DVector};

use crate::classifier::Label;
use crate::error::{Error, Result};
use crate::prox::thin_svd;
use crate::Matrix;

/// Fraction of exact matches; `Unclassified` never matches.
pub fn accuracy(pred: &[Label], truth: &[usize]) -> Result<f64> {
    if pred.is_empty() || pred.len() != truth.len() {
        return Err(Error::InvalidInput(format!(
            "accuracy needs equal nonempty lists, got {} predictions and {} labels",
            pred.len(),
            truth.len()
        )));
    }
    let hits = pred
        .iter()
        .zip(truth)
        .filter(|(p, t)| p.category() == Some(**t))
        .count();
    Ok(hits as f64 / pred.len() as f64)
}

/// `max_j ||delta_j(alpha)||_1 / ||alpha||_1` over labeled-sample
/// coefficients. `None` when `alpha` is all zero.
pub fn cci(alpha: &[f64], labels: &[usize]) -> Result<Option<f64>> {
    if alpha.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} coefficients for {} labels",
            alpha.len(),
            labels.len()
        )));
    }
    let total: f64 = alpha.iter().map(|a| a.abs()).sum();
    if total == 0.0 {
        return Ok(None);
    }
    let c = labels.iter().copied().max().unwrap_or(0);
    let mut mass = vec![0.0; c + 1];
    for (a, &l) in alpha.iter().zip(labels) {
        mass[l] += a.abs();
    }
    let best = mass.iter().cloned().fold(0.0, f64::max);
    Ok(Some(best / total))
}

/// Mean CCI over the labeled block of each column of a coefficient matrix,
/// skipping all-zero columns. `None` when no column is defined.
pub fn mean_cci(z: &Matrix, labels: &[usize]) -> Result<Option<f64>> {
    let s_c = labels.len();
    if z.nrows() < s_c {
        return Err(Error::InvalidInput("coefficient matrix shorter than label list".into()));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for col in z.column_iter() {
        let alpha: Vec<f64> = col.rows(0, s_c).iter().copied().collect();
        if let Some(v) = cci(&alpha, labels)? {
            sum += v;
            n += 1;
        }
    }
    Ok((n > 0).then(|| sum / n as f64))
}

/// Accuracies `a[i, j]` of model `i` in environment `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsMatrix {
    pub values: Matrix,
    pub model_names: Vec<String>,
    pub environment_labels: Vec<String>,
}

impl ResultsMatrix {
    pub fn new(values: Matrix, model_names: Vec<String>, environment_labels: Vec<String>) -> Result<Self> {
        if values.nrows() != model_names.len() || values.ncols() != environment_labels.len() {
            return Err(Error::InvalidInput("results shape does not match its labels".into()));
        }
        if values.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidInput("accuracies must lie in [0, 1]".into()));
        }
        Ok(Self {
            values,
            model_names,
            environment_labels,
        })
    }
}

/// Reference maximum for RSI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RsiScope {
    /// Best accuracy within the same environment (column).
    #[default]
    Column,
    /// Best accuracy anywhere in the matrix.
    Global,
}

/// `(M - a[i, j]) / a[i, j]`. Entries with `a[i, j] = 0` are `None`.
pub fn rsi(results: &ResultsMatrix, scope: RsiScope) -> DMatrix<Option<f64>> {
    let a = &results.values;
    let global = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        let reference = match scope {
            RsiScope::Column => a.column(j).max(),
            RsiScope::Global => global,
        };
        let v = a[(i, j)];
        (v > 0.0).then(|| reference / v - 1.0)
    })
}

/// One evaluation of the perturbation bound
/// `||Z2 - Z1|| / ||Z1|| <= eps (2 k / cos t + tan t k^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub epsilon: f64,
    pub kappa2: f64,
    /// Angle between `x` and `range(V)`, in radians.
    pub theta: f64,
    /// `epsilon <= 1 / kappa2` and `sin(theta) != 1`.
    pub admissible: bool,
}

impl StabilityCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

const RANK_TOL: f64 = 1e-12;

/// Compares the least-squares codes of `x` over `V` and of `x + dx` over
/// `V + dV` against the first-order bound.
pub fn stability_bound(v: &Matrix, x: &DVector<f64>, dx: &DVector<f64>, dv: &Matrix) -> Result<StabilityCheck> {
    if x.len() != v.nrows() || dx.len() != x.len() || dv.shape() != v.shape() {
        return Err(Error::InvalidInput("perturbation shapes do not match".into()));
    }
    if x.norm() == 0.0 {
        return Err(Error::InvalidInput("x must be nonzero".into()));
    }
    if v.ncols() > v.nrows() {
        return Err(Error::RankDeficient);
    }
    let (u, sigma, v_t) = thin_svd(v)?;
    let phi_1 = sigma.max();
    let phi_n = sigma.min();
    if !(phi_n > RANK_TOL * phi_1) {
        return Err(Error::RankDeficient);
    }
    let pinv_apply = |u: &Matrix, s: &DVector<f64>, vt: &Matrix, b: &DVector<f64>| {
        let coef = u.transpose() * b;
        let scaled = DVector::from_fn(s.len(), |k, _| coef[k] / s[k]);
        vt.transpose() * scaled
    };
    let z1 = pinv_apply(&u, &sigma, &v_t, x);

    let v2 = v + dv;
    let (u2, sigma2, v2_t) = thin_svd(&v2)?;
    if !(sigma2.min() > RANK_TOL * sigma2.max()) {
        return Err(Error::RankDeficient);
    }
    let z2 = pinv_apply(&u2, &sigma2, &v2_t, &(x + dx));

    let dv_norm = if dv.iter().all(|e| *e == 0.0) {
        0.0
    } else {
        thin_svd(dv)?.1.max()
    };
    let epsilon = (dx.norm() / x.norm()).max(dv_norm / phi_1);
    let kappa2 = phi_1 / phi_n;
    let rho = (v * &z1 - x).norm();
    let sin_t = (rho / x.norm()).min(1.0);
    let cos_t = (1.0 - sin_t * sin_t).max(0.0).sqrt();
    let theta = sin_t.asin();
    let z1_norm = z1.norm();
    let lhs = if z1_norm > 0.0 {
        (&z2 - &z1).norm() / z1_norm
    } else {
        f64::INFINITY
    };
    let rhs = if cos_t > 0.0 {
        epsilon * (2.0 * kappa2 / cos_t + (sin_t / cos_t) * kappa2 * kappa2)
    } else {
        f64::INFINITY
    };
    Ok(StabilityCheck {
        lhs,
        rhs,
        epsilon,
        kappa2,
        theta,
        admissible: epsilon <= 1.0 / kappa2 && sin_t < 1.0,
    })
}
