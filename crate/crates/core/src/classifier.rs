//! Category contribution rate classification of unlabeled samples.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::Matrix;

/// Predicted category (1-based) or the sentinel for samples whose
/// representation carried no coefficient mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Category(usize),
    Unclassified,
}

impl Label {
    pub fn category(&self) -> Option<usize> {
        match self {
            Label::Category(j) => Some(*j),
            Label::Unclassified => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Category(j) => write!(f, "{j}"),
            Label::Unclassified => f.write_str("?"),
        }
    }
}

/// `c x m` membership scores plus, per unlabeled sample, whether the
/// score column is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct CcrMatrix {
    pub values: Matrix,
    pub defined: Vec<bool>,
}

/// Coefficients of the unlabeled atoms: entry `(l, i)` is the weight of
/// `y_l` in the representation of labeled sample `x_i`.
pub fn extract_beta(z: &Matrix, s_c: usize, m: usize) -> Result<Matrix> {
    if z.shape() != (s_c + m, s_c) {
        return Err(Error::InvalidInput(format!(
            "coefficient matrix is {:?}, expected ({}, {s_c})",
            z.shape(),
            s_c + m
        )));
    }
    Ok(z.rows(s_c, m).into_owned())
}

/// `C[j, l] = (1/n_j) * sum_{i in j} |beta[l, i]| / sum_i |beta[l, i]|`.
///
/// Coefficients enter by magnitude so that signed weights cannot cancel.
/// Rows of `beta` with no mass produce an all-zero, undefined column.
pub fn ccr(beta: &Matrix, labels: &[usize], counts: &[usize]) -> Result<CcrMatrix> {
    if labels.len() != beta.ncols() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} labeled coefficients",
            labels.len(),
            beta.ncols()
        )));
    }
    let c = counts.len();
    if labels.iter().any(|&l| l == 0 || l > c) || counts.iter().any(|&n| n == 0) {
        return Err(Error::InvalidInput("labels and category counts disagree".into()));
    }
    let m = beta.nrows();
    let mut values = DMatrix::zeros(c, m);
    let mut defined = vec![false; m];
    for l in 0..m {
        let row = beta.row(l);
        let total: f64 = row.iter().map(|b| b.abs()).sum();
        if total == 0.0 || !total.is_finite() {
            continue;
        }
        defined[l] = true;
        for (i, &label) in labels.iter().enumerate() {
            values[(label - 1, l)] += row[i].abs();
        }
        for j in 0..c {
            values[(j, l)] /= total * counts[j] as f64;
        }
    }
    Ok(CcrMatrix { values, defined })
}

/// Argmax per column, lowest category index on ties.
pub fn assign_labels(ccr: &CcrMatrix) -> Vec<Label> {
    (0..ccr.values.ncols())
        .map(|l| {
            if !ccr.defined[l] {
                return Label::Unclassified;
            }
            let col = ccr.values.column(l);
            let mut best = 0;
            for j in 1..col.len() {
                if col[j] > col[best] {
                    best = j;
                }
            }
            Label::Category(best + 1)
        })
        .collect()
}
