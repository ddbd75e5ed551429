//! End-to-end classification for every compared method.

use nalgebra::DMatrix;

use crate::baselines::{classify_src, solve_src, solve_src_plus_test, LassoConfig};
use crate::classifier::{assign_labels, ccr, extract_beta, CcrMatrix, Label};
use crate::error::{Error, Result};
use crate::features::{fit_eigenfaces, transform, EigenfaceBasis};
use crate::metrics::{cci, mean_cci};
use crate::model::{Dataset, ModelKind, Regularization};
use crate::solver::{solve, Solution, SolverConfig};
use crate::Matrix;

/// Classification methods available to experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Src,
    SrcPlusTest,
    SPfsr,
    LrPfsr,
    LrSPfsr,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Src,
        Method::SrcPlusTest,
        Method::SPfsr,
        Method::LrPfsr,
        Method::LrSPfsr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Src => "SRC",
            Method::SrcPlusTest => "SRC+test",
            Method::SPfsr => "S-PFSRC",
            Method::LrPfsr => "LR-PFSRC",
            Method::LrSPfsr => "LR-S-PFSRC",
        }
    }

    pub fn model(&self) -> Option<ModelKind> {
        match self {
            Method::Src | Method::SrcPlusTest => None,
            Method::SPfsr => Some(ModelKind::Sparse),
            Method::LrPfsr => Some(ModelKind::LowRank),
            Method::LrSPfsr => Some(ModelKind::LowRankSparse),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase();
        let key = key.strip_suffix('C').filter(|k| k.ends_with("PFSR")).unwrap_or(&key);
        match key {
            "SRC" => Ok(Method::Src),
            "SRC+TEST" => Ok(Method::SrcPlusTest),
            "S-PFSR" => Ok(Method::SPfsr),
            "LR-PFSR" => Ok(Method::LrPfsr),
            "LR-S-PFSR" => Ok(Method::LrSPfsr),
            _ => Err(Error::InvalidParameter(format!("unknown method '{s}'"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// Eigenface dimension; 0 passes samples through untouched.
    pub feature_dim: usize,
    pub reg: Regularization,
    pub solver: SolverConfig,
    pub lasso: LassoConfig,
    /// SRC+test drops the query from its own dictionary unless this is set.
    pub include_query: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            feature_dim: 0,
            reg: Regularization::default(),
            solver: SolverConfig::default(),
            lasso: LassoConfig::default(),
            include_query: false,
        }
    }
}

/// Dataset after optional feature extraction.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub dataset: Dataset,
    pub basis: Option<EigenfaceBasis>,
    pub zero_labeled: Vec<usize>,
    pub zero_unlabeled: Vec<usize>,
}

/// Fits eigenfaces on the labeled samples and projects both sets, or
/// passes the data through when `dim == 0`.
pub fn prepare(ds: &Dataset, dim: usize) -> Result<Prepared> {
    if dim == 0 {
        return Ok(Prepared {
            dataset: ds.clone(),
            basis: None,
            zero_labeled: Vec::new(),
            zero_unlabeled: Vec::new(),
        });
    }
    let basis = fit_eigenfaces(ds.labeled(), dim)?;
    let x = transform(&basis, ds.labeled())?;
    let y = transform(&basis, ds.unlabeled())?;
    Ok(Prepared {
        dataset: ds.with_samples(x.data, y.data)?,
        basis: Some(basis),
        zero_labeled: x.zero_columns,
        zero_unlabeled: y.zero_columns,
    })
}

#[derive(Debug, Clone)]
pub struct PfsrOutcome {
    pub solution: Solution,
    pub ccr: CcrMatrix,
    pub predictions: Vec<Label>,
}

/// Solves the representation problem for `model` and labels every
/// unlabeled column by its category contribution rate.
pub fn classify_pfsr(ds: &Dataset, model: ModelKind, cfg: &PipelineConfig) -> Result<PfsrOutcome> {
    if ds.n_unlabeled() == 0 {
        return Err(Error::NoUnlabeled);
    }
    let p = ds.problem(model, cfg.reg)?;
    let solution = solve(&p, &cfg.solver)?;
    let (ccr, predictions) = labels_from_coefficients(&solution.z, ds.labels(), ds.counts())?;
    Ok(PfsrOutcome {
        solution,
        ccr,
        predictions,
    })
}

/// CCR matrix and predictions from a solved `(s_c + m) x s_c` coefficient
/// matrix.
pub fn labels_from_coefficients(z: &Matrix, labels: &[usize], counts: &[usize]) -> Result<(CcrMatrix, Vec<Label>)> {
    let s_c = labels.len();
    if z.ncols() != s_c || z.nrows() < s_c {
        return Err(Error::InvalidInput(format!(
            "coefficient matrix {:?} does not match {s_c} labeled samples",
            z.shape()
        )));
    }
    let m = z.nrows() - s_c;
    if m == 0 {
        return Err(Error::NoUnlabeled);
    }
    let beta = extract_beta(z, s_c, m)?;
    let ccr = ccr(&beta, labels, counts)?;
    let predictions = assign_labels(&ccr);
    Ok((ccr, predictions))
}

#[derive(Debug, Clone)]
pub struct SrcOutcome {
    /// Labeled-block codes, one column per unlabeled sample.
    pub codes: Matrix,
    pub predictions: Vec<Label>,
}

/// SRC (or SRC+test) applied to every unlabeled column.
pub fn classify_src_all(ds: &Dataset, plus_test: bool, cfg: &PipelineConfig) -> Result<SrcOutcome> {
    if ds.n_unlabeled() == 0 {
        return Err(Error::NoUnlabeled);
    }
    let x = ds.labeled();
    let s_c = ds.n_labeled();
    let mut codes = DMatrix::zeros(s_c, ds.n_unlabeled());
    let mut predictions = Vec::with_capacity(ds.n_unlabeled());
    for l in 0..ds.n_unlabeled() {
        let y = ds.unlabeled().column(l).into_owned();
        let gamma = if plus_test {
            let exclude = (!cfg.include_query).then_some(l);
            solve_src_plus_test(x, ds.unlabeled(), &y, exclude, &cfg.lasso)?
        } else {
            solve_src(x, &y, &cfg.lasso)?
        };
        let decision = classify_src(x, ds.labels(), &gamma, &y)?;
        codes.set_column(l, &gamma.rows(0, s_c));
        predictions.push(decision.label);
    }
    Ok(SrcOutcome { codes, predictions })
}

/// Summary of one method on one dataset.
#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub method: Method,
    pub predictions: Vec<Label>,
    /// Mean CCI of the labeled-block coefficient vectors.
    pub mean_cci: Option<f64>,
    /// Solver convergence flag for the representation methods.
    pub converged: Option<bool>,
}

pub fn run_method(ds: &Dataset, method: Method, cfg: &PipelineConfig) -> Result<MethodOutcome> {
    let prepared = prepare(ds, cfg.feature_dim)?;
    let ds = &prepared.dataset;
    match method.model() {
        Some(model) => {
            let out = classify_pfsr(ds, model, cfg)?;
            Ok(MethodOutcome {
                method,
                mean_cci: mean_cci(&out.solution.z, ds.labels())?,
                converged: Some(out.solution.converged),
                predictions: out.predictions,
            })
        }
        None => {
            let out = classify_src_all(ds, method == Method::SrcPlusTest, cfg)?;
            let mut sum = 0.0;
            let mut n = 0;
            for col in out.codes.column_iter() {
                let alpha: Vec<f64> = col.iter().copied().collect();
                if let Some(v) = cci(&alpha, ds.labels())? {
                    sum += v;
                    n += 1;
                }
            }
            Ok(MethodOutcome {
                method,
                mean_cci: (n > 0).then(|| sum / n as f64),
                converged: None,
                predictions: out.predictions,
            })
        }
    }
}
