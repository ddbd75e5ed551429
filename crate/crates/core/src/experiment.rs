//! Sweep harness: accuracy of several methods as the per-category labeled
//! or unlabeled count varies, averaged over seeded repetitions.
//!
//! A plan is a `key=value` file:
//!
//! ```text
//! source = synth            # or: files
//! synth.categories = 3      # synth.subdim, synth.ambient, synth.labeled,
//! synth.unlabeled = 4       # synth.noise, synth.seed
//! # x = X.csv  labels = labels.txt  y = Y.csv  y_labels = Y_labels.txt
//! models = SRC, LR-S-PFSR
//! sweep = labeled_count     # or: unlabeled_count
//! values = 6, 4, 2
//! fixed_count = 4           # count of the axis not being swept
//! seeds = 1, 2, 3
//! dim = 0
//! lambda1 = 10              # lambda2, delta, mu1, mu2, eta, max_iter,
//!                           # tol, tol_dz, src_lambda, src_max_iter, src_tol
//! ```
//!
//! Relative paths resolve against the plan's directory. Each category's
//! pool is the union of its labeled and unlabeled samples. For a seed, each
//! pool is shuffled (categories in order, one ChaCha8 stream per seed); the
//! first `L` shuffled samples are labeled and the last `U` are unlabeled, so
//! every method and sweep value of one repetition shares the same split
//! family.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::datagen::{generate, SynthSpec};
use crate::error::{Error, Result};
use crate::io::{load_labels, load_matrix, Manifest};
use crate::metrics::{accuracy, rsi, ResultsMatrix, RsiScope};
use crate::model::{Dataset, Regularization};
use crate::pipeline::{run_method, Method, PipelineConfig};
use crate::solver::SolverConfig;
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    LabeledCount,
    UnlabeledCount,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::LabeledCount => "labeled_count",
            SweepAxis::UnlabeledCount => "unlabeled_count",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "labeled_count" => Ok(SweepAxis::LabeledCount),
            "unlabeled_count" => Ok(SweepAxis::UnlabeledCount),
            other => Err(Error::InvalidParameter(format!("unknown sweep axis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synth(SynthSpec),
    Files {
        x: PathBuf,
        labels: PathBuf,
        y: Option<PathBuf>,
        y_labels: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub source: DataSource,
    pub models: Vec<Method>,
    pub axis: SweepAxis,
    pub values: Vec<usize>,
    pub fixed_count: usize,
    pub seeds: Vec<u64>,
    pub pipeline: PipelineConfig,
}

fn list<T: std::str::FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse '{s}'")))
        })
        .collect()
}

fn scalar<T: std::str::FromStr>(m: &Manifest, key: &str, default: T) -> Result<T> {
    match m.get(key) {
        None => Ok(default),
        Some(raw) => raw
            .parse::<T>()
            .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse '{raw}'"))),
    }
}

const KNOWN_KEYS: &[&str] = &[
    "source", "synth.categories", "synth.subdim", "synth.ambient", "synth.labeled",
    "synth.unlabeled", "synth.noise", "synth.seed", "x", "labels", "y", "y_labels",
    "models", "sweep", "values", "fixed_count", "seeds", "dim", "lambda1", "lambda2",
    "delta", "mu1", "mu2", "eta", "max_iter", "tol", "tol_dz", "src_lambda",
    "src_max_iter", "src_tol",
];

impl ExperimentPlan {
    /// `base` resolves relative file paths.
    pub fn from_manifest(m: &Manifest, base: &Path) -> Result<Self> {
        if let Some((k, _)) = m.entries().iter().find(|(k, _)| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!("unknown plan key '{k}'")));
        }
        let source = match m.get("source").unwrap_or("synth") {
            "synth" => {
                let d = SynthSpec::standard();
                let spec = SynthSpec {
                    categories: scalar(m, "synth.categories", d.categories)?,
                    subdim: scalar(m, "synth.subdim", d.subdim)?,
                    ambient: scalar(m, "synth.ambient", d.ambient)?,
                    n_labeled: scalar(m, "synth.labeled", d.n_labeled)?,
                    n_unlabeled: scalar(m, "synth.unlabeled", d.n_unlabeled)?,
                    noise_sigma: scalar(m, "synth.noise", d.noise_sigma)?,
                    seed: scalar(m, "synth.seed", d.seed)?,
                };
                spec.validate()?;
                DataSource::Synth(spec)
            }
            "files" => {
                let path = |k: &str| m.get(k).map(|p| base.join(p));
                let x = path("x").ok_or_else(|| Error::InvalidParameter("files source needs x".into()))?;
                let labels = path("labels")
                    .ok_or_else(|| Error::InvalidParameter("files source needs labels".into()))?;
                let y = path("y");
                let y_labels = path("y_labels");
                if y.is_some() != y_labels.is_some() {
                    return Err(Error::InvalidParameter("y and y_labels must be given together".into()));
                }
                DataSource::Files { x, labels, y, y_labels }
            }
            other => return Err(Error::InvalidParameter(format!("unknown source '{other}'"))),
        };
        let models: Vec<Method> = list("models", m.get("models").unwrap_or(""))?;
        let values: Vec<usize> = list("values", m.get("values").unwrap_or(""))?;
        if models.is_empty() || values.is_empty() {
            return Err(Error::InvalidParameter("plan needs nonempty models and values".into()));
        }
        let axis: SweepAxis = m.get("sweep").unwrap_or("labeled_count").parse()?;
        if axis == SweepAxis::LabeledCount && values.contains(&0) {
            return Err(Error::InvalidParameter("labeled counts must be positive".into()));
        }
        let seeds: Vec<u64> = list("seeds", m.get("seeds").unwrap_or("1"))?;
        if seeds.is_empty() {
            return Err(Error::InvalidParameter("seeds must be nonempty".into()));
        }
        let default_fixed = match (&source, axis) {
            (DataSource::Synth(s), SweepAxis::LabeledCount) => s.n_unlabeled,
            (DataSource::Synth(s), SweepAxis::UnlabeledCount) => s.n_labeled,
            _ => 0,
        };
        let fixed_count = match m.get("fixed_count") {
            Some(_) => scalar(m, "fixed_count", 0usize)?,
            None if default_fixed > 0 => default_fixed,
            None => return Err(Error::InvalidParameter("fixed_count is required for file sources".into())),
        };
        if axis == SweepAxis::UnlabeledCount && fixed_count == 0 {
            return Err(Error::InvalidParameter("labeled count must be positive".into()));
        }

        let sd = SolverConfig::default();
        let tol = scalar(m, "tol", sd.tol_r1)?;
        let solver = SolverConfig {
            mu1: scalar(m, "mu1", sd.mu1)?,
            mu2: scalar(m, "mu2", sd.mu2)?,
            eta: scalar(m, "eta", sd.eta)?,
            max_iter: scalar(m, "max_iter", sd.max_iter)?,
            tol_r1: tol,
            tol_r2: tol,
            tol_dz: scalar(m, "tol_dz", sd.tol_dz)?,
        };
        solver.validate()?;
        let rd = Regularization::default();
        let reg = Regularization {
            lambda1: scalar(m, "lambda1", rd.lambda1)?,
            lambda2: scalar(m, "lambda2", rd.lambda2)?,
            delta: scalar(m, "delta", rd.delta)?,
        };
        reg.validate()?;
        let pd = PipelineConfig::default();
        let mut lasso = pd.lasso;
        lasso.lambda = scalar(m, "src_lambda", lasso.lambda)?;
        lasso.max_iter = scalar(m, "src_max_iter", lasso.max_iter)?;
        lasso.tol = scalar(m, "src_tol", lasso.tol)?;
        lasso.validate()?;
        Ok(Self {
            source,
            models,
            axis,
            values,
            fixed_count,
            seeds,
            pipeline: PipelineConfig {
                feature_dim: scalar(m, "dim", 0usize)?,
                reg,
                solver,
                lasso,
                ..pd
            },
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_manifest(&Manifest::load(path)?, base)
    }

    /// `(labeled, unlabeled)` per-category counts for a sweep value.
    pub fn counts_for(&self, value: usize) -> (usize, usize) {
        match self.axis {
            SweepAxis::LabeledCount => (value, self.fixed_count),
            SweepAxis::UnlabeledCount => (self.fixed_count, value),
        }
    }
}

/// Samples of every category, one matrix per category.
#[derive(Debug, Clone)]
pub struct SamplePool {
    pub categories: Vec<Matrix>,
}

impl SamplePool {
    pub fn from_dataset(ds: &Dataset) -> Result<Self> {
        let truth = ds.unlabeled_truth().ok_or_else(|| {
            Error::InvalidInput("unlabeled samples need truth labels to join the pool".into())
        })?;
        let c = ds.categories();
        if let Some(&bad) = truth.iter().find(|&&t| t == 0 || t > c) {
            return Err(Error::InvalidInput(format!("truth label {bad} outside 1..={c}")));
        }
        let mut categories = Vec::with_capacity(c);
        for j in 1..=c {
            let cols: Vec<_> = ds
                .labels()
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == j)
                .map(|(i, _)| ds.labeled().column(i))
                .chain(
                    truth
                        .iter()
                        .enumerate()
                        .filter(|(_, &t)| t == j)
                        .map(|(i, _)| ds.unlabeled().column(i)),
                )
                .collect();
            categories.push(Matrix::from_columns(&cols));
        }
        Ok(Self { categories })
    }

    pub fn load(source: &DataSource) -> Result<Self> {
        match source {
            DataSource::Synth(spec) => Self::from_dataset(&generate(spec)?),
            DataSource::Files { x, labels, y, y_labels } => {
                let xm = load_matrix(x)?;
                let xl = load_labels(labels)?;
                let ds = match (y, y_labels) {
                    (Some(y), Some(yl)) => {
                        Dataset::new(xm, xl, load_matrix(y)?)?.with_unlabeled_truth(load_labels(yl)?)?
                    }
                    _ => {
                        let d = xm.nrows();
                        Dataset::new(xm, xl, DMatrix::zeros(d, 0))?.with_unlabeled_truth(Vec::new())?
                    }
                };
                Self::from_dataset(&ds)
            }
        }
    }

    /// Deterministic per-category split drawn without replacement.
    pub fn split(&self, n_labeled: usize, n_unlabeled: usize, seed: u64) -> Result<Dataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = self.categories[0].nrows();
        let mut lab = Vec::new();
        let mut labels = Vec::new();
        let mut unl = Vec::new();
        let mut truth = Vec::new();
        for (j, pool) in self.categories.iter().enumerate() {
            let n = pool.ncols();
            if n_labeled + n_unlabeled > n {
                return Err(Error::InvalidParameter(format!(
                    "category {} has {n} samples, split needs {}",
                    j + 1,
                    n_labeled + n_unlabeled
                )));
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for &i in &order[..n_labeled] {
                lab.push(pool.column(i));
                labels.push(j + 1);
            }
            for &i in &order[n - n_unlabeled..] {
                unl.push(pool.column(i));
                truth.push(j + 1);
            }
        }
        let unlabeled = if unl.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            Matrix::from_columns(&unl)
        };
        Dataset::new(Matrix::from_columns(&lab), labels, unlabeled)?.with_unlabeled_truth(truth)
    }
}

/// One (model, sweep value, seed) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: Method,
    pub value: usize,
    pub seed: u64,
    pub outcome: std::result::Result<RunMetrics, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub mean_cci: Option<f64>,
    pub converged: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub models: Vec<Method>,
    pub axis: SweepAxis,
    pub values: Vec<usize>,
    pub runs: Vec<RunRecord>,
    /// Mean accuracy per (model, value); `None` when every repetition failed.
    pub mean: DMatrix<Option<f64>>,
    /// Population standard deviation over successful repetitions.
    pub std: DMatrix<Option<f64>>,
}

fn run_cell(pool: &SamplePool, plan: &ExperimentPlan, method: Method, value: usize, seed: u64) -> Result<RunMetrics> {
    let (l, u) = plan.counts_for(value);
    let ds = pool.split(l, u, seed)?;
    let out = run_method(&ds, method, &plan.pipeline)?;
    let truth = ds.unlabeled_truth().expect("split attaches truth");
    let acc = accuracy(&out.predictions, truth)?;
    let correct = out
        .predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p.category() == Some(**t))
        .count();
    Ok(RunMetrics {
        accuracy: acc,
        correct,
        total: truth.len(),
        mean_cci: out.mean_cci,
        converged: out.converged,
    })
}

/// Runs every cell; a failing cell is recorded and the sweep continues.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentReport> {
    let pool = SamplePool::load(&plan.source)?;
    let mut cells = Vec::new();
    for &method in &plan.models {
        for &value in &plan.values {
            for &seed in &plan.seeds {
                cells.push((method, value, seed));
            }
        }
    }
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(cells.len()).max(1);
    let chunk = cells.len().div_ceil(workers);
    let runs: Vec<RunRecord> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .chunks(chunk)
            .map(|part| {
                let pool = &pool;
                scope.spawn(move || {
                    part.iter()
                        .map(|&(method, value, seed)| RunRecord {
                            method,
                            value,
                            seed,
                            outcome: run_cell(pool, plan, method, value, seed).map_err(|e| e.to_string()),
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("experiment worker panicked"))
            .collect()
    });

    let (nm, nv) = (plan.models.len(), plan.values.len());
    let mut mean = DMatrix::from_element(nm, nv, None);
    let mut std = DMatrix::from_element(nm, nv, None);
    let per_cell = plan.seeds.len();
    for i in 0..nm {
        for j in 0..nv {
            let start = (i * nv + j) * per_cell;
            let accs: Vec<f64> = runs[start..start + per_cell]
                .iter()
                .filter_map(|r| r.outcome.as_ref().ok().map(|m| m.accuracy))
                .collect();
            if accs.is_empty() {
                continue;
            }
            let n = accs.len() as f64;
            let mu = accs.iter().sum::<f64>() / n;
            let var = accs.iter().map(|a| (a - mu).powi(2)).sum::<f64>() / n;
            mean[(i, j)] = Some(mu);
            std[(i, j)] = Some(var.sqrt());
        }
    }
    Ok(ExperimentReport {
        models: plan.models.clone(),
        axis: plan.axis,
        values: plan.values.clone(),
        runs,
        mean,
        std,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| format!("{x:.16e}"))
}

impl ExperimentReport {
    pub fn all_failed(&self) -> bool {
        self.runs.iter().all(|r| r.outcome.is_err())
    }

    fn header(&self, first: &str) -> String {
        let mut h = first.to_string();
        for v in &self.values {
            h.push_str(&format!(",{}={v}", self.axis.as_str()));
        }
        h.push('\n');
        h
    }

    fn grid(&self, values: &DMatrix<Option<f64>>, missing: &str) -> String {
        let mut out = self.header("model");
        for (i, m) in self.models.iter().enumerate() {
            out.push_str(m.name());
            for j in 0..self.values.len() {
                out.push(',');
                match values[(i, j)] {
                    Some(v) => out.push_str(&format!("{v:.16e}")),
                    None => out.push_str(missing),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Mean accuracy grid; cells whose repetitions all failed read `ERR`.
    pub fn results_csv(&self) -> String {
        self.grid(&self.mean, "ERR")
    }

    pub fn results_std_csv(&self) -> String {
        self.grid(&self.std, "ERR")
    }

    /// Column-scope RSI of the mean accuracies. Failed cells count as zero
    /// accuracy when locating the column maximum and read `NaN`.
    pub fn rsi_matrix(&self) -> Result<DMatrix<Option<f64>>> {
        let values = self.mean.map(|v| v.unwrap_or(0.0));
        let results = ResultsMatrix::new(
            values,
            self.models.iter().map(|m| m.name().to_string()).collect(),
            self.values.iter().map(|v| v.to_string()).collect(),
        )?;
        Ok(rsi(&results, RsiScope::Column))
    }

    pub fn rsi_csv(&self) -> Result<String> {
        Ok(self.grid(&self.rsi_matrix()?, "NaN"))
    }

    pub fn cci_csv(&self) -> String {
        let mut out = format!("model,{},seed,mean_cci\n", self.axis.as_str());
        for r in &self.runs {
            let v = r.outcome.as_ref().ok().and_then(|m| m.mean_cci);
            out.push_str(&format!("{},{},{},{}\n", r.method.name(), r.value, r.seed, fmt_opt(v)));
        }
        out
    }

    pub fn runs_csv(&self) -> String {
        let mut out = format!(
            "model,{},seed,status,accuracy,correct,total,mean_cci,converged,error\n",
            self.axis.as_str()
        );
        for r in &self.runs {
            let prefix = format!("{},{},{}", r.method.name(), r.value, r.seed);
            match &r.outcome {
                Ok(m) => out.push_str(&format!(
                    "{prefix},ok,{:.16e},{},{},{},{},\n",
                    m.accuracy,
                    m.correct,
                    m.total,
                    fmt_opt(m.mean_cci),
                    m.converged.map_or("NA".to_string(), |c| c.to_string()),
                )),
                Err(e) => out.push_str(&format!(
                    "{prefix},ERR,NaN,,,NaN,NA,\"{}\"\n",
                    e.replace('"', "'")
                )),
            }
        }
        out
    }

    /// Writes runs.csv, results.csv, results_std.csv, rsi.csv and cci.csv.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("runs.csv"), self.runs_csv())?;
        std::fs::write(dir.join("results.csv"), self.results_csv())?;
        std::fs::write(dir.join("results_std.csv"), self.results_std_csv())?;
        std::fs::write(dir.join("rsi.csv"), self.rsi_csv()?)?;
        std::fs::write(dir.join("cci.csv"), self.cci_csv())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(text: &str) -> Result<ExperimentPlan> {
        ExperimentPlan::from_manifest(&Manifest::parse(text)?, Path::new("."))
    }

    #[test]
    fn plan_defaults() {
        let p = plan("models = SRC\nvalues = 3").unwrap();
        assert_eq!(p.source, DataSource::Synth(SynthSpec::standard()));
        assert_eq!(p.axis, SweepAxis::LabeledCount);
        assert_eq!(p.fixed_count, 4);
        assert_eq!(p.counts_for(3), (3, 4));
        assert_eq!(p.seeds, vec![1]);
    }

    #[test]
    fn plan_rejects_bad_input() {
        assert!(plan("models =\nvalues = 3").is_err());
        assert!(plan("models = SRC\nvalues =").is_err());
        assert!(plan("models = SRC\nvalues = 3\ncolour = red").is_err());
        assert!(plan("models = SRC\nvalues = 0").is_err());
        assert!(plan("models = SRC\nvalues = 3\nsweep = diagonal").is_err());
        assert!(plan("source = files\nmodels = SRC\nvalues = 3").is_err());
    }

    #[test]
    fn split_draws_disjoint_samples_per_category() {
        let pool = SamplePool::load(&DataSource::Synth(SynthSpec::standard())).unwrap();
        assert_eq!(pool.categories.len(), 3);
        assert!(pool.categories.iter().all(|c| c.ncols() == 10));
        let ds = pool.split(5, 5, 9).unwrap();
        assert_eq!(ds.counts(), &[5, 5, 5]);
        for j in 0..3 {
            for a in ds.labeled().columns(5 * j, 5).column_iter() {
                for b in ds.unlabeled().columns(5 * j, 5).column_iter() {
                    assert!((a - b).norm() > 0.0);
                }
            }
        }
        assert_eq!(pool.split(5, 5, 9).unwrap(), ds);
        assert!(pool.split(6, 5, 9).is_err());
    }

    #[test]
    fn failing_cells_are_recorded() {
        let p = plan("models = SRC\nvalues = 6, 20\nseeds = 1, 2").unwrap();
        let report = run_experiment(&p).unwrap();
        assert_eq!(report.runs.len(), 4);
        assert!(report.runs[..2].iter().all(|r| r.outcome.is_ok()));
        assert!(report.runs[2..].iter().all(|r| r.outcome.is_err()));
        assert!(!report.all_failed());
        let results = report.results_csv();
        let row = results.lines().nth(1).unwrap();
        assert!(row.starts_with("SRC,"));
        assert!(row.ends_with(",ERR"));
        assert!(report.rsi_csv().unwrap().lines().nth(1).unwrap().ends_with(",NaN"));
    }
}
