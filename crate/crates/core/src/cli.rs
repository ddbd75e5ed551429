//! Command-line surface. `run` parses arguments and returns the process
//! exit code: 0 success, 1 usage or validation error, 2 I/O error, 3 every
//! experiment run failed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;

use crate::classifier::CcrMatrix;
use crate::datagen::{generate, SynthSpec};
use crate::diagnostics::convergence_report;
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, ExperimentPlan};
use crate::io::{
    load_labels, load_matrix, save_labels, save_matrix, save_predictions, save_trace, Manifest,
};
use crate::metrics::accuracy;
use crate::model::{Dataset, ModelKind, Regularization};
use crate::pipeline::{labels_from_coefficients, prepare};
use crate::solver::{resolve_eta, solve, Eta, SolverConfig};
use crate::Matrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_ALL_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lrs-pfsrc", version, about = "Low-rank sparse pseudo-full-space representation classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the representation problem and write Z, A, E and the trace.
    Solve(SolveArgs),
    /// Label unlabeled samples from a solved coefficient matrix.
    Classify(ClassifyArgs),
    /// Write a synthetic union-of-subspaces dataset.
    Generate(GenerateArgs),
    /// Run a sweep described by a key=value plan file.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SolveArgs {
    /// Labeled samples, one column per sample.
    #[arg(long)]
    pub x: PathBuf,
    /// Unlabeled samples, one column per sample.
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value = "lrs")]
    pub model: ModelKind,
    #[arg(long, default_value_t = Regularization::default().lambda1)]
    pub lambda1: f64,
    #[arg(long, default_value_t = Regularization::default().lambda2)]
    pub lambda2: f64,
    #[arg(long, default_value_t = Regularization::default().delta)]
    pub delta: f64,
    #[arg(long, default_value_t = SolverConfig::default().mu1)]
    pub mu1: f64,
    #[arg(long, default_value_t = SolverConfig::default().mu2)]
    pub mu2: f64,
    /// `auto` or a positive step parameter.
    #[arg(long, default_value = "auto")]
    pub eta: Eta,
    /// Eigenface dimension; 0 skips feature extraction.
    #[arg(long, default_value_t = 0)]
    pub dim: usize,
    #[arg(long, default_value_t = SolverConfig::default().max_iter)]
    pub max_iter: usize,
    /// Tolerance on both relative feasibility residuals.
    #[arg(long, default_value_t = SolverConfig::default().tol_r1)]
    pub tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().tol_dz)]
    pub tol_dz: f64,
    /// Extra copy of the iteration trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Output directory of `solve`.
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// True labels of the unlabeled samples, for reporting accuracy.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = SynthSpec::standard().categories)]
    pub categories: usize,
    #[arg(long, default_value_t = SynthSpec::standard().subdim)]
    pub subdim: usize,
    #[arg(long, default_value_t = SynthSpec::standard().ambient)]
    pub ambient: usize,
    /// Labeled samples per category.
    #[arg(long, default_value_t = SynthSpec::standard().n_labeled)]
    pub labeled: usize,
    /// Unlabeled samples per category.
    #[arg(long, default_value_t = SynthSpec::standard().n_unlabeled)]
    pub unlabeled: usize,
    #[arg(long, default_value_t = SynthSpec::standard().noise_sigma)]
    pub noise: f64,
    #[arg(long, default_value_t = SynthSpec::standard().seed)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub plan: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first) and runs the chosen command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a).map(|_| EXIT_OK),
        Command::Classify(a) => run_classify(a).map(|_| EXIT_OK),
        Command::Generate(a) => run_generate(a).map(|_| EXIT_OK),
        Command::Experiment(a) => run_experiment_command(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

pub fn run_solve(a: &SolveArgs) -> Result<Manifest> {
    let reg = Regularization {
        lambda1: a.lambda1,
        lambda2: a.lambda2,
        delta: a.delta,
    };
    reg.validate()?;
    let cfg = SolverConfig {
        mu1: a.mu1,
        mu2: a.mu2,
        eta: a.eta,
        max_iter: a.max_iter,
        tol_r1: a.tol,
        tol_r2: a.tol,
        tol_dz: a.tol_dz,
    };
    cfg.validate()?;

    let x = load_matrix(&a.x)?;
    let labels = load_labels(&a.labels)?;
    let y = match &a.y {
        Some(p) => load_matrix(p)?,
        None => DMatrix::zeros(x.nrows(), 0),
    };
    let ds = Dataset::new(x, labels, y)?;
    let prepared = prepare(&ds, a.dim)?;
    let ds = &prepared.dataset;
    let p = ds.problem(a.model, reg)?;

    let start = Instant::now();
    let sol = solve(&p, &cfg)?;
    let wall = start.elapsed().as_secs_f64();
    let report = convergence_report(&sol.trace, &sol.z, None)?;

    create_dir(&a.out)?;
    save_matrix(a.out.join("Z.csv"), &sol.z)?;
    save_matrix(a.out.join("A.csv"), &sol.a)?;
    save_matrix(a.out.join("E.csv"), &sol.e)?;
    save_trace(a.out.join("trace.csv"), &sol.trace)?;
    if let Some(path) = &a.trace {
        save_trace(path, &sol.trace)?;
    }
    if let Some(basis) = &prepared.basis {
        save_matrix(a.out.join("basis.csv"), &basis.u)?;
        save_matrix(a.out.join("mean.csv"), &Matrix::from_column_slice(basis.mean.len(), 1, basis.mean.as_slice()))?;
    }

    let mut m = Manifest::new();
    m.set("x", a.x.display());
    m.set("y", a.y.as_ref().map_or("none".into(), |p| p.display().to_string()));
    m.set("labels", a.labels.display());
    m.set("model", a.model.as_str());
    m.set("lambda1", reg.lambda1);
    m.set("lambda2", reg.lambda2);
    m.set("delta", reg.delta);
    m.set("mu1", cfg.mu1);
    m.set("mu2", cfg.mu2);
    m.set("eta", cfg.eta);
    m.set("eta_resolved", resolve_eta(&p, &cfg)?);
    m.set("dim", a.dim);
    m.set("max_iter", cfg.max_iter);
    m.set("tol", a.tol);
    m.set("tol_dz", cfg.tol_dz);
    m.set("features", p.dim());
    m.set("s_c", p.n_labeled());
    m.set("m", p.n_unlabeled());
    m.set("categories", ds.categories());
    m.set("converged", sol.converged);
    m.set("iterations", sol.iterations);
    m.set("final_r1", report.final_r1);
    m.set("final_r2", report.final_r2);
    m.set("final_dz", report.final_dz);
    m.set("final_h_diff", report.final_h_diff);
    m.set("first_h_diff", report.first_h_diff);
    m.set("monotone_tail", report.monotone_tail);
    m.set("gt_distance", fmt_opt(report.gt_distance));
    m.set("wall_time_s", wall);
    m.save(a.out.join("manifest.txt"))?;
    Ok(m)
}

fn ccr_to_matrix(c: &CcrMatrix) -> Matrix {
    let mut out = c.values.clone();
    for (l, defined) in c.defined.iter().enumerate() {
        if !defined {
            out.column_mut(l).fill(f64::NAN);
        }
    }
    out
}

/// Result of `classify`: predictions and accuracy when truth was given.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifySummary {
    pub predictions: Vec<crate::classifier::Label>,
    pub accuracy: Option<f64>,
}

pub fn run_classify(a: &ClassifyArgs) -> Result<ClassifySummary> {
    let z_path = a.solution.join("Z.csv");
    if !z_path.is_file() {
        return Err(Error::InvalidInput(format!(
            "no solution at {}: Z.csv is missing",
            a.solution.display()
        )));
    }
    let z = load_matrix(&z_path)?;
    let labels = load_labels(&a.labels)?;
    let c = labels.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; c];
    for &l in &labels {
        counts[l - 1] += 1;
    }
    if labels.windows(2).any(|w| w[0] > w[1]) || counts.contains(&0) {
        return Err(Error::InvalidInput(
            "labels must be grouped by category and cover 1..=c".into(),
        ));
    }
    let (ccr, predictions) = labels_from_coefficients(&z, &labels, &counts)?;
    let accuracy = match &a.truth {
        Some(p) => Some(accuracy(&predictions, &load_labels(p)?)?),
        None => None,
    };
    create_dir(&a.out)?;
    save_matrix(a.out.join("ccr.csv"), &ccr_to_matrix(&ccr))?;
    save_predictions(a.out.join("pred.txt"), &predictions)?;
    if let Some(acc) = accuracy {
        let correct = (acc * predictions.len() as f64).round() as usize;
        println!("accuracy {acc} ({correct}/{})", predictions.len());
    }
    Ok(ClassifySummary { predictions, accuracy })
}

pub fn run_generate(a: &GenerateArgs) -> Result<()> {
    let spec = SynthSpec {
        categories: a.categories,
        subdim: a.subdim,
        ambient: a.ambient,
        n_labeled: a.labeled,
        n_unlabeled: a.unlabeled,
        noise_sigma: a.noise,
        seed: a.seed,
    };
    let ds = generate(&spec)?;
    create_dir(&a.out)?;
    save_matrix(a.out.join("X.csv"), ds.labeled())?;
    save_labels(a.out.join("labels.txt"), ds.labels())?;
    save_matrix(a.out.join("Y.csv"), ds.unlabeled())?;
    save_labels(a.out.join("Y_labels.txt"), ds.unlabeled_truth().unwrap_or(&[]))?;
    Ok(())
}

fn run_experiment_command(a: &ExperimentArgs) -> Result<i32> {
    let plan = ExperimentPlan::load(&a.plan)?;
    let report = run_experiment(&plan)?;
    report.write(&a.out)?;
    for r in &report.runs {
        if let Err(e) = &r.outcome {
            eprintln!("run {} {}={} seed {} failed: {e}", r.method, plan.axis.as_str(), r.value, r.seed);
        }
    }
    Ok(if report.all_failed() { EXIT_ALL_FAILED } else { EXIT_OK })
}
