//! Pseudo-full-space problem assembly.
//!
//! Every labeled sample is represented over the dictionary `V = [X | Y]`
//! with its own atom removed. Removing the atom is realized downstream by
//! forcing `Z[i, i] = 0` on the labeled block, so `V` itself is a plain
//! column concatenation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::prox::{ensure_finite, l1_norm, nuclear_norm};
use crate::Matrix;

/// Labeled and unlabeled samples, one sample per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    labeled: Matrix,
    labels: Vec<usize>,
    unlabeled: Matrix,
    counts: Vec<usize>,
    unlabeled_truth: Option<Vec<usize>>,
}

impl Dataset {
    /// Labels are 1-based category ids, sorted so that each category's
    /// columns are contiguous, and every category in `1..=c` must appear.
    pub fn new(labeled: Matrix, labels: Vec<usize>, unlabeled: Matrix) -> Result<Self> {
        if labeled.nrows() != unlabeled.nrows() {
            return Err(Error::InvalidInput(format!(
                "labeled samples have {} rows but unlabeled samples have {}",
                labeled.nrows(),
                unlabeled.nrows()
            )));
        }
        if labeled.ncols() == 0 || labeled.nrows() == 0 {
            return Err(Error::InvalidInput("labeled matrix is empty".into()));
        }
        if labels.len() != labeled.ncols() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} labeled columns",
                labels.len(),
                labeled.ncols()
            )));
        }
        ensure_finite(&labeled, "labeled matrix")?;
        ensure_finite(&unlabeled, "unlabeled matrix")?;
        if labels.iter().any(|&l| l == 0) {
            return Err(Error::InvalidInput("labels are 1-based".into()));
        }
        if labels.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput(
                "labeled columns must be grouped by category in nondecreasing label order".into(),
            ));
        }
        let c = *labels.last().expect("nonempty");
        let mut counts = vec![0; c];
        for &l in &labels {
            counts[l - 1] += 1;
        }
        if let Some(j) = counts.iter().position(|&n| n == 0) {
            return Err(Error::InvalidInput(format!(
                "category {} has no labeled samples",
                j + 1
            )));
        }
        Ok(Self {
            labeled,
            labels,
            unlabeled,
            counts,
            unlabeled_truth: None,
        })
    }

    /// Attaches ground-truth labels for the unlabeled columns (synthetic data
    /// and evaluation splits only; the solver never sees them).
    pub fn with_unlabeled_truth(mut self, truth: Vec<usize>) -> Result<Self> {
        if truth.len() != self.unlabeled.ncols() {
            return Err(Error::InvalidInput(format!(
                "{} truth labels for {} unlabeled columns",
                truth.len(),
                self.unlabeled.ncols()
            )));
        }
        self.unlabeled_truth = Some(truth);
        Ok(self)
    }

    pub fn labeled(&self) -> &Matrix {
        &self.labeled
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn unlabeled(&self) -> &Matrix {
        &self.unlabeled
    }

    pub fn unlabeled_truth(&self) -> Option<&[usize]> {
        self.unlabeled_truth.as_deref()
    }

    pub fn categories(&self) -> usize {
        self.counts.len()
    }

    /// Labeled samples per category, `n_j`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn dim(&self) -> usize {
        self.labeled.nrows()
    }

    pub fn n_labeled(&self) -> usize {
        self.labeled.ncols()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.unlabeled.ncols()
    }

    /// Same labels, new sample matrices (used after feature extraction).
    pub fn with_samples(&self, labeled: Matrix, unlabeled: Matrix) -> Result<Self> {
        let ds = Self::new(labeled, self.labels.clone(), unlabeled)?;
        match &self.unlabeled_truth {
            Some(t) => ds.with_unlabeled_truth(t.clone()),
            None => Ok(ds),
        }
    }

    pub fn problem(&self, model: ModelKind, reg: Regularization) -> Result<ProblemSpec> {
        ProblemSpec::new(self.labeled.clone(), self.unlabeled.clone(), model, reg)
    }
}

/// Which penalty family the representation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `||Z||_* + l1 ||A||_1 + l2 ||E||_1`, `Z = A`, `X = VZ + E`.
    LowRankSparse,
    /// `||Z||_1`, `X = VZ`.
    Sparse,
    /// `||Z||_* + delta ||E||_1`, `X = VZ + E`.
    LowRank,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::LowRankSparse => "lrs",
            ModelKind::Sparse => "s",
            ModelKind::LowRank => "lr",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lrs" | "lr-s" | "lr-s-pfsr" => Ok(ModelKind::LowRankSparse),
            "s" | "s-pfsr" => Ok(ModelKind::Sparse),
            "lr" | "lr-pfsr" => Ok(ModelKind::LowRank),
            other => Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        }
    }
}

/// Penalty weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularization {
    /// Weight on `||A||_1`.
    pub lambda1: f64,
    /// Weight on `||E||_1`.
    pub lambda2: f64,
    /// Weight on `||E||_1` for the low-rank-only model.
    pub delta: f64,
}

impl Default for Regularization {
    fn default() -> Self {
        Self {
            lambda1: 10.0,
            lambda2: 0.09,
            delta: 0.09,
        }
    }
}

impl Regularization {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("delta", self.delta),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// One solvable instance.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    dictionary: Matrix,
    target: Matrix,
    n_unlabeled: usize,
    pub model: ModelKind,
    pub reg: Regularization,
}

/// `V = [X | Y]`.
pub fn build_dictionary(labeled: &Matrix, unlabeled: &Matrix) -> Result<Matrix> {
    if labeled.nrows() != unlabeled.nrows() {
        return Err(Error::InvalidInput(format!(
            "row-count mismatch: X has {} rows, Y has {}",
            labeled.nrows(),
            unlabeled.nrows()
        )));
    }
    let (d, s_c, m) = (labeled.nrows(), labeled.ncols(), unlabeled.ncols());
    let mut v = DMatrix::zeros(d, s_c + m);
    v.columns_mut(0, s_c).copy_from(labeled);
    v.columns_mut(s_c, m).copy_from(unlabeled);
    Ok(v)
}

impl ProblemSpec {
    pub fn new(
        labeled: Matrix,
        unlabeled: Matrix,
        model: ModelKind,
        reg: Regularization,
    ) -> Result<Self> {
        reg.validate()?;
        if labeled.ncols() == 0 {
            return Err(Error::InvalidInput("no labeled samples".into()));
        }
        ensure_finite(&labeled, "labeled matrix")?;
        ensure_finite(&unlabeled, "unlabeled matrix")?;
        let dictionary = build_dictionary(&labeled, &unlabeled)?;
        Ok(Self {
            dictionary,
            n_unlabeled: unlabeled.ncols(),
            target: labeled,
            model,
            reg,
        })
    }

    /// `V`, `d x (s_c + m)`.
    pub fn dictionary(&self) -> &Matrix {
        &self.dictionary
    }

    /// `X`, `d x s_c`.
    pub fn target(&self) -> &Matrix {
        &self.target
    }

    pub fn n_labeled(&self) -> usize {
        self.target.ncols()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.n_unlabeled
    }

    pub fn n_atoms(&self) -> usize {
        self.dictionary.ncols()
    }

    pub fn dim(&self) -> usize {
        self.target.nrows()
    }

    fn check_shapes(&self, z: &Matrix, a: &Matrix, e: &Matrix) -> Result<()> {
        let coeff = (self.n_atoms(), self.n_labeled());
        let err = (self.dim(), self.n_labeled());
        if z.shape() != coeff || a.shape() != coeff || e.shape() != err {
            return Err(Error::InvalidInput(format!(
                "expected Z, A {coeff:?} and E {err:?}, got Z {:?}, A {:?}, E {:?}",
                z.shape(),
                a.shape(),
                e.shape()
            )));
        }
        Ok(())
    }

    /// Objective of the selected model at `(Z, A, E)`.
    ///
    /// `A` is ignored by the sparse and low-rank models and `E` by the
    /// sparse model, but all three must still have the right shapes.
    pub fn objective_value(&self, z: &Matrix, a: &Matrix, e: &Matrix) -> Result<f64> {
        self.check_shapes(z, a, e)?;
        let reg = &self.reg;
        Ok(match self.model {
            ModelKind::LowRankSparse => {
                nuclear_norm(z)? + reg.lambda1 * l1_norm(a) + reg.lambda2 * l1_norm(e)
            }
            ModelKind::Sparse => l1_norm(z),
            ModelKind::LowRank => nuclear_norm(z)? + reg.delta * l1_norm(e),
        })
    }

    /// Relative feasibility residuals
    /// `(||VZ + E - X||_F / max(||X||_F, 1), ||Z - A||_F / max(||Z||_F, 1))`.
    pub fn feasibility_residuals(&self, z: &Matrix, a: &Matrix, e: &Matrix) -> Result<(f64, f64)> {
        self.check_shapes(z, a, e)?;
        let r1 = (&self.dictionary * z + e - &self.target).norm() / self.target.norm().max(1.0);
        let r2 = (z - a).norm() / z.norm().max(1.0);
        Ok((r1, r2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    fn spec(x: Matrix, y: Matrix, model: ModelKind, l1: f64, l2: f64) -> ProblemSpec {
        let reg = Regularization {
            lambda1: l1,
            lambda2: l2,
            delta: l2,
        };
        ProblemSpec::new(x, y, model, reg).unwrap()
    }

    #[test]
    fn dictionary_concatenates_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = random(4, 3, &mut rng);
        let y = random(4, 2, &mut rng);
        let v = build_dictionary(&x, &y).unwrap();
        assert_eq!(v.shape(), (4, 5));
        assert_eq!(v.columns(0, 3), x);
        assert_eq!(v.columns(3, 2), y);
    }

    #[test]
    fn empty_unlabeled_set_gives_labeled_only_dictionary() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = random(4, 3, &mut rng);
        let v = build_dictionary(&x, &DMatrix::zeros(4, 0)).unwrap();
        assert_eq!(v, x);
    }

    #[test]
    fn dictionary_rejects_row_mismatch() {
        let x = DMatrix::zeros(5, 4);
        let y = DMatrix::zeros(4, 2);
        assert!(matches!(build_dictionary(&x, &y), Err(Error::InvalidInput(_))));
        assert!(Dataset::new(x, vec![1, 1, 2, 2], y).is_err());
    }

    #[test]
    fn dataset_validates_label_order() {
        let x = DMatrix::zeros(2, 2);
        let y = DMatrix::zeros(2, 0);
        assert!(Dataset::new(x.clone(), vec![2, 1], y.clone()).is_err());
        assert!(Dataset::new(x.clone(), vec![1, 3], y.clone()).is_err());
        let ds = Dataset::new(x, vec![1, 2], y).unwrap();
        assert_eq!(ds.counts(), &[1, 1]);
    }

    #[test]
    fn objective_zero_at_origin() {
        let p = spec(DMatrix::identity(3, 2), DMatrix::zeros(3, 1), ModelKind::LowRankSparse, 1.0, 1.0);
        let z = DMatrix::zeros(3, 2);
        let e = DMatrix::zeros(3, 2);
        assert_eq!(p.objective_value(&z, &z, &e).unwrap(), 0.0);
    }

    #[test]
    fn objective_of_identity_block() {
        let p = spec(DMatrix::identity(3, 2), DMatrix::zeros(3, 1), ModelKind::LowRankSparse, 1.0, 1.0);
        let z = DMatrix::identity(3, 2);
        let zero = DMatrix::zeros(3, 2);
        let v = p.objective_value(&z, &zero, &zero).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn objective_matches_independent_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random(5, 3, &mut rng);
        let y = random(5, 2, &mut rng);
        let z = random(5, 3, &mut rng);
        let a = random(5, 3, &mut rng);
        let e = random(5, 3, &mut rng);
        let nuclear: f64 = z.clone().svd(false, false).singular_values.iter().sum();
        let abs_sum = |m: &Matrix| m.iter().fold(0.0, |acc, v| acc + v.abs());

        let p = spec(x.clone(), y.clone(), ModelKind::LowRankSparse, 0.7, 0.2);
        let expected = nuclear + 0.7 * abs_sum(&a) + 0.2 * abs_sum(&e);
        assert!((p.objective_value(&z, &a, &e).unwrap() - expected).abs() < 1e-10);

        let p = spec(x.clone(), y.clone(), ModelKind::Sparse, 0.7, 0.2);
        assert!((p.objective_value(&z, &a, &e).unwrap() - abs_sum(&z)).abs() < 1e-10);

        let p = spec(x, y, ModelKind::LowRank, 0.7, 0.2);
        let expected = nuclear + 0.2 * abs_sum(&e);
        assert!((p.objective_value(&z, &a, &e).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn objective_is_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = spec(random(4, 3, &mut rng), random(4, 1, &mut rng), ModelKind::LowRankSparse, 1.5, 0.3);
        let z = random(4, 3, &mut rng);
        let a = random(4, 3, &mut rng);
        let e = random(4, 3, &mut rng);
        let base = p.objective_value(&z, &a, &e).unwrap();
        let t = 2.5;
        let scaled = p.objective_value(&(&z * t), &(&a * t), &(&e * t)).unwrap();
        assert!((scaled - t * base).abs() < 1e-10 * base.max(1.0));
    }

    #[test]
    fn objective_rejects_bad_shapes() {
        let p = spec(DMatrix::identity(3, 2), DMatrix::zeros(3, 1), ModelKind::LowRankSparse, 1.0, 1.0);
        let z = DMatrix::zeros(2, 2);
        let e = DMatrix::zeros(3, 2);
        assert!(matches!(p.objective_value(&z, &z, &e), Err(Error::InvalidInput(_))));
        assert!(p.feasibility_residuals(&z, &z, &e).is_err());
    }

    #[test]
    fn residual_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random(4, 3, &mut rng) * 3.0;
        let y = random(4, 2, &mut rng);
        let p = spec(x.clone(), y, ModelKind::LowRankSparse, 1.0, 1.0);
        let zero = DMatrix::zeros(5, 3);
        let (r1, r2) = p.feasibility_residuals(&zero, &zero, &x).unwrap();
        assert_eq!((r1, r2), (0.0, 0.0));
        let (r1, r2) = p.feasibility_residuals(&zero, &zero, &DMatrix::zeros(4, 3)).unwrap();
        assert!(x.norm() >= 1.0);
        assert!((r1 - 1.0).abs() < 1e-15);
        assert_eq!(r2, 0.0);

        // exact triple: Z copies a column of Y into the representation
        let z = random(5, 3, &mut rng);
        let e = &x - p.dictionary() * &z;
        let (r1, r2) = p.feasibility_residuals(&z, &z, &e).unwrap();
        assert!(r1 < 1e-15 && r2 == 0.0);
    }

    #[test]
    fn model_names_parse() {
        assert_eq!("lrs".parse::<ModelKind>().unwrap(), ModelKind::LowRankSparse);
        assert_eq!("S".parse::<ModelKind>().unwrap(), ModelKind::Sparse);
        assert_eq!("lr".parse::<ModelKind>().unwrap(), ModelKind::LowRank);
        assert!("x".parse::<ModelKind>().is_err());
    }
}
