//! Deterministic union-of-subspaces generator.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, and Gaussian draws use `rand_distr::StandardNormal`.
//! Draw order is fixed: the `ambient x ambient` rotation (column-major),
//! then for each category in order its labeled samples followed by its
//! unlabeled samples, each sample drawing `subdim` coefficients and then,
//! only when `noise_sigma > 0`, `ambient` noise values.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub categories: usize,
    pub subdim: usize,
    pub ambient: usize,
    /// Labeled samples per category.
    pub n_labeled: usize,
    /// Unlabeled samples per category.
    pub n_unlabeled: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Three 2-dimensional subspaces of R^30, six labeled and four unlabeled
    /// samples per category, noiseless, seed 42.
    pub fn standard() -> Self {
        Self {
            categories: 3,
            subdim: 2,
            ambient: 30,
            n_labeled: 6,
            n_unlabeled: 4,
            noise_sigma: 0.0,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.categories == 0 || self.subdim == 0 {
            return Err(Error::InvalidParameter("categories and subdim must be positive".into()));
        }
        if self.subdim * self.categories > self.ambient {
            return Err(Error::InvalidParameter(format!(
                "{} independent {}-dimensional subspaces do not fit in R^{}",
                self.categories, self.subdim, self.ambient
            )));
        }
        if self.n_labeled == 0 {
            return Err(Error::InvalidParameter("need at least one labeled sample per category".into()));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise_sigma must be finite and nonnegative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Generated samples together with the orthonormal basis of each
/// category's subspace.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub bases: Vec<Matrix>,
}

pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    Ok(generate_with_bases(spec)?.dataset)
}

pub fn generate_with_bases(spec: &SynthSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.ambient;

    let gaussian = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
    let rotation = gaussian.qr().q();
    let bases: Vec<Matrix> = (0..spec.categories)
        .map(|j| rotation.columns(j * spec.subdim, spec.subdim).into_owned())
        .collect();

    let c = spec.categories;
    let mut labeled = DMatrix::zeros(d, c * spec.n_labeled);
    let mut unlabeled = DMatrix::zeros(d, c * spec.n_unlabeled);
    let mut labels = Vec::with_capacity(c * spec.n_labeled);
    let mut truth = Vec::with_capacity(c * spec.n_unlabeled);

    let draw = |basis: &Matrix, rng: &mut ChaCha8Rng| -> Result<DVector<f64>> {
        let coef = DVector::from_fn(spec.subdim, |_, _| StandardNormal.sample(rng));
        let mut x = basis * coef;
        if spec.noise_sigma > 0.0 {
            let noise = DVector::from_fn(d, |_, _| {
                let g: f64 = StandardNormal.sample(rng);
                g * spec.noise_sigma
            });
            x += noise;
        }
        let norm = x.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateData("drew a zero sample".into()));
        }
        Ok(x / norm)
    };

    for (j, basis) in bases.iter().enumerate() {
        for i in 0..spec.n_labeled {
            let x = draw(basis, &mut rng)?;
            labeled.set_column(j * spec.n_labeled + i, &x);
            labels.push(j + 1);
        }
        for i in 0..spec.n_unlabeled {
            let y = draw(basis, &mut rng)?;
            unlabeled.set_column(j * spec.n_unlabeled + i, &y);
            truth.push(j + 1);
        }
    }

    let dataset = Dataset::new(labeled, labels, unlabeled)?.with_unlabeled_truth(truth)?;
    Ok(SyntheticData { dataset, bases })
}
