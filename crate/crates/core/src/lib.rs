//! Low-rank and sparse pseudo-full-space representation classification.
//!
//! Labeled samples are expressed over every other labeled and unlabeled
//! sample under nuclear-norm, l1 and error penalties; unlabeled samples are
//! then labeled by their category contribution rate. See [`solver::solve`]
//! for the optimizer and [`pipeline`] for complete classification runs.

pub mod baselines;
pub mod classifier;
pub mod cli;
pub mod datagen;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod features;
pub mod io;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod prox;
pub mod solver;

pub use error::{Error, Result};

/// Dense column-major `f64` matrix used for every matrix quantity.
pub type Matrix = nalgebra::DMatrix<f64>;
