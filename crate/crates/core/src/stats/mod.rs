//! One-sided two-sample t-tests, Fleiss' kappa and Gaussian KDE.

mod kappa;
mod kde;
pub mod special;
mod ttest;

use thiserror::Error;

pub use kappa::{fleiss_kappa, KappaInput};
pub use kde::{kde, silverman_bandwidth, KdeSeries, DEFAULT_GRID_SIZE};
pub use ttest::{mean_var, t_test, Alternative, TTestResult, TestVariant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("rating matrix is empty")]
    EmptyInput,
    #[error("need at least 2 categories, got {0}")]
    TooFewCategories(usize),
    #[error("need at least 2 raters per item, got {0}")]
    TooFewRaters(u64),
    #[error("row {row} has {sum} ratings, expected {expected}")]
    RaggedRow { row: usize, sum: u64, expected: u64 },
    #[error("kappa undefined: all ratings fall in one category")]
    DegenerateMarginals,
    #[error("incomplete beta did not converge for a={a}, b={b}, x={x}")]
    NoConvergence { a: f64, b: f64, x: f64 },
    #[error("{0}")]
    Domain(String),
}
