//! Robust point forecasts for discrete outcomes whose forecast distribution
//! is only known to lie in a set.
//!
//! The crate computes extreme forecast probabilities over identified sets
//! (linear programs over discrete mixing distributions, or convex duals over
//! KL neighbourhoods), maps them to minimax and minimax-regret forecasts, and
//! averages the worst-case objectives over posterior or bootstrap draws.

pub mod bayes;
pub mod decision;
pub mod divergence;
pub mod error;
pub mod linear_model;
pub mod limit;
pub mod lp;
pub mod normal;
pub mod panel;

pub use decision::{
    BinaryBounds, Criterion, Decision, ForecastProbability, LossKind, LossSpec,
    MultinomialBounds, RiskReport,
};
pub use error::{Error, Result};
