#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

//! Objective Bayesian model selection with generalized training samples.
//!
//! The crate computes intrinsic Bayes factors (arithmetic, geometric and
//! median averages over training samples), expected-posterior-prior Bayes
//! factors and intrinsic priors for censored exponential data, Bernoulli and
//! Poisson counts, and normal linear models. Training samples can be minimal,
//! sequential minimal (drawn without replacement until the posterior becomes
//! proper), weighted by information, or imaginary (drawn conditionally on
//! sufficient statistics).
//!
//! All Bayes factors over full data are carried as natural logarithms.

pub mod data;
pub mod error;
pub mod intrinsic;
pub mod linear;
pub mod marginals;
pub mod numerics;
pub mod selection;
pub mod training;

pub use error::{Error, Result};
