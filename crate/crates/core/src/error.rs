// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid size {0} is not a power of two >= 8")]
    GridSize(usize),

    #[error("non-finite sample in {0}")]
    NonFinite(&'static str),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("step rejected at t = {time}: state became non-finite")]
    StepRejected { time: f64 },

    #[error("no real solution for {variant} at alpha = {alpha}")]
    NoRealSolution { variant: String, alpha: f64 },

    #[error("containment violated: {0}")]
    ContainmentViolated(String),

    #[error("empty family: {0}")]
    EmptyFamily(String),

    #[error("mismatched rectangle dimensions")]
    MismatchedDimensions,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("tail not converged after {doublings} doublings (tail/value = {ratio:e})")]
    TailNotConverged { doublings: usize, ratio: f64 },

    #[error("fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("non-positive value {0} in fit data")]
    NonPositive(f64),

    #[error("abscissae must be strictly increasing")]
    NotIncreasing,

    #[error("error sequence is not monotone: {0:?}")]
    NonMonotone(Vec<f64>),
}
