// SPDX-License-Identifier: Apache-2.0

//! Conserved functionals, drift tracking and convergence studies.

mod convergence;
mod invariants;

pub use convergence::{convergence_study, ConvergenceReport, Order};
pub use invariants::{invariant_i1, invariant_i2, max_drift, relative_drift, spectral_derivative, InvariantRecord};
