// SPDX-License-Identifier: Apache-2.0

//! Linear Airy groups, the cubic nonlinearity, time integrators and the
//! Picard/Duhamel iterator.

mod etdrk4;
mod linear;
mod picard;
mod rhs;
mod simulate;
mod splitstep;

pub use etdrk4::{step_etdrk4, Etdrk4};
pub use linear::{airy_symbol, unitary_group_apply, unitary_group_apply_spectrum};
pub use picard::{picard_iterate, picard_vs_solver, PicardConfig, PicardIterate, PicardReport, SolverAgreement};
pub use rhs::{nonlinear_rhs, Nonlinearity, SpectralPair};
pub use simulate::{run_simulation, SolverConfig, Trajectory, DEFAULT_DEALIAS};
pub use splitstep::step_split;
