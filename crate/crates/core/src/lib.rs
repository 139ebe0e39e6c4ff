// SPDX-License-Identifier: Apache-2.0

//! Numerical laboratory for the coupled mKdV system
//!
//! ```text
//! v_t + v_xxx + (v w^2)_x = 0
//! w_t + alpha w_xxx + (v^2 w)_x = 0
//! ```
//!
//! The crate is split into four layers:
//!
//! * [`spectral`]: periodic grids, transforms, Sobolev and Bourgain norms.
//! * [`evolution`]: Airy groups, ETDRK4 time stepping and the Picard/Duhamel iterator.
//! * [`diagnostics`]: the conserved functionals `I1`, `I2` and convergence studies.
//! * [`lab`]: frequency-rectangle counterexample families, exact box-convolution
//!   norms, resonance constants, integral-bound checks and scaling-exponent fits.

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod lab;
pub mod params;
pub mod spectral;

pub use error::{Error, Result};
pub use params::ModelParams;
pub use spectral::{bracket, FieldPair, FourierGrid, SpaceTimeGrid, WeightSpec};
