// SPDX-License-Identifier: Apache-2.0

//! Periodic collocation grids, transforms, and the weighted norms built on them.

mod field;
mod grid;
mod norms;
mod weight;

pub use field::FieldPair;
pub use grid::{FourierGrid, SpaceTimeGrid};
pub use norms::{bourgain_norm, l2_norm_quadrature, sobolev_norm, sobolev_norm_spectrum};
pub use weight::{bracket, WeightSpec};
