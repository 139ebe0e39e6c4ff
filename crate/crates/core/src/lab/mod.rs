// SPDX-License-Identifier: Apache-2.0

//! Counterexample families, exact box-convolution norms, resonance constants,
//! integral-bound checks and scaling-exponent fits.

mod boxconv;
mod c3;
mod families;
mod fit;
mod interval;
mod lemmas;
mod quadrature;
mod ratio;
mod region;
mod resonance;
mod sets;

pub use boxconv::{
    box_convolution_l2, box_convolution_norm_2d, conv_lower_bound_check, rect_convolution_norm,
    slab_convolution_lower, slab_convolution_upper, ConvBoundCheck, PiecewisePoly,
};
pub use c3::{c3_derivative_norm, c3_evaluate, c3_oracle, C3Family, C3Report, C3Setup, Component};
pub use families::{
    build_counterexample, expected_slope, CounterexampleFamily, FamilyId, InputFactor, OutputWeight,
    DEFAULT_R,
};
pub use fit::{fit_scaling_exponent, RatioEntry, RatioSeries};
pub use interval::{Cubic, Interval};
pub use lemmas::{
    integral_bound_check, integral_check, sup_integral_grid, IntegralCheck, LemmaCase, LemmaSweep, TAIL_FRACTION,
};
pub use quadrature::{adaptive, adaptive_breaks, gauss_breaks, gauss_panel, Adaptive};
pub use ratio::{bilinear_ratio, brute_force_lhs, estimate_ratio, trilinear_ratio, RatioReport};
pub use region::{classify, in_region, verify_estimate_region, RegionVerdict, Side, Verdict};
pub use resonance::{
    resonance_residual, solve_resonance_constants, PhaseKind, ResonanceFunction, ResonanceSystem,
    ResonanceVariant,
};
pub use sets::{cubic_range, image_bounds, verify_containment, FreqRect, Slab};
