// SPDX-License-Identifier: Apache-2.0

//! Criterion benchmarks for the spectral kernels live in `benches/`.
