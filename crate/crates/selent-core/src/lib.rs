//! Estimation of the Shannon entropy of a gamma population selected by the
//! natural rule "pick the larger (or smaller) of two observations".
//!
//! Two independent statistics `X1`, `X2` follow `Gamma(alpha, theta_i)` with a
//! common known shape `alpha` and unknown scales. Selecting the population with
//! the larger observation targets the worse (larger-scale, higher-entropy)
//! population; the smaller observation targets the better one. The estimand is
//! `ln theta_selected`; the remaining entropy terms are a known additive
//! constant (see [`estimators::entropy_gamma`]).
//!
//! The crate provides:
//!
//! * [`numerics`]: special functions, half-line quadrature, root finding;
//! * [`constants`]: the admissibility-band constants `c1..c3`, prior-exponent
//!   boundaries `beta0`/`beta1`, risk-minimizing kernels, and table generation;
//! * [`estimators`]: naive, generalized Bayes, and shrinkage estimators for
//!   both selection targets, plus the generic improvement operators;
//! * [`montecarlo`]: seeded gamma sampling and empirical risk evaluation with
//!   common random numbers.
//!
//! Everything is `no_std`-compatible (with `alloc`); all floating-point math
//! goes through `libm`, so results are bit-identical across platforms.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]
// `!(x > 0.0)` style guards are deliberate: unlike `x <= 0.0` they are true
// for NaN, so invalid inputs are rejected instead of waved through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod constants;
pub mod error;
pub mod estimators;
pub mod montecarlo;
pub mod numerics;

pub use error::Error;
pub use numerics::{QuadratureConfig, Shape};
