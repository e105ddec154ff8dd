//! Command-line companion to `selent-core`: sample loading, the two-sample
//! analysis pipeline, CSV-to-SVG plotting, and the `selent` binary surface.

// `!(x > 0.0)` style guards are deliberate: unlike `x <= 0.0` they are true
// for NaN, so invalid inputs are rejected instead of waved through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod plot;
