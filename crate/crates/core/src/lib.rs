//! Numerical toolkit for the hidden-measurement picture of quantum measurement.
//!
//! - [`blochcore`]: pure and operator states, generalized Bloch vectors,
//!   measurement simplexes, Born probabilities and decoherence.
//! - [`collapse`]: the membrane break-point mechanism and its Born-rule checks.
//! - [`perception`]: stimulus/percept distances and categorical-perception warping.
//! - [`entangle`]: two-qubit tripartite decomposition, CHSH and marginal laws.
//! - [`wordgas`]: rank-frequency spectra fitted with Bose-Einstein and
//!   Maxwell-Boltzmann occupations, Zipf slopes and microstate counting.
//! - [`interference`]: disjunction interference terms and screen rasters.
//! - [`cli`]: batch command-line front end.

// Negated comparisons reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blochcore;
pub mod cli;
pub mod collapse;
pub mod entangle;
pub mod error;
pub mod interference;
pub mod perception;
pub mod random;
pub mod tolerance;
pub mod wordgas;

pub use error::{Error, Result};
pub use tolerance::Tolerances;

/// Complex amplitude, stored as an `(re, im)` pair of `f64`.
pub type C64 = num_complex::Complex64;
