//! Numerical toolkit for first-order coherence experiments with multi-mode
//! laser diodes and unequal fiber paths.
//!
//! The crate is organised around five pieces:
//!
//! - [`spectral_model`]: Gaussian lines, delta combs and measured CSV spectra
//! - [`coherence_analysis`]: degree of coherence, visibility curves and
//!   coherence lengths, both closed-form and by numerical transform
//! - [`interference_engine`]: stochastic multi-mode field synthesis, two-arm
//!   delay, double-slit fringe patterns and visibility statistics
//! - [`timing_logic`]: event-exact simulation of the switch / detector /
//!   AND-XOR gate chain
//! - [`io`]: configuration files, CSV tables and SVG rendering
//!
//! Frequencies are in Hz, lengths in metres and times in seconds throughout.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherence_analysis;
pub mod error;
pub mod interference_engine;
pub mod io;
pub mod spectral_model;
pub mod timing_logic;

pub use error::{Error, Result};

/// Speed of light in vacuum (m/s), exact SI value.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Converts a vacuum wavelength (m) to optical frequency (Hz).
#[inline]
pub fn wavelength_to_frequency(lambda_m: f64) -> f64 {
    SPEED_OF_LIGHT / lambda_m
}

/// Converts an optical frequency (Hz) to vacuum wavelength (m).
#[inline]
pub fn frequency_to_wavelength(nu_hz: f64) -> f64 {
    SPEED_OF_LIGHT / nu_hz
}
