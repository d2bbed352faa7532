//! Synthesis and assessment of endurance time excitation functions (ETEFs):
//! intensifying accelerograms whose running response spectrum grows toward a
//! scaled target spectrum, so a single dynamic analysis sweeps many intensity
//! levels.
//!
//! The pipeline: an accelerogram is parameterized by a reduced set of wavelet
//! coefficients ([`signal`]), the mismatch between its running spectrum and
//! the intensifying target is scored over a period/time grid ([`spectra`]),
//! and a particle swarm drives that mismatch down ([`pso`]). [`validation`]
//! holds a nonlinear degrading-hysteresis building model for checking what
//! the generated excitations do to a structure.
//!
//! All numerical kernels are generic over [`Scalar`] (`f32` or `f64`);
//! aliases below fix `f64`, the precision used end to end by the CLI.

// Input validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`:
// the negated form also rejects NaN, which the direct comparison lets pass.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod pso;
pub mod signal;
pub mod spectra;
pub mod validation;

mod scalar;
pub use scalar::{cast, Scalar};

/// `f64` accelerogram.
pub type Series64 = signal::AccelTimeSeries<f64>;
/// `f64` reduced wavelet-coefficient vector.
pub type Decision64 = signal::DecisionVector<f64>;
/// `f64` spectral-acceleration grid over (period, time).
pub type Spectrum64 = spectra::SpectrumGrid<f64>;
/// `f64` swarm configuration.
pub type SwarmConfig64 = pso::SwarmConfig<f64>;
