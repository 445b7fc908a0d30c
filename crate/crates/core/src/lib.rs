//! Polarization observables of photon and electron collisions with atoms.
//!
//! Differential cross-sections and probabilities are written as contractions
//! of state multipoles (irreducible polarization tensors) with
//! geometry-independent coefficients built from reduced matrix elements. The
//! reduced matrix elements themselves are input data.
//!
//! Module layout:
//! - [`angular`]: exact 3j/6j/9j symbols, harmonics, rotation matrices
//! - [`tensors`]: state, photon and spin polarization tensors
//! - [`amplitudes`]: reduced-amplitude tables and their loaders
//! - [`processes`]: coefficient builders and cross-section evaluators
//! - [`observables`]: asymmetry parameters, alignment, correlations
//! - [`oracle`]: brute-force magnetic-sublevel sums for cross-checking
//! - [`cli`]: the `polarkit` command-line driver

use num_traits::{Float, FloatConst, FromPrimitive};

pub mod amplitudes;
pub mod angular;
pub mod cli;
pub mod observables;
pub mod oracle;
pub mod processes;
pub mod tensors;

/// Scalar type accepted by the generic angular and tensor kernels.
pub trait Real: Float + FloatConst + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {}

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;
pub type Direction64 = angular::Direction<f64>;
pub type Direction32 = angular::Direction<f32>;
pub type EulerAngles64 = angular::EulerAngles<f64>;
pub type EulerAngles32 = angular::EulerAngles<f32>;

pub use angular::{AngularMomentum, Direction, EulerAngles};
