//! Kratzer plus generalized Morse (KPGM) diatomic model.
//!
//! The crate evaluates the model potential and its exponential
//! (Greene–Aldrich) approximation, the closed-form bound-state spectrum and
//! Jacobi-polynomial wavefunctions, and the vibrational partition function
//! with the thermodynamic functions derived from it. Every closed form has an
//! independent numerical counterpart in [`oracles`] (adaptive quadrature,
//! Richardson derivatives, a finite-difference eigensolver and
//! extended-precision series), and [`validation`] wires the two together.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`). The stated
//! accuracy targets assume `f64`; the aliases at the crate root fix that
//! choice for callers that do not care.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// quadrature nodes and series coefficients are kept as tabulated
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod model;
pub mod oracles;
pub mod specfun;
pub mod spectrum;
pub mod thermo;
pub mod validation;
pub mod wavefunction;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

pub use error::{KpgmError, Result};
pub use model::{DimensionlessSet, MoleculeSpec, NUCoefficients, QuantumNumbers};
pub use spectrum::{LevelCap, ThermoCoeffs};
pub use thermo::{ThermoPath, ThermoPoint};
pub use wavefunction::{NormMode, RadialSample, RadialState};

/// Scalar type the model is written against.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Complex number over the model scalar.
pub type ComplexValue<T> = num_complex::Complex<T>;

pub type Molecule = MoleculeSpec<f64>;
pub type Dimensionless = DimensionlessSet<f64>;
pub type NuCoeffs = NUCoefficients<f64>;
pub type Coeffs = ThermoCoeffs<f64>;
pub type Point = ThermoPoint<f64>;
pub type Sample = RadialSample<f64>;
pub type State = RadialState<f64>;

pub type Complex64 = ComplexValue<f64>;
