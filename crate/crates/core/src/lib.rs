//! Spectral drift-diffusion on compact Lie groups.
//!
//! Solves `∂ₜv = K(t)v + f` on SU(2) and the circle, where `K(t)` is a sum of
//! coefficient-weighted fractional Laplacians, sub-Laplacians, Bessel
//! potentials and left-invariant vector fields, all acting through their
//! matrix-valued symbols on group Fourier coefficients.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod error;
pub mod evolve;
pub mod harmonic;
pub mod reduce;
pub mod scalar;
pub mod symbol;
pub mod wellposed;

pub use error::{Error, Result};
pub use scalar::{CMatrix, Complex, Real};

pub type SpectralField64 = harmonic::SpectralField<f64>;
pub type GridField64 = harmonic::GridField<f64>;
pub type GridSpec64 = harmonic::GridSpec<f64>;
pub type Symbol64 = symbol::Symbol<f64>;
pub type OperatorSpec64 = symbol::OperatorSpec<f64>;
pub type BlockOperator64 = evolve::BlockOperator<f64>;
pub type EvolutionProblem64 = evolve::EvolutionProblem<f64>;
pub type Trajectory64 = evolve::Trajectory<f64>;
pub type HigherOrderProblem64 = reduce::HigherOrderProblem<f64>;
pub type FirstOrderSystem64 = reduce::FirstOrderSystem<f64>;
