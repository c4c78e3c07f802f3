//! Scalar abstraction shared by every numerical module.

use nalgebra::{DMatrix, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

pub use nalgebra::Complex;

/// Real scalar the solver is generic over (`f32` or `f64`).
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Default {
    /// Converts an `f64` literal into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// `tol` floored at a small multiple of machine epsilon, so f64 tolerances
    /// stay meaningful when the crate is instantiated at f32.
    fn tol(tol: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(64.0);
        let t = Self::lit(tol);
        if t < floor {
            floor
        } else {
            t
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Dense complex matrix, the per-representation block type.
pub type CMatrix<T> = DMatrix<Complex<T>>;

pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// |z| without requiring `num_traits::Float`.
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

/// e^{i a}
pub(crate) fn cis<T: Real>(a: T) -> Complex<T> {
    Complex::new(a.cos(), a.sin())
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| cabs(*x - *y))
        .fold(T::zero(), |m, v| if v > m { v } else { m })
}

/// Squared Hilbert–Schmidt norm.
pub fn hs_norm_sq<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Whether every off-diagonal entry is exactly zero.
pub fn is_diagonal<T: Real>(a: &CMatrix<T>) -> bool {
    a.nrows() == a.ncols()
        && a.iter()
            .enumerate()
            .all(|(k, z)| k % a.nrows() == k / a.nrows() || (z.re == T::zero() && z.im == T::zero()))
}
