//! Functional calculus on Hermitian positive semidefinite blocks.

use crate::error::{Error, Result};
use crate::scalar::{cabs, creal, is_diagonal, CMatrix, Real};

/// Eigenvalues above `-CLAMP` are treated as rounding noise and set to zero.
const CLAMP: f64 = 1e-12;

/// Largest entry of `|M - M*|`.
pub fn hermitian_deviation<T: Real>(m: &CMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = cabs(m[(i, j)] - m[(j, i)].conj());
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

fn pow0<T: Real>(x: T, p: T) -> T {
    if p == T::zero() {
        T::one()
    } else if x == T::zero() {
        T::zero()
    } else {
        x.powf(p)
    }
}

fn clamp<T: Real>(x: T, scale: T) -> Result<T> {
    let floor = T::tol(CLAMP) * scale;
    if x >= T::zero() {
        Ok(x)
    } else if -x <= floor {
        Ok(T::zero())
    } else {
        Err(Error::NegativeEigenvalue { value: x.as_f64() })
    }
}

/// `M^p` for Hermitian PSD `M` and `p ≥ 0`, with `0^0 = 1`.
///
/// Diagonal input is handled entrywise; otherwise through an eigendecomposition.
pub fn fractional_power<T: Real>(m: &CMatrix<T>, p: T) -> Result<CMatrix<T>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!("{}x{} block is not square", m.nrows(), m.ncols())));
    }
    if p < T::zero() || !p.is_finite() {
        return Err(Error::Range(format!("power {} must be a finite value >= 0", p.as_f64())));
    }
    let scale = m.iter().map(|z| cabs(*z)).fold(T::one(), |a, b| if b > a { b } else { a });
    let dev = hermitian_deviation(m);
    if dev > T::tol(CLAMP) * scale {
        return Err(Error::NotHermitian { deviation: dev.as_f64() });
    }
    let n = m.nrows();
    if is_diagonal(m) {
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = creal(pow0(clamp(m[(i, i)].re, scale)?, p));
        }
        return Ok(out);
    }
    let sym = (m + m.adjoint()) * creal(T::lit(0.5));
    let eig = sym.symmetric_eigen();
    let mut lam = CMatrix::zeros(n, n);
    for i in 0..n {
        lam[(i, i)] = creal(pow0(clamp(eig.eigenvalues[i], scale)?, p));
    }
    let v = &eig.eigenvectors;
    Ok(v * lam * v.adjoint())
}
