//! Restarted, right-preconditioned GMRES on flat complex vectors.

use crate::error::{Error, Result};
use crate::scalar::{cabs, creal, Complex, Real};

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(creal(T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

pub(crate) struct Solved<T> {
    pub x: Vec<Complex<T>>,
    pub iterations: usize,
    pub residual: T,
}

/// Solves `A x = b` to relative residual `tol`, preconditioning on the right
/// by `m_inv ≈ A⁻¹`.
pub(crate) fn gmres<T: Real>(
    a: impl Fn(&[Complex<T>]) -> Result<Vec<Complex<T>>>,
    m_inv: impl Fn(&[Complex<T>]) -> Result<Vec<Complex<T>>>,
    b: &[Complex<T>],
    x0: Vec<Complex<T>>,
    tol: T,
    restart: usize,
    max_iter: usize,
) -> Result<Solved<T>> {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == T::zero() {
        return Ok(Solved { x: vec![creal(T::zero()); n], iterations: 0, residual: T::zero() });
    }
    let mut x = x0;
    let mut iterations = 0;
    loop {
        let ax = a(&x)?;
        let r: Vec<_> = b.iter().zip(&ax).map(|(b, a)| *b - *a).collect();
        let beta = norm(&r);
        if beta <= tol * bnorm {
            return Ok(Solved { x, iterations, residual: beta / bnorm });
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence { iterations, residual: (beta / bnorm).as_f64() });
        }
        let mut v: Vec<Vec<Complex<T>>> = vec![r.iter().map(|z| *z / beta).collect()];
        let mut h: Vec<Vec<Complex<T>>> = Vec::new();
        let mut cs: Vec<(T, Complex<T>)> = Vec::new();
        let mut g = vec![creal(beta)];
        let mut k = 0;
        while k < restart && iterations < max_iter {
            let mut w = a(&m_inv(&v[k])?)?;
            let mut col = Vec::with_capacity(k + 2);
            for vi in &v {
                let hij = dot(vi, &w);
                for (wj, vj) in w.iter_mut().zip(vi) {
                    *wj -= *vj * hij;
                }
                col.push(hij);
            }
            let wn = norm(&w);
            col.push(creal(wn));
            for (i, &(c, s)) in cs.iter().enumerate() {
                let (h1, h2) = (col[i], col[i + 1]);
                col[i] = h1 * c + s * h2;
                col[i + 1] = -s.conj() * h1 + h2 * c;
            }
            let (h1, h2) = (col[k], col[k + 1]);
            let r = (h1.norm_sqr() + h2.norm_sqr()).sqrt();
            let (c, s) = if r == T::zero() {
                (T::one(), creal(T::zero()))
            } else if cabs(h1) == T::zero() {
                (T::zero(), h2.conj() / r)
            } else {
                let a1 = cabs(h1);
                (a1 / r, (h1 / a1) * h2.conj() / r)
            };
            col[k] = h1 * c + s * h2;
            col[k + 1] = creal(T::zero());
            let gk = g[k];
            g[k] = gk * c;
            g.push(-s.conj() * gk);
            cs.push((c, s));
            h.push(col);
            iterations += 1;
            k += 1;
            let breakdown = wn <= T::default_epsilon() * bnorm;
            if !breakdown {
                v.push(w.iter().map(|z| *z / wn).collect());
            }
            if cabs(g[k]) <= tol * bnorm || breakdown {
                break;
            }
        }
        // back substitution for the k×k triangular system
        let mut y = vec![creal(T::zero()); k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = acc / h[i][i];
        }
        let mut z = vec![creal(T::zero()); n];
        for (j, yj) in y.iter().enumerate() {
            for (zi, vi) in z.iter_mut().zip(&v[j]) {
                *zi += *vi * *yj;
            }
        }
        let dz = m_inv(&z)?;
        for (xi, d) in x.iter_mut().zip(dz) {
            *xi += d;
        }
    }
}
