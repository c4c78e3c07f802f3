use nalgebra::{ComplexField, DMatrix, Matrix2};

use super::{Group, RepIndex};
use crate::error::{Error, Result};
use crate::scalar::{cis, cplx, CMatrix, Complex, Real};

/// The 2×2 matrix of `exp(φX₃) exp(θX₂) exp(ψX₃)` in the defining
/// representation, rows ordered by weight `(-1/2, +1/2)`.
pub fn su2_element<T: Real>(phi: T, theta: T, psi: T) -> Matrix2<Complex<T>> {
    let half = T::lit(0.5);
    let (c, s) = ((theta * half).cos(), (theta * half).sin());
    let sum = cis((phi + psi) * half);
    let diff = cis((phi - psi) * half);
    Matrix2::new(
        sum * c,
        diff * s,
        -diff.conj() * s,
        sum.conj() * c,
    )
}

/// All representation matrices `ξ^ℓ(U)` for `2ℓ = 0..=two_l`, built from the
/// defining 2×2 matrix by the half-step recursion ℓ-½ → ℓ.
///
/// Each step realises the spin-ℓ representation on homogeneous polynomials of
/// degree 2ℓ, so every coefficient in the update is a ratio of square roots
/// bounded by one and no factorials appear.
pub fn rep_tower<N: ComplexField + Copy>(u: &Matrix2<N>, two_l: u32) -> Vec<DMatrix<N>> {
    let top = two_l as usize;
    let root: Vec<N> = (0..=top.max(1))
        .map(|k| N::from_real(nalgebra::convert::<f64, N::RealField>((k as f64).sqrt())))
        .collect();
    let mut out: Vec<DMatrix<N>> = Vec::with_capacity(top + 1);
    out.push(DMatrix::from_element(1, 1, N::one()));
    for n in 1..=top {
        let prev = &out[n - 1];
        let mut next = DMatrix::<N>::zeros(n + 1, n + 1);
        for b in 0..=n {
            let (col, lo, hi, den) = if b < n {
                (b, u[(0, 0)], u[(1, 0)], root[n - b])
            } else {
                (n - 1, u[(0, 1)], u[(1, 1)], root[n])
            };
            for a in 0..=n {
                let mut acc = N::zero();
                if a < n {
                    acc += root[n - a] * lo * prev[(a, col)];
                }
                if a >= 1 {
                    acc += root[a] * hi * prev[(a - 1, col)];
                }
                next[(a, b)] = acc / den;
            }
        }
        out.push(next);
    }
    out
}

/// Real Wigner small-d matrices `d^ℓ(θ)` for `2ℓ = 0..=two_l`.
pub fn wigner_small_d<T: Real>(two_l: u32, theta: T) -> Vec<DMatrix<T>> {
    let half = T::lit(0.5);
    let (c, s) = ((theta * half).cos(), (theta * half).sin());
    rep_tower(&Matrix2::new(c, s, -s, c), two_l)
}

/// `ξ^ℓ(x(φ, θ, ψ))` with entries `e^{-i j_a φ} d^ℓ_{ab}(θ) e^{-i j_b ψ}`.
pub fn wigner_matrix<T: Real>(rep: RepIndex, angles: (T, T, T)) -> Result<CMatrix<T>> {
    if rep.group != Group::Su2 {
        return Err(Error::WrongGroup { expected: Group::Su2, found: rep.group });
    }
    let (phi, theta, psi) = angles;
    let d = wigner_small_d(rep.two_ell, theta).pop().expect("tower is never empty");
    let dim = rep.dim();
    let phase_phi: Vec<Complex<T>> = (0..dim).map(|a| cis(-rep.weight::<T>(a) * phi)).collect();
    let phase_psi: Vec<Complex<T>> = (0..dim).map(|b| cis(-rep.weight::<T>(b) * psi)).collect();
    Ok(CMatrix::from_fn(dim, dim, |a, b| {
        phase_phi[a] * cplx(d[(a, b)], T::zero()) * phase_psi[b]
    }))
}
