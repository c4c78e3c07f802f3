//! Representation theory and Fourier analysis on SU(2) and the circle.
//!
//! SU(2) representations are labelled by `two_ell = 2ℓ`, so half-integer
//! weights stay exact. Rows and columns of every representation matrix are
//! indexed by the weight `j ∈ {-ℓ, …, ℓ}` in increasing order; slot `a`
//! carries `j = a - ℓ`.
//!
//! Euler angles follow the z–y–z factorization
//! `x(φ, θ, ψ) = exp(φ X₃) exp(θ X₂) exp(ψ X₃)` with `φ ∈ [0, 2π)`,
//! `θ ∈ [0, π]`, `ψ ∈ [0, 4π)`, and the Haar measure is normalized to mass 1.

mod field;
mod grid;
mod json;
mod wigner;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

pub use field::{
    fourier_forward, fourier_inverse, l2_inner, plancherel_norm_sq, spectral_inner, GridField,
    SpectralField,
};
pub use grid::{gauss_legendre, quadrature_grid, GridSpec};
pub use json::{GridFieldJson, SpectralEntryJson, SpectralFieldJson};
pub use wigner::{rep_tower, su2_element, wigner_matrix, wigner_small_d};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Su2,
    Torus,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Su2 => "su2",
            Group::Torus => "torus",
        }
    }
}

/// An irreducible unitary representation.
///
/// For SU(2) only `two_ell` is meaningful; for the circle only `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepIndex {
    pub group: Group,
    pub two_ell: u32,
    pub k: i32,
}

impl RepIndex {
    pub fn su2(two_ell: u32) -> Self {
        RepIndex { group: Group::Su2, two_ell, k: 0 }
    }

    pub fn torus(k: i32) -> Self {
        RepIndex { group: Group::Torus, two_ell: 0, k }
    }

    pub fn dim(&self) -> usize {
        match self.group {
            Group::Su2 => self.two_ell as usize + 1,
            Group::Torus => 1,
        }
    }

    /// ℓ for SU(2), |k| for the circle.
    pub fn ell<T: Real>(&self) -> T {
        match self.group {
            Group::Su2 => T::lit(self.two_ell as f64 * 0.5),
            Group::Torus => T::lit(self.k.unsigned_abs() as f64),
        }
    }

    /// Laplacian eigenvalue: ℓ(ℓ+1) on SU(2), k² on the circle.
    pub fn casimir<T: Real>(&self) -> T {
        match self.group {
            Group::Su2 => {
                let n = self.two_ell as f64;
                T::lit(n * (n + 2.0) / 4.0)
            }
            Group::Torus => T::lit((self.k as f64) * (self.k as f64)),
        }
    }

    /// Weight `j = a - ℓ` carried by slot `a` (zero on the circle).
    pub fn weight<T: Real>(&self, slot: usize) -> T {
        match self.group {
            Group::Su2 => T::lit(slot as f64 - self.two_ell as f64 * 0.5),
            Group::Torus => T::zero(),
        }
    }

    /// Position of this representation in [`dual_enumerate`] order.
    pub fn position(&self, band: u32) -> Option<usize> {
        match self.group {
            Group::Su2 => (self.two_ell <= band).then_some(self.two_ell as usize),
            Group::Torus => {
                (self.k.unsigned_abs() <= band).then_some((self.k + band as i32) as usize)
            }
        }
    }

    pub fn label(&self) -> String {
        match self.group {
            Group::Su2 if self.two_ell % 2 == 0 => format!("l={}", self.two_ell / 2),
            Group::Su2 => format!("l={}/2", self.two_ell),
            Group::Torus => format!("k={}", self.k),
        }
    }
}

/// Representations up to the bandlimit: `two_ell ∈ 0..=band` on SU(2),
/// `k ∈ -band..=band` on the circle.
pub fn dual_enumerate(group: Group, band: u32) -> Vec<RepIndex> {
    match group {
        Group::Su2 => (0..=band).map(RepIndex::su2).collect(),
        Group::Torus => (-(band as i32)..=band as i32).map(RepIndex::torus).collect(),
    }
}
