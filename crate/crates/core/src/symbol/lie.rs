//! Per-representation matrices of the basic invariant operators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{Group, RepIndex};
use crate::scalar::{cplx, creal, CMatrix, Real};

/// Left-invariant first-order operators on SU(2).
///
/// `d0`, `d+`, `d-` are the neutral, creation and annihilation operators;
/// `X1 = -i(d- + d+)/2`, `X2 = (d- - d+)/2`, `X3 = -i d0`, and `iX3 = d0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VectorField {
    D0,
    DPlus,
    DMinus,
    X1,
    X2,
    X3,
    IX3,
}

impl VectorField {
    pub const ALL: [VectorField; 7] = [
        VectorField::D0,
        VectorField::DPlus,
        VectorField::DMinus,
        VectorField::X1,
        VectorField::X2,
        VectorField::X3,
        VectorField::IX3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VectorField::D0 => "d0",
            VectorField::DPlus => "d+",
            VectorField::DMinus => "d-",
            VectorField::X1 => "X1",
            VectorField::X2 => "X2",
            VectorField::X3 => "X3",
            VectorField::IX3 => "iX3",
        }
    }

    /// Whether the symbol is Hermitian (`d0`, `iX3`).
    pub fn is_hermitian(self) -> bool {
        matches!(self, VectorField::D0 | VectorField::IX3)
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, VectorField::D0 | VectorField::IX3 | VectorField::X3)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VectorField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VectorField::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::UnknownField(s.to_string()))
    }
}

/// Which Sobolev scale a weight refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// `⟨ξ⟩ = (1 + λ_ξ)^{1/2}` from the Laplacian.
    Elliptic,
    /// `M̂(ξ) = diag((1 + ν_ii²)^{1/2})` from the sub-Laplacian.
    Subelliptic,
}

fn require_su2(rep: RepIndex) -> Result<()> {
    if rep.group == Group::Su2 {
        Ok(())
    } else {
        Err(Error::WrongGroup { expected: Group::Su2, found: rep.group })
    }
}

fn diag<T: Real>(dim: usize, f: impl Fn(usize) -> T) -> CMatrix<T> {
    let mut m = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        m[(a, a)] = creal(f(a));
    }
    m
}

/// `λ_ξ · I`: `ℓ(ℓ+1)` on SU(2), `k²` on the circle.
pub fn laplace_symbol<T: Real>(rep: RepIndex) -> CMatrix<T> {
    let lambda = rep.casimir::<T>();
    diag(rep.dim(), |_| lambda)
}

/// Symbol of `-X₁² - X₂²`: `diag(ℓ(ℓ+1) - j²)`.
pub fn sublaplace_symbol<T: Real>(rep: RepIndex) -> Result<CMatrix<T>> {
    require_su2(rep)?;
    let lambda = rep.casimir::<T>();
    Ok(diag(rep.dim(), |a| {
        let j = rep.weight::<T>(a);
        lambda - j * j
    }))
}

/// Raising matrix with `J₊ e_a = sqrt((2ℓ - a)(a + 1)) e_{a+1}`.
fn raising<T: Real>(rep: RepIndex) -> CMatrix<T> {
    let n = rep.two_ell as usize;
    let mut m = CMatrix::zeros(n + 1, n + 1);
    for a in 0..n {
        m[(a + 1, a)] = creal(T::lit((((n - a) * (a + 1)) as f64).sqrt()));
    }
    m
}

/// `dξ(X)`, so that `X ξ_{ab}(x) = (ξ(x) dξ(X))_{ab}`.
pub fn vector_field_symbol<T: Real>(which: VectorField, rep: RepIndex) -> Result<CMatrix<T>> {
    require_su2(rep)?;
    let dim = rep.dim();
    let jz = || diag(dim, |a| rep.weight::<T>(a));
    let half = T::lit(0.5);
    Ok(match which {
        VectorField::D0 | VectorField::IX3 => jz(),
        VectorField::X3 => jz() * cplx(T::zero(), -T::one()),
        VectorField::DPlus => raising(rep),
        VectorField::DMinus => raising::<T>(rep).transpose(),
        VectorField::X1 => {
            let p = raising::<T>(rep);
            (&p + p.transpose()) * cplx(T::zero(), -half)
        }
        VectorField::X2 => {
            let p = raising::<T>(rep);
            (p.transpose() - &p) * creal(half)
        }
    })
}

/// `⟨ξ⟩^s` (elliptic) or `M̂(ξ)^s` (subelliptic). On the circle both are `(1 + k²)^{s/2}`.
pub fn bessel_weight<T: Real>(rep: RepIndex, s: T, kind: WeightKind) -> CMatrix<T> {
    let half_s = s * T::lit(0.5);
    match (kind, rep.group) {
        (WeightKind::Subelliptic, Group::Su2) => {
            let lambda = rep.casimir::<T>();
            diag(rep.dim(), |a| {
                let j = rep.weight::<T>(a);
                (T::one() + lambda - j * j).powf(half_s)
            })
        }
        _ => {
            let w = (T::one() + rep.casimir::<T>()).powf(half_s);
            diag(rep.dim(), |_| w)
        }
    }
}
