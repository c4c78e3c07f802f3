//! Block operators acting on stacks of spectral fields.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonic::{dual_enumerate, spectral_inner, Group, SpectralField};
use crate::scalar::{creal, CMatrix, Complex, Real};
use crate::symbol::{Symbol, TimeProfile};

use std::sync::Arc;

/// State of a (block) evolution: one field per component.
pub type Stack<T> = Vec<SpectralField<T>>;

/// `Σ_i ‖v_i‖²`
pub fn stack_norm_sq<T: Real>(v: &[SpectralField<T>]) -> T {
    v.iter().fold(T::zero(), |a, f| a + f.norm_sq())
}

/// `Σ_i (a_i, b_i)`
pub fn stack_inner<T: Real>(a: &[SpectralField<T>], b: &[SpectralField<T>]) -> Complex<T> {
    a.iter().zip(b).fold(creal(T::zero()), |acc, (x, y)| acc + spectral_inner(x, y))
}

pub(crate) fn stack_axpy<T: Real>(y: &mut [SpectralField<T>], c: Complex<T>, x: &[SpectralField<T>]) {
    for (y, x) in y.iter_mut().zip(x) {
        y.axpy(c, x);
    }
}

pub(crate) fn flatten<T: Real>(v: &[SpectralField<T>]) -> Vec<Complex<T>> {
    v.iter().flat_map(|f| f.coeffs.iter().flat_map(|m| m.iter().copied())).collect()
}

pub(crate) fn unflatten<T: Real>(data: &[Complex<T>], like: &[SpectralField<T>]) -> Stack<T> {
    let mut it = data.iter().copied();
    like.iter()
        .map(|f| f.map_blocks(|_, m| CMatrix::from_iterator(m.nrows(), m.ncols(), it.by_ref().take(m.len()))))
        .collect()
}

/// Rows `i·d..(i+1)·d` hold component `i` at representation position `k`.
pub(crate) fn gather<T: Real>(v: &[SpectralField<T>], k: usize) -> CMatrix<T> {
    let d = v[0].coeffs[k].nrows();
    let mut out = CMatrix::zeros(v.len() * d, d);
    for (i, f) in v.iter().enumerate() {
        out.view_mut((i * d, 0), (d, d)).copy_from(&f.coeffs[k]);
    }
    out
}

pub(crate) fn scatter<T: Real>(blocks: Vec<CMatrix<T>>, like: &[SpectralField<T>]) -> Stack<T> {
    like.iter()
        .enumerate()
        .map(|(i, f)| {
            let mut out = f.clone();
            for (m, b) in out.coeffs.iter_mut().zip(&blocks) {
                let d = m.nrows();
                m.copy_from(&b.view((i * d, 0), (d, d)));
            }
            out
        })
        .collect()
}

/// An `n×n` matrix of symbols; absent blocks are zero.
#[derive(Clone, Debug)]
pub struct BlockOperator<T: Real> {
    group: Group,
    size: usize,
    blocks: Vec<Option<Symbol<T>>>,
}

impl<T: Real> BlockOperator<T> {
    pub fn zeros(group: Group, size: usize) -> Self {
        BlockOperator { group, size, blocks: vec![None; size * size] }
    }

    pub fn scalar(sym: Symbol<T>) -> Self {
        BlockOperator { group: sym.group(), size: 1, blocks: vec![Some(sym)] }
    }

    pub fn with_block(mut self, i: usize, j: usize, sym: Symbol<T>) -> Result<Self> {
        if i >= self.size || j >= self.size {
            return Err(Error::Shape(format!("block ({i},{j}) outside a {0}x{0} operator", self.size)));
        }
        if sym.group() != self.group {
            return Err(Error::WrongGroup { expected: self.group, found: sym.group() });
        }
        self.blocks[i * self.size + j] = Some(sym);
        Ok(self)
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&Symbol<T>> {
        self.blocks[i * self.size + j].as_ref()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn group(&self) -> Group {
        self.group
    }

    fn present(&self) -> impl Iterator<Item = &Symbol<T>> {
        self.blocks.iter().flatten()
    }

    /// Largest bandlimit every block supports.
    pub fn band(&self) -> u32 {
        self.present().map(|s| s.band()).min().unwrap_or(u32::MAX)
    }

    pub fn x_independent(&self) -> bool {
        self.present().all(|s| s.meta().x_independent)
    }

    pub fn t_independent(&self) -> bool {
        self.present().all(|s| s.meta().t_independent)
    }

    /// Largest declared order among the blocks.
    pub fn order(&self) -> T {
        self.present().map(|s| s.meta().order).fold(T::zero(), |a, b| a.max(b))
    }

    pub(crate) fn check_state(&self, v: &[SpectralField<T>]) -> Result<()> {
        if v.len() != self.size {
            return Err(Error::Shape(format!("{} components for a {}-block operator", v.len(), self.size)));
        }
        let first = &v[0];
        if v.iter().any(|f| f.group != self.group || !f.compatible(first)) {
            return Err(Error::GridMismatch);
        }
        if first.band > self.band() {
            return Err(Error::Bandlimit { requested: first.band, available: self.band() });
        }
        Ok(())
    }

    /// `(K(t) v)_i = Σ_j K_ij(t) v_j`
    pub fn apply(&self, t: T, v: &[SpectralField<T>]) -> Result<Stack<T>> {
        self.check_state(v)?;
        (0..self.size)
            .into_par_iter()
            .map(|i| {
                let mut out = SpectralField::zeros(v[0].group, v[0].band);
                for (j, vj) in v.iter().enumerate() {
                    if let Some(s) = self.block(i, j) {
                        out.axpy(creal(T::one()), &s.apply_spectral(t, vj)?);
                    }
                }
                Ok(out)
            })
            .collect()
    }

    /// Assembled `(n·d)×(n·d)` matrix per representation up to `band`, from
    /// exact blocks (x-independent operators) or mean-coefficient blocks.
    pub(crate) fn rep_matrices(&self, t: T, band: u32, mean: bool) -> Result<Vec<CMatrix<T>>> {
        let reps = dual_enumerate(self.group, band);
        let n = self.size;
        let per_block: Vec<Option<Vec<CMatrix<T>>>> = self
            .blocks
            .iter()
            .map(|b| {
                b.as_ref()
                    .map(|s| {
                        if mean {
                            let all = s.mean_blocks(t)?;
                            Ok(reps.iter().map(|r| all[r.position(s.band()).expect("band checked")].clone()).collect())
                        } else {
                            reps.iter().map(|&r| s.eval(t, None, r)).collect::<Result<Vec<_>>>()
                        }
                    })
                    .transpose()
            })
            .collect::<Result<_>>()?;
        Ok(reps
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let d = r.dim();
                let mut out = CMatrix::zeros(n * d, n * d);
                for (b, mats) in per_block.iter().enumerate() {
                    if let Some(mats) = mats {
                        out.view_mut(((b / n) * d, (b % n) * d), (d, d)).copy_from(&mats[k]);
                    }
                }
                out
            })
            .collect())
    }

    /// Operator-norm bound: largest row sum of block norm bounds.
    pub fn norm_bound(&self, t: T) -> Result<T> {
        let mut worst = T::zero();
        for i in 0..self.size {
            let mut row = T::zero();
            for j in 0..self.size {
                if let Some(s) = self.block(i, j) {
                    row += s.norm_bound(t)?;
                }
            }
            worst = worst.max(row);
        }
        Ok(worst)
    }
}

/// Evaluator for arbitrary forcing: `t ↦ f(t)`.
pub type ForcingFn<T> = dyn Fn(T) -> Stack<T> + Send + Sync;

/// Right-hand side `f(t)` of the evolution equation.
#[derive(Clone, Default)]
pub enum Forcing<T: Real> {
    #[default]
    Zero,
    /// `profile(t) · field`, constant when the profile is absent.
    Separable { field: Stack<T>, profile: Option<TimeProfile<T>> },
    Custom(Arc<ForcingFn<T>>),
}

impl<T: Real> std::fmt::Debug for Forcing<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Forcing::Zero => write!(f, "Zero"),
            Forcing::Separable { profile, .. } => write!(f, "Separable({profile:?})"),
            Forcing::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl<T: Real> Forcing<T> {
    pub fn constant(field: Stack<T>) -> Self {
        Forcing::Separable { field, profile: None }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Forcing::Zero)
    }

    pub fn t_independent(&self) -> bool {
        match self {
            Forcing::Zero => true,
            Forcing::Separable { profile, .. } => profile.is_none_or(|p| p.is_constant()),
            Forcing::Custom(_) => false,
        }
    }

    /// `f(t)`, or `None` when identically zero.
    pub fn eval(&self, t: T) -> Option<Stack<T>> {
        match self {
            Forcing::Zero => None,
            Forcing::Separable { field, profile: None } => Some(field.clone()),
            Forcing::Separable { field, profile: Some(p) } => {
                let c = creal(p.eval(t));
                Some(field.iter().map(|f| f.scale(c)).collect())
            }
            Forcing::Custom(f) => Some(f(t)),
        }
    }

    pub(crate) fn check(&self, like: &[SpectralField<T>]) -> Result<()> {
        let check = |v: &[SpectralField<T>]| {
            if v.len() != like.len() || v.iter().zip(like).any(|(a, b)| !a.compatible(b)) {
                Err(Error::GridMismatch)
            } else {
                Ok(())
            }
        };
        match self {
            Forcing::Zero => Ok(()),
            Forcing::Separable { field, .. } => check(field),
            Forcing::Custom(f) => check(&f(T::zero())),
        }
    }
}
