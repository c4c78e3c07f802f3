use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::{dual_enumerate, GridSpec, Group, RepIndex};
use crate::error::{Error, Result};
use crate::scalar::{cabs, cis, cplx, creal, hs_norm_sq, max_abs_diff, CMatrix, Complex, Real};

/// Group Fourier coefficients `f̂(ξ) = ∫ f(x) ξ(x)* dx` up to a bandlimit,
/// stored in [`dual_enumerate`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T: Real> {
    pub group: Group,
    pub band: u32,
    pub coeffs: Vec<CMatrix<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(group: Group, band: u32) -> Self {
        let coeffs = dual_enumerate(group, band)
            .iter()
            .map(|r| CMatrix::zeros(r.dim(), r.dim()))
            .collect();
        SpectralField { group, band, coeffs }
    }

    pub fn from_fn(group: Group, band: u32, mut f: impl FnMut(RepIndex) -> CMatrix<T>) -> Self {
        let coeffs = dual_enumerate(group, band).into_iter().map(&mut f).collect();
        SpectralField { group, band, coeffs }
    }

    /// Checks the shape invariants, for fields assembled by hand or read from disk.
    pub fn validate(&self) -> Result<()> {
        let reps = self.reps();
        if reps.len() != self.coeffs.len() {
            return Err(Error::Shape(format!(
                "{} coefficient blocks for {} representations",
                self.coeffs.len(),
                reps.len()
            )));
        }
        for (r, m) in reps.iter().zip(&self.coeffs) {
            if m.shape() != (r.dim(), r.dim()) {
                return Err(Error::Shape(format!("block {} has shape {:?}", r.label(), m.shape())));
            }
        }
        Ok(())
    }

    /// Spectrum of the single matrix coefficient `x ↦ ξ^ℓ_{ab}(x)`:
    /// by Peter–Weyl orthogonality it is `E_{ba} / d_ℓ` at ℓ and zero elsewhere.
    pub fn matrix_coefficient(rep: RepIndex, a: usize, b: usize, band: u32) -> Result<Self> {
        let pos = rep
            .position(band)
            .ok_or(Error::Bandlimit { requested: rep.two_ell.max(rep.k.unsigned_abs()), available: band })?;
        let d = rep.dim();
        if a >= d || b >= d {
            return Err(Error::Range(format!("entry ({a},{b}) outside a {d}x{d} representation")));
        }
        let mut out = Self::zeros(rep.group, band);
        out.coeffs[pos][(b, a)] = creal(T::one() / T::lit(d as f64));
        Ok(out)
    }

    /// Coefficients with real and imaginary parts uniform in [-1, 1].
    pub fn random<R: Rng + ?Sized>(group: Group, band: u32, rng: &mut R) -> Self {
        Self::from_fn(group, band, |r| {
            CMatrix::from_fn(r.dim(), r.dim(), |_, _| {
                cplx(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0)))
            })
        })
    }

    pub fn reps(&self) -> Vec<RepIndex> {
        dual_enumerate(self.group, self.band)
    }

    pub fn get(&self, rep: RepIndex) -> Option<&CMatrix<T>> {
        rep.position(self.band).map(|p| &self.coeffs[p])
    }

    pub fn get_mut(&mut self, rep: RepIndex) -> Option<&mut CMatrix<T>> {
        rep.position(self.band).map(move |p| &mut self.coeffs[p])
    }

    /// Plancherel squared norm `Σ d_ξ ‖f̂(ξ)‖²_HS`.
    pub fn norm_sq(&self) -> T {
        self.reps()
            .iter()
            .zip(&self.coeffs)
            .fold(T::zero(), |acc, (r, m)| acc + T::lit(r.dim() as f64) * hs_norm_sq(m))
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.group == other.group && self.band == other.band
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        SpectralField {
            group: self.group,
            band: self.band,
            coeffs: self.coeffs.iter().map(|m| m * c).collect(),
        }
    }

    /// `self += c · other`
    pub fn axpy(&mut self, c: Complex<T>, other: &Self) {
        assert!(self.compatible(other), "axpy on incompatible fields");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.zip_apply(b, |x, y| *x += c * y);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(creal(T::one()), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(creal(-T::one()), other);
        out
    }

    pub fn map_blocks(&self, mut f: impl FnMut(RepIndex, &CMatrix<T>) -> CMatrix<T>) -> Self {
        let coeffs = self.reps().into_iter().zip(&self.coeffs).map(|(r, m)| f(r, m)).collect();
        SpectralField { group: self.group, band: self.band, coeffs }
    }

    /// Zero-pads or truncates to a new bandlimit.
    pub fn with_band(&self, band: u32) -> Self {
        let mut out = Self::zeros(self.group, band);
        for (r, m) in self.reps().iter().zip(&self.coeffs) {
            if let Some(p) = r.position(band) {
                out.coeffs[p] = m.clone();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| max_abs_diff(a, b))
            .fold(T::zero(), |m, v| if v > m { v } else { m })
    }
}

/// Samples on the nodes of a [`GridSpec`].
#[derive(Clone, Debug)]
pub struct GridField<T: Real> {
    pub grid: Arc<GridSpec<T>>,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> GridField<T> {
    pub fn new(grid: Arc<GridSpec<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Shape(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(GridField { grid, values })
    }

    /// Samples `f(φ, θ, ψ)` at every node.
    pub fn from_fn(grid: Arc<GridSpec<T>>, f: impl Fn(T, T, T) -> Complex<T>) -> Self {
        let values = (0..grid.node_count())
            .map(|n| {
                let (p, t, s) = grid.angles(n);
                f(p, t, s)
            })
            .collect();
        GridField { grid, values }
    }

    pub fn constant(grid: Arc<GridSpec<T>>, c: Complex<T>) -> Self {
        let values = vec![c; grid.node_count()];
        GridField { grid, values }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_layout(&other.grid)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| *a * *b).collect();
        Ok(GridField { grid: self.grid.clone(), values })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| cabs(*a - *b))
            .fold(T::zero(), |m, v| if v > m { v } else { m })
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| cabs(*v)).fold(T::zero(), |m, v| if v > m { v } else { m })
    }
}

/// Quadrature inner product `∫ f conj(g) dx`.
pub fn l2_inner<T: Real>(f: &GridField<T>, g: &GridField<T>) -> Result<Complex<T>> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    let grid = &f.grid;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .enumerate()
        .fold(creal(T::zero()), |acc, (n, (a, b))| acc + *a * b.conj() * grid.weight(n)))
}

/// `Σ d_ξ ‖F(ξ)‖²_HS`, the squared L² norm of the field `F` represents.
pub fn plancherel_norm_sq<T: Real>(f: &SpectralField<T>) -> T {
    f.norm_sq()
}

/// `Σ d_ξ Tr[F(ξ) G(ξ)*]`, equal to `∫ f conj(g) dx` by Plancherel.
pub fn spectral_inner<T: Real>(f: &SpectralField<T>, g: &SpectralField<T>) -> Complex<T> {
    f.reps()
        .iter()
        .zip(f.coeffs.iter().zip(&g.coeffs))
        .fold(creal(T::zero()), |acc, (r, (a, b))| {
            let tr = a.iter().zip(b.iter()).fold(creal(T::zero()), |s, (x, y)| s + *x * y.conj());
            acc + tr * T::lit(r.dim() as f64)
        })
}

/// Frequency twiddles `w · e^{i P x / 2}` for `P ∈ -band..=band`, one row per node.
fn half_twiddles<T: Real>(xs: &[T], band: u32, sign: T, weight: T) -> Vec<Vec<Complex<T>>> {
    let half = T::lit(0.5);
    xs.iter()
        .map(|&x| {
            (-(band as i32)..=band as i32)
                .map(|p| cis(sign * T::lit(p as f64) * x * half) * weight)
                .collect()
        })
        .collect()
}

/// Forward transform by quadrature, `f̂(ξ) = Σ_n w_n f(x_n) ξ(x_n)*`.
///
/// On SU(2) the sum is separated as φ-DFT, ψ-DFT, then a small-d contraction
/// per θ node, so the cost is O(band⁴) rather than a dense sum over nodes.
pub fn fourier_forward<T: Real>(f: &GridField<T>, band: u32) -> Result<SpectralField<T>> {
    let grid = &f.grid;
    if band > grid.band {
        return Err(Error::Bandlimit { requested: band, available: grid.band });
    }
    match grid.group {
        Group::Torus => {
            let coeffs = (-(band as i32)..=band as i32)
                .map(|k| {
                    let s = f.values.iter().zip(&grid.phi).fold(creal(T::zero()), |acc, (v, &x)| {
                        acc + *v * cis(-T::lit(k as f64) * x)
                    });
                    CMatrix::from_element(1, 1, s * grid.w_phi)
                })
                .collect();
            Ok(SpectralField { group: Group::Torus, band, coeffs })
        }
        Group::Su2 => {
            let nf = 2 * band as usize + 1;
            let (n_phi, n_psi) = (grid.phi.len(), grid.psi.len());
            let tw_psi = half_twiddles(&grid.psi, band, T::one(), grid.w_psi);
            let tw_phi = half_twiddles(&grid.phi, band, T::one(), grid.w_phi);
            let partials: Vec<Vec<CMatrix<T>>> = (0..grid.theta.len())
                .into_par_iter()
                .map(|b| {
                    let mut h = vec![creal(T::zero()); n_phi * nf];
                    for a in 0..n_phi {
                        let row = &f.values[grid.node(b, a, 0)..grid.node(b, a, 0) + n_psi];
                        for (c, v) in row.iter().enumerate() {
                            for q in 0..nf {
                                h[a * nf + q] += *v * tw_psi[c][q];
                            }
                        }
                    }
                    let mut g = vec![creal(T::zero()); nf * nf];
                    for a in 0..n_phi {
                        for p in 0..nf {
                            let t = tw_phi[a][p];
                            for q in 0..nf {
                                g[p * nf + q] += t * h[a * nf + q];
                            }
                        }
                    }
                    let wt = grid.w_theta[b];
                    (0..=band)
                        .map(|n| {
                            let d = &grid.small_d[b][n as usize];
                            let off = (band - n) as usize;
                            let dim = n as usize + 1;
                            // f̂_{ab} picks up d_{ba} G(P = 2j_b, Q = 2j_a)
                            CMatrix::from_fn(dim, dim, |ra, cb| {
                                g[(off + 2 * cb) * nf + off + 2 * ra] * (d[(cb, ra)] * wt)
                            })
                        })
                        .collect()
                })
                .collect();
            let mut out = SpectralField::zeros(Group::Su2, band);
            for part in &partials {
                for (acc, m) in out.coeffs.iter_mut().zip(part) {
                    *acc += m;
                }
            }
            Ok(out)
        }
    }
}

/// Inverse transform `f(x) = Σ d_ξ Tr[ξ(x) F(ξ)]` evaluated at every grid node.
pub fn fourier_inverse<T: Real>(f: &SpectralField<T>, grid: &Arc<GridSpec<T>>) -> Result<GridField<T>> {
    if f.group != grid.group {
        return Err(Error::GridMismatch);
    }
    if f.band > grid.band {
        return Err(Error::Bandlimit { requested: f.band, available: grid.band });
    }
    let band = f.band;
    match grid.group {
        Group::Torus => {
            let values = grid
                .phi
                .iter()
                .map(|&x| {
                    (-(band as i32)..=band as i32).zip(&f.coeffs).fold(creal(T::zero()), |acc, (k, m)| {
                        acc + m[(0, 0)] * cis(T::lit(k as f64) * x)
                    })
                })
                .collect();
            Ok(GridField { grid: grid.clone(), values })
        }
        Group::Su2 => {
            let nf = 2 * band as usize + 1;
            let (n_phi, n_psi) = (grid.phi.len(), grid.psi.len());
            let tw_phi = half_twiddles(&grid.phi, band, -T::one(), T::one());
            let tw_psi = half_twiddles(&grid.psi, band, -T::one(), T::one());
            let slices: Vec<Vec<Complex<T>>> = (0..grid.theta.len())
                .into_par_iter()
                .map(|b| {
                    // S(P = 2j_a, Q = 2j_b) = Σ_ℓ d_ℓ d^ℓ_{ab}(θ) F^ℓ_{ba}
                    let mut s = vec![creal(T::zero()); nf * nf];
                    for n in 0..=band {
                        let d = &grid.small_d[b][n as usize];
                        let fm = &f.coeffs[n as usize];
                        let off = (band - n) as usize;
                        let dim = n as usize + 1;
                        let dl = T::lit(dim as f64);
                        for ra in 0..dim {
                            for cb in 0..dim {
                                s[(off + 2 * ra) * nf + off + 2 * cb] += fm[(cb, ra)] * (d[(ra, cb)] * dl);
                            }
                        }
                    }
                    let mut r = vec![creal(T::zero()); n_phi * nf];
                    for a in 0..n_phi {
                        for p in 0..nf {
                            let t = tw_phi[a][p];
                            for q in 0..nf {
                                r[a * nf + q] += t * s[p * nf + q];
                            }
                        }
                    }
                    let mut out = vec![creal(T::zero()); n_phi * n_psi];
                    for a in 0..n_phi {
                        for c in 0..n_psi {
                            let mut acc = creal(T::zero());
                            for q in 0..nf {
                                acc += tw_psi[c][q] * r[a * nf + q];
                            }
                            out[a * n_psi + c] = acc;
                        }
                    }
                    out
                })
                .collect();
            Ok(GridField { grid: grid.clone(), values: slices.concat() })
        }
    }
}
