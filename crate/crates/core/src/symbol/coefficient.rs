//! Scalar coefficients `a(x, t) = scale · field(x) · profile(t)`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harmonic::{
    fourier_forward, fourier_inverse, wigner_matrix, GridField, GridSpec, Group, RepIndex, SpectralField,
};
use crate::scalar::{cis, creal, CMatrix, Complex, Real};

/// A bandlimited function on the group, stored spectrally.
///
/// Fields read from grid samples keep those samples, so sampling back onto
/// the same grid returns them untouched.
#[derive(Clone, Debug)]
pub struct ScalarField<T: Real> {
    pub spectrum: SpectralField<T>,
    samples: Option<GridField<T>>,
}

impl<T: Real> ScalarField<T> {
    pub fn from_spectrum(spectrum: SpectralField<T>) -> Result<Self> {
        spectrum.validate()?;
        Ok(ScalarField { spectrum, samples: None })
    }

    /// Projects grid samples onto the grid's own bandlimit.
    pub fn from_samples(samples: GridField<T>) -> Result<Self> {
        let spectrum = fourier_forward(&samples, samples.grid.band)?;
        Ok(ScalarField { spectrum, samples: Some(samples) })
    }

    pub fn constant(group: Group, c: T) -> Self {
        let mut spectrum = SpectralField::zeros(group, 0);
        spectrum.coeffs[0][(0, 0)] = creal(c);
        ScalarField { spectrum, samples: None }
    }

    /// `Σ c_n P_n(cos θ)` on SU(2) (Legendre polynomials in the middle Euler
    /// angle), `Σ c_n cos(nφ)` on the circle.
    pub fn zonal(group: Group, coeffs: &[T]) -> Self {
        let top = coeffs.len().saturating_sub(1) as u32;
        match group {
            Group::Su2 => {
                let mut spectrum = SpectralField::zeros(group, 2 * top);
                for (n, &c) in coeffs.iter().enumerate() {
                    // P_n(cos θ) = ξ^n_{nn}, whose spectrum is E_{nn} / (2n + 1)
                    let d = 2 * n + 1;
                    spectrum.coeffs[2 * n][(n, n)] = creal(c / T::lit(d as f64));
                }
                ScalarField { spectrum, samples: None }
            }
            Group::Torus => {
                let mut spectrum = SpectralField::zeros(group, top);
                let mid = top as usize;
                for (n, &c) in coeffs.iter().enumerate() {
                    if n == 0 {
                        spectrum.coeffs[mid][(0, 0)] += creal(c);
                    } else {
                        let h = creal(c * T::lit(0.5));
                        spectrum.coeffs[mid + n][(0, 0)] += h;
                        spectrum.coeffs[mid - n][(0, 0)] += h;
                    }
                }
                ScalarField { spectrum, samples: None }
            }
        }
    }

    pub fn group(&self) -> Group {
        self.spectrum.group
    }

    pub fn band(&self) -> u32 {
        self.spectrum.band
    }

    /// Mean value, the coefficient at the trivial representation.
    pub fn mean(&self) -> Complex<T> {
        let trivial = match self.group() {
            Group::Su2 => RepIndex::su2(0),
            Group::Torus => RepIndex::torus(0),
        };
        self.spectrum.get(trivial).map(|m| m[(0, 0)]).unwrap_or_else(|| creal(T::zero()))
    }

    /// Values at every node of `grid`.
    pub fn sample(&self, grid: &Arc<GridSpec<T>>) -> Result<Vec<Complex<T>>> {
        if grid.group != self.group() {
            return Err(Error::GridMismatch);
        }
        if let Some(s) = &self.samples {
            if s.grid.same_layout(grid) {
                return Ok(s.values.clone());
            }
        }
        if self.band() <= grid.band {
            return Ok(fourier_inverse(&self.spectrum, grid)?.values);
        }
        (0..grid.node_count()).map(|n| self.value_at(grid.angles(n))).collect()
    }

    /// Pointwise inversion sum at Euler angles `(φ, θ, ψ)`.
    pub fn value_at(&self, angles: (T, T, T)) -> Result<Complex<T>> {
        let mut acc = creal(T::zero());
        for (rep, f) in self.spectrum.reps().into_iter().zip(&self.spectrum.coeffs) {
            match rep.group {
                Group::Torus => acc += f[(0, 0)] * cis(T::lit(rep.k as f64) * angles.0),
                Group::Su2 => {
                    let xi: CMatrix<T> = wigner_matrix(rep, angles)?;
                    acc += (xi * f).trace() * T::lit(rep.dim() as f64);
                }
            }
        }
        Ok(acc)
    }
}

/// Time dependence of a coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeProfile<T> {
    Const(T),
    /// `offset + amplitude · cos(omega · t)`
    Cosine { offset: T, amplitude: T, omega: T },
    /// `c0 + c1 · t`
    Linear { c0: T, c1: T },
}

impl<T: Real> TimeProfile<T> {
    pub fn eval(&self, t: T) -> T {
        match *self {
            TimeProfile::Const(c) => c,
            TimeProfile::Cosine { offset, amplitude, omega } => offset + amplitude * (omega * t).cos(),
            TimeProfile::Linear { c0, c1 } => c0 + c1 * t,
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            TimeProfile::Const(_) => true,
            TimeProfile::Cosine { amplitude, omega, .. } => amplitude == T::zero() || omega == T::zero(),
            TimeProfile::Linear { c1, .. } => c1 == T::zero(),
        }
    }

    /// Upper bound of `|profile|` on `[0, t_max]`.
    pub fn sup_abs(&self, t_max: T) -> T {
        match *self {
            TimeProfile::Const(c) => c.abs(),
            TimeProfile::Cosine { offset, amplitude, .. } => offset.abs() + amplitude.abs(),
            TimeProfile::Linear { c0, c1 } => c0.abs().max((c0 + c1 * t_max).abs()),
        }
    }
}

/// `a(x, t) = scale · field(x) · profile(t)`; absent parts are 1.
#[derive(Clone, Debug)]
pub struct Coefficient<T: Real> {
    pub scale: Complex<T>,
    pub field: Option<Arc<ScalarField<T>>>,
    pub profile: Option<TimeProfile<T>>,
}

impl<T: Real> Coefficient<T> {
    pub fn constant(c: T) -> Self {
        Coefficient { scale: creal(c), field: None, profile: None }
    }

    pub fn x_independent(&self) -> bool {
        self.field.is_none()
    }

    pub fn t_independent(&self) -> bool {
        self.profile.is_none_or(|p| p.is_constant())
    }

    /// The x-independent factor `scale · profile(t)`.
    pub fn time_factor(&self, t: T) -> Complex<T> {
        match &self.profile {
            Some(p) => self.scale * p.eval(t),
            None => self.scale,
        }
    }
}

/// Chebyshev points of the first kind mapped to `[0, t_max]`, ascending.
pub fn chebyshev_times<T: Real>(t_max: T, count: usize) -> Vec<T> {
    if count <= 1 {
        return vec![t_max * T::lit(0.5)];
    }
    (0..count)
        .rev()
        .map(|k| {
            let x = (PI * (2 * k + 1) as f64 / (2 * count) as f64).cos();
            t_max * T::lit(0.5 * (1.0 + x))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::quadrature_grid;

    fn legendre(n: usize, x: f64) -> f64 {
        let (mut p0, mut p1) = (1.0, x);
        if n == 0 {
            return p0;
        }
        for k in 1..n {
            let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    #[test]
    fn zonal_field_is_a_legendre_series() {
        let c = [0.3, -0.7, 0.25];
        let f = ScalarField::<f64>::zonal(Group::Su2, &c);
        assert_eq!(f.band(), 4);
        let grid = quadrature_grid::<f64>(Group::Su2, 6);
        let vals = f.sample(&grid).unwrap();
        for (n, v) in vals.iter().enumerate() {
            let (_, th, _) = grid.angles(n);
            let expect: f64 = c.iter().enumerate().map(|(k, ck): (usize, &f64)| ck * legendre(k, th.cos())).sum();
            assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
        assert!((f.mean().re - 0.3).abs() < 1e-15);
    }

    #[test]
    fn pointwise_sampling_matches_transform() {
        let f = ScalarField::<f64>::zonal(Group::Su2, &[0.1, 0.2, 0.3, 0.4]);
        let coarse = quadrature_grid::<f64>(Group::Su2, 2);
        let direct = f.sample(&coarse).unwrap();
        for (n, v) in direct.iter().enumerate() {
            let (_, th, _) = coarse.angles(n);
            let expect: f64 = [0.1f64, 0.2, 0.3, 0.4].iter().enumerate().map(|(k, c)| c * legendre(k, th.cos())).sum();
            assert!((v.re - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_cosine_series() {
        let f = ScalarField::<f64>::zonal(Group::Torus, &[1.0, 0.5, -0.25]);
        let grid = quadrature_grid::<f64>(Group::Torus, 4);
        for (n, v) in f.sample(&grid).unwrap().iter().enumerate() {
            let x = grid.phi[n];
            let expect = 1.0 + 0.5 * x.cos() - 0.25 * (2.0 * x).cos();
            assert!((v.re - expect).abs() < 1e-13 && v.im.abs() < 1e-13);
        }
    }

    #[test]
    fn samples_survive_on_their_own_grid() {
        let grid = quadrature_grid::<f64>(Group::Su2, 2);
        let g = GridField::from_fn(grid.clone(), |phi, th, _| creal(phi.sin() + th));
        let f = ScalarField::from_samples(g.clone()).unwrap();
        assert_eq!(f.sample(&grid).unwrap(), g.values);
    }

    #[test]
    fn profiles() {
        let p = TimeProfile::<f64>::Cosine { offset: -1.0, amplitude: 0.5, omega: 2.0 };
        assert!((p.eval(0.0) + 0.5).abs() < 1e-15);
        assert!(!p.is_constant());
        assert_eq!(p.sup_abs(1.0), 1.5);
        assert!(TimeProfile::Linear { c0: 1.0, c1: 0.0 }.is_constant());
        let ts = chebyshev_times(2.0f64, 5);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        assert!((ts[2] - 1.0).abs() < 1e-15);
        assert!(ts.iter().all(|&t| t > 0.0 && t < 2.0));
    }
}
