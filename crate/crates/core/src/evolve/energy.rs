//! Sobolev norms, the energy identity and fitted energy-estimate constants.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::block::{stack_inner, BlockOperator, Forcing};
use super::Trajectory;
use crate::error::{Error, Result};
use crate::harmonic::SpectralField;
use crate::scalar::{hs_norm_sq, Real};
use crate::symbol::{bessel_weight, WeightKind};

/// `‖W^s F‖` with the Bessel weight of the given kind, computed spectrally.
pub fn sobolev_norm<T: Real>(f: &SpectralField<T>, s: T, kind: WeightKind) -> T {
    sobolev_norm_sq(f, s, kind).sqrt()
}

fn sobolev_norm_sq<T: Real>(f: &SpectralField<T>, s: T, kind: WeightKind) -> T {
    if s == T::zero() {
        return f.norm_sq();
    }
    f.reps().iter().zip(&f.coeffs).fold(T::zero(), |acc, (r, m)| {
        acc + T::lit(r.dim() as f64) * hs_norm_sq(&(bessel_weight(*r, s, kind) * m))
    })
}

/// Squared Sobolev norm of a stacked state.
pub fn stack_sobolev_norm_sq<T: Real>(v: &[SpectralField<T>], s: T, kind: WeightKind) -> T {
    v.iter().fold(T::zero(), |a, f| a + sobolev_norm_sq(f, s, kind))
}

/// `|d/dt ‖v‖² − 2Re(Kv, v) − 2Re(f, v)|` at every trajectory time, with
/// centered differences inside and second-order one-sided ones at the ends.
pub fn energy_identity_residual<T: Real>(
    traj: &Trajectory<T>,
    op: &BlockOperator<T>,
    forcing: &Forcing<T>,
) -> Result<Vec<T>> {
    let n = traj.states.len();
    if n < 3 {
        return Err(Error::TrajectoryTooShort { len: n, min: 3 });
    }
    let h = traj.times[1] - traj.times[0];
    let y: Vec<T> = traj.states.iter().map(|v| v.iter().fold(T::zero(), |a, f| a + f.norm_sq())).collect();
    let two = T::lit(2.0);
    let rhs = (0..n)
        .into_par_iter()
        .map(|i| {
            let (t, v) = (traj.times[i], &traj.states[i]);
            let mut r = two * stack_inner(&op.apply(t, v)?, v).re;
            if let Some(f) = forcing.eval(t) {
                r += two * stack_inner(&f, v).re;
            }
            Ok(r)
        })
        .collect::<Result<Vec<T>>>()?;
    let (three, four) = (T::lit(3.0), T::lit(4.0));
    Ok((0..n)
        .map(|i| {
            let d = if i == 0 {
                (-three * y[0] + four * y[1] - y[2]) / (two * h)
            } else if i == n - 1 {
                (three * y[n - 1] - four * y[n - 2] + y[n - 3]) / (two * h)
            } else {
                (y[i + 1] - y[i - 1]) / (two * h)
            };
            (d - rhs[i]).abs()
        })
        .collect())
}

/// Fitted constants of `‖v(t)‖² ≤ C‖u₀‖² + C′∫₀ᵗ‖f‖²` in `H^s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateFit {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_prime")]
    pub c_prime: f64,
    pub satisfied: bool,
    /// `(C, C′)` pairs on a log grid of `C`, Pareto-minimal.
    pub pareto: Vec<(f64, f64)>,
}

/// `C` is the smallest value the forcing-free times allow (`C ≥ 1` whenever
/// the trajectory starts at `u₀`); `C′(C)` is then the least value valid at
/// every sampled time. The forcing integral runs over `[0, t]`.
pub fn energy_estimate_check<T: Real>(
    traj: &Trajectory<T>,
    u0: &[SpectralField<T>],
    forcing: &Forcing<T>,
    s: T,
    kind: WeightKind,
) -> EstimateFit {
    let y: Vec<f64> = traj.states.iter().map(|v| stack_sobolev_norm_sq(v, s, kind).as_f64()).collect();
    let y0 = stack_sobolev_norm_sq(u0, s, kind).as_f64();
    let g: Vec<f64> = traj
        .times
        .iter()
        .map(|&t| forcing.eval(t).map_or(0.0, |f| stack_sobolev_norm_sq(&f, s, kind).as_f64()))
        .collect();
    let mut big_f = vec![0.0; y.len()];
    for i in 1..y.len() {
        let h = (traj.times[i] - traj.times[i - 1]).as_f64();
        big_f[i] = big_f[i - 1] + 0.5 * h * (g[i] + g[i - 1]);
    }
    let mut c = 0.0f64;
    for (yi, fi) in y.iter().zip(&big_f) {
        if *fi == 0.0 {
            c = c.max(if y0 > 0.0 { yi / y0 } else if *yi > 0.0 { f64::INFINITY } else { 0.0 });
        }
    }
    let c_prime = |c: f64| {
        y.iter()
            .zip(&big_f)
            .filter(|(_, f)| **f > 0.0)
            .map(|(yi, fi)| ((yi - c * y0) / fi).max(0.0))
            .fold(0.0, f64::max)
    };
    let cp = c_prime(c);
    let mut pareto: Vec<(f64, f64)> = Vec::new();
    if c.is_finite() {
        let base = if c > 0.0 { c } else { 1.0 };
        for k in 0..=24 {
            let ck = if k == 0 { c } else { base * 10f64.powf(k as f64 / 8.0) };
            let pk = c_prime(ck);
            if pareto.last().is_none_or(|&(_, p)| pk < p) {
                pareto.push((ck, pk));
            }
        }
    }
    EstimateFit { c, c_prime: cp, satisfied: c.is_finite() && cp.is_finite(), pareto }
}

/// Norm tables, identity residuals and fitted constants of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub scheme: String,
    pub dt: f64,
    pub s: f64,
    pub kind: WeightKind,
    pub times: Vec<f64>,
    pub l2_norms: Vec<f64>,
    pub hs_norms: Vec<f64>,
    /// `‖v(t)‖` in `H^{s+m/2}`, `m` the operator order; tabulated only.
    pub smoothing_norms: Vec<f64>,
    pub identity_residuals: Vec<f64>,
    #[serde(flatten)]
    pub estimate: EstimateFit,
}

impl EnergyReport {
    /// `# lie-diffuse v1` header, then `t,l2_norm,hs_norm,identity_residual`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# lie-diffuse v1")?;
        writeln!(w, "t,l2_norm,hs_norm,identity_residual")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e}",
                self.times[i], self.l2_norms[i], self.hs_norms[i], self.identity_residuals[i]
            )?;
        }
        Ok(())
    }
}
