//! One-step integrators: per-mode exponential, classical RK4, Crank–Nicolson.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use nalgebra::{Dyn, LU};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::block::{flatten, gather, scatter, stack_axpy, unflatten, BlockOperator, Forcing, Stack};
use super::gmres::gmres;
use crate::error::{Error, Result};
use crate::harmonic::SpectralField;
use crate::scalar::{cabs, cplx, creal, is_diagonal, CMatrix, Complex, Real};

/// RK4 is held to `dt · ‖K‖ ≤ RK4_CAP`, inside its real-axis stability interval.
pub const RK4_CAP: f64 = 2.7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Exact for x- and t-independent operators, Crank–Nicolson otherwise.
    Auto,
    Exact,
    Rk4,
    #[serde(rename = "cn")]
    CrankNicolson,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Auto => "auto",
            Scheme::Exact => "exact",
            Scheme::Rk4 => "rk4",
            Scheme::CrankNicolson => "cn",
        }
    }

    /// The concrete scheme `Auto` stands for on `op`.
    pub fn resolve<T: Real>(self, op: &BlockOperator<T>) -> Scheme {
        match self {
            Scheme::Auto if op.x_independent() && op.t_independent() => Scheme::Exact,
            Scheme::Auto => Scheme::CrankNicolson,
            s => s,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Scheme::Auto),
            "exact" => Ok(Scheme::Exact),
            "rk4" => Ok(Scheme::Rk4),
            "cn" | "crank-nicolson" => Ok(Scheme::CrankNicolson),
            other => Err(Error::Range(format!("unknown scheme `{other}` (expected auto, exact, rk4 or cn)"))),
        }
    }
}

/// Iterative-solve settings for Crank–Nicolson with x-dependent operators.
#[derive(Clone, Copy, Debug)]
pub struct CnOptions<T> {
    pub tol: T,
    pub restart: usize,
    pub max_iter: usize,
}

impl<T: Real> Default for CnOptions<T> {
    fn default() -> Self {
        CnOptions { tol: T::tol(1e-12), restart: 60, max_iter: 1200 }
    }
}

enum Prop<T: Real> {
    /// `v ← E v + Φ f` with `E = e^{hA}`, `Φ = ∫₀ʰ e^{(h−τ)A} dτ`.
    Exact { e: CMatrix<T>, phi: CMatrix<T> },
    /// `(I − hA/2) v⁺ = (I + hA/2) v + h f`
    Cn { lu: LU<Complex<T>, Dyn, Dyn>, plus: CMatrix<T> },
}

fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.re.exp();
    cplx(r * z.im.cos(), r * z.im.sin())
}

/// `(e^z − 1) / z`, by series near the origin.
fn phi1<T: Real>(z: Complex<T>) -> Complex<T> {
    if cabs(z) < T::one() {
        let mut term = creal(T::one());
        let mut sum = term;
        for k in 2..24 {
            term = term * z / T::lit(k as f64);
            sum += term;
        }
        sum
    } else {
        (cexp(z) - creal(T::one())) / z
    }
}

fn exact_prop<T: Real>(a: &CMatrix<T>, h: T) -> Prop<T> {
    let n = a.nrows();
    if is_diagonal(a) {
        let mut e = CMatrix::zeros(n, n);
        let mut phi = CMatrix::zeros(n, n);
        for i in 0..n {
            let z = a[(i, i)] * h;
            e[(i, i)] = cexp(z);
            phi[(i, i)] = phi1(z) * h;
        }
        return Prop::Exact { e, phi };
    }
    // exp of [[hA, hI], [0, 0]] carries e^{hA} and hφ₁(hA) in its top row
    let mut aug = CMatrix::zeros(2 * n, 2 * n);
    aug.view_mut((0, 0), (n, n)).copy_from(&(a * creal(h)));
    for i in 0..n {
        aug[(i, n + i)] = creal(h);
    }
    let x = aug.exp();
    Prop::Exact { e: x.view((0, 0), (n, n)).into_owned(), phi: x.view((0, n), (n, n)).into_owned() }
}

fn cn_prop<T: Real>(a: &CMatrix<T>, h: T) -> Prop<T> {
    let n = a.nrows();
    let half = a * creal(h * T::lit(0.5));
    let id = CMatrix::<T>::identity(n, n);
    Prop::Cn { lu: (&id - &half).lu(), plus: id + half }
}

/// Integrator for one operator, forcing, scheme and step size. Per-mode
/// propagators are cached when the operator is time-independent.
pub struct Stepper<T: Real> {
    op: BlockOperator<T>,
    forcing: Forcing<T>,
    scheme: Scheme,
    dt: T,
    band: u32,
    cn: CnOptions<T>,
    cache: Option<Vec<Prop<T>>>,
    warned: AtomicBool,
    iterations: AtomicUsize,
}

impl<T: Real> Stepper<T> {
    /// `band` is the bandlimit of the states to be stepped.
    pub fn new(op: BlockOperator<T>, forcing: Forcing<T>, scheme: Scheme, dt: T, band: u32) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::Range(format!("time step {} must be positive", dt.as_f64())));
        }
        if band > op.band() {
            return Err(Error::Bandlimit { requested: band, available: op.band() });
        }
        let scheme = scheme.resolve(&op);
        if scheme == Scheme::Exact && !op.x_independent() {
            return Err(Error::XDependent);
        }
        let mut s = Stepper {
            op,
            forcing,
            scheme,
            dt,
            band,
            cn: CnOptions::default(),
            cache: None,
            warned: AtomicBool::new(false),
            iterations: AtomicUsize::new(0),
        };
        if s.op.t_independent() && s.scheme != Scheme::Rk4 {
            s.cache = Some(s.props(T::zero())?);
        }
        Ok(s)
    }

    pub fn with_cn_options(mut self, cn: CnOptions<T>) -> Self {
        self.cn = cn;
        self
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Total GMRES iterations spent so far.
    pub fn iterations(&self) -> usize {
        self.iterations.load(Ordering::Relaxed)
    }

    /// Exact propagators, CN factors, or (x-dependent CN) the mean-coefficient
    /// preconditioner, frozen at time `tm`.
    fn props(&self, tm: T) -> Result<Vec<Prop<T>>> {
        let mean = !self.op.x_independent();
        let mats = self.op.rep_matrices(tm, self.band, mean)?;
        let h = self.dt;
        let exact = self.scheme == Scheme::Exact;
        Ok(mats.par_iter().map(|a| if exact { exact_prop(a, h) } else { cn_prop(a, h) }).collect())
    }

    pub fn step(&self, v: &[SpectralField<T>], t: T) -> Result<Stack<T>> {
        self.op.check_state(v)?;
        if v[0].band != self.band {
            return Err(Error::Bandlimit { requested: v[0].band, available: self.band });
        }
        match self.scheme {
            Scheme::Exact => self.step_modes(v, t),
            Scheme::CrankNicolson if self.op.x_independent() => self.step_modes(v, t),
            Scheme::CrankNicolson => self.step_cn_iterative(v, t),
            Scheme::Rk4 => self.step_rk4(v, t),
            Scheme::Auto => unreachable!("resolved at construction"),
        }
    }

    fn with_props<R>(&self, tm: T, f: impl FnOnce(&[Prop<T>]) -> Result<R>) -> Result<R> {
        match &self.cache {
            Some(p) => f(p),
            None => f(&self.props(tm)?),
        }
    }

    fn step_modes(&self, v: &[SpectralField<T>], t: T) -> Result<Stack<T>> {
        let h = self.dt;
        let tm = t + h * T::lit(0.5);
        let f = self.forcing.eval(tm);
        self.with_props(tm, |props| {
            let blocks = (0..props.len())
                .into_par_iter()
                .map(|k| {
                    let x = gather(v, k);
                    let fk = f.as_ref().map(|f| gather(f, k));
                    match &props[k] {
                        Prop::Exact { e, phi } => {
                            let mut out = e * x;
                            if let Some(fk) = fk {
                                out += phi * fk;
                            }
                            Ok(out)
                        }
                        Prop::Cn { lu, plus } => {
                            let mut rhs = plus * x;
                            if let Some(fk) = fk {
                                rhs += fk * creal(h);
                            }
                            lu.solve(&rhs).ok_or_else(|| Error::Range("Crank–Nicolson system is singular".into()))
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(scatter(blocks, v))
        })
    }

    fn step_cn_iterative(&self, v: &[SpectralField<T>], t: T) -> Result<Stack<T>> {
        let h = self.dt;
        let half = creal(h * T::lit(0.5));
        let tm = t + h * T::lit(0.5);
        let mut b = v.to_vec();
        stack_axpy(&mut b, half, &self.op.apply(tm, v)?);
        if let Some(f) = self.forcing.eval(tm) {
            stack_axpy(&mut b, creal(h), &f);
        }
        let like = v;
        let apply = |x: &[Complex<T>]| -> Result<Vec<Complex<T>>> {
            let xs = unflatten(x, like);
            let mut y = xs.clone();
            stack_axpy(&mut y, -half, &self.op.apply(tm, &xs)?);
            Ok(flatten(&y))
        };
        let solved = self.with_props(tm, |props| {
            let precond = |x: &[Complex<T>]| -> Result<Vec<Complex<T>>> {
                let xs = unflatten(x, like);
                let blocks = (0..props.len())
                    .into_par_iter()
                    .map(|k| match &props[k] {
                        Prop::Cn { lu, .. } => lu
                            .solve(&gather(&xs, k))
                            .ok_or_else(|| Error::Range("preconditioner is singular".into())),
                        Prop::Exact { .. } => unreachable!("iterative path uses CN factors"),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(flatten(&scatter(blocks, like)))
            };
            gmres(apply, precond, &flatten(&b), flatten(v), self.cn.tol, self.cn.restart, self.cn.max_iter)
        })?;
        self.iterations.fetch_add(solved.iterations, Ordering::Relaxed);
        log::debug!("cn: {} gmres iterations, residual {:e}", solved.iterations, solved.residual.as_f64());
        Ok(unflatten(&solved.x, v))
    }

    fn rhs(&self, t: T, v: &[SpectralField<T>]) -> Result<Stack<T>> {
        let mut k = self.op.apply(t, v)?;
        if let Some(f) = self.forcing.eval(t) {
            stack_axpy(&mut k, creal(T::one()), &f);
        }
        Ok(k)
    }

    fn step_rk4(&self, v: &[SpectralField<T>], t: T) -> Result<Stack<T>> {
        let h = self.dt;
        let bound = [t, t + h * T::lit(0.5), t + h]
            .into_iter()
            .map(|s| self.op.norm_bound(s))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(T::zero(), |a, b| a.max(b));
        let ratio = (h * bound / T::lit(RK4_CAP)).as_f64();
        let n = if ratio.is_finite() && ratio > 1.0 { ratio.ceil() as usize } else { 1 };
        if n > 1 && !self.warned.swap(true, Ordering::Relaxed) {
            log::warn!(
                "rk4: dt = {:e} exceeds the stability cap {:e}; taking {n} substeps per step",
                h.as_f64(),
                RK4_CAP / bound.as_f64()
            );
        }
        let sub = h / T::lit(n as f64);
        let mut x = v.to_vec();
        for i in 0..n {
            x = self.rk4_once(&x, t + sub * T::lit(i as f64), sub)?;
        }
        Ok(x)
    }

    fn rk4_once(&self, v: &[SpectralField<T>], t: T, h: T) -> Result<Stack<T>> {
        let half = h * T::lit(0.5);
        let shifted = |c: T, k: &Stack<T>| {
            let mut y = v.to_vec();
            stack_axpy(&mut y, creal(c), k);
            y
        };
        let k1 = self.rhs(t, v)?;
        let k2 = self.rhs(t + half, &shifted(half, &k1))?;
        let k3 = self.rhs(t + half, &shifted(half, &k2))?;
        let k4 = self.rhs(t + h, &shifted(h, &k3))?;
        let mut out = v.to_vec();
        let sixth = h / T::lit(6.0);
        stack_axpy(&mut out, creal(sixth), &k1);
        stack_axpy(&mut out, creal(sixth + sixth), &k2);
        stack_axpy(&mut out, creal(sixth + sixth), &k3);
        stack_axpy(&mut out, creal(sixth), &k4);
        Ok(out)
    }
}

fn one_step<T: Real>(
    scheme: Scheme,
    op: &BlockOperator<T>,
    v: &[SpectralField<T>],
    forcing: &Forcing<T>,
    t: T,
    dt: T,
) -> Result<Stack<T>> {
    op.check_state(v)?;
    forcing.check(v)?;
    Stepper::new(op.clone(), forcing.clone(), scheme, dt, v[0].band)?.step(v, t)
}

/// One step of the per-mode exponential, with `K` and `f` frozen at `t + dt/2`.
pub fn step_exact_invariant<T: Real>(
    op: &BlockOperator<T>,
    v: &[SpectralField<T>],
    forcing: &Forcing<T>,
    t: T,
    dt: T,
) -> Result<Stack<T>> {
    one_step(Scheme::Exact, op, v, forcing, t, dt)
}

/// One classical RK4 step, substepped if `dt` exceeds the stability cap.
pub fn step_rk4<T: Real>(
    op: &BlockOperator<T>,
    v: &[SpectralField<T>],
    forcing: &Forcing<T>,
    t: T,
    dt: T,
) -> Result<Stack<T>> {
    one_step(Scheme::Rk4, op, v, forcing, t, dt)
}

/// One Crank–Nicolson step with `K` and `f` frozen at `t + dt/2`.
pub fn step_crank_nicolson<T: Real>(
    op: &BlockOperator<T>,
    v: &[SpectralField<T>],
    forcing: &Forcing<T>,
    t: T,
    dt: T,
) -> Result<Stack<T>> {
    one_step(Scheme::CrankNicolson, op, v, forcing, t, dt)
}
