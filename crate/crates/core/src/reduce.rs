//! Reduction of `∂ₜᵐu = Σⱼ a_{m−j}(x,t,D) ∂ₜʲu + f` to a first-order system.
//!
//! With `Γ = (1+L)^{1/2}` and `u_j = ∂ₜ^{j−1} Γ^{m−j} u`, the state
//! `(u_1, …, u_m)` solves `∂ₜU = A U + (0, …, 0, f)` where `A` carries `Γ` on
//! its superdiagonal and `b_j = a_{m−j+1} Γ^{j−m}` on its last row.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evolve::{evolve, BlockOperator, Evolution, EvolutionProblem, Forcing, Scheme, Stack, Trajectory};
use crate::harmonic::{Group, SpectralField};
use crate::scalar::{creal, CMatrix, Real};
use crate::symbol::{bessel_weight, build_operator_symbol, Base, OperatorSpec, Symbol, WeightKind};

/// `∂ₜᵐu = Σ_{k=1}^{m} a_k ∂ₜ^{m−k}u + f`, `∂ₜʲu(0) = g_{j+1}`.
#[derive(Clone, Debug)]
pub struct HigherOrderProblem<T: Real> {
    pub order: usize,
    /// `coeffs[k − 1]` is `a_k`, of spatial order at most `k`; `None` is zero.
    pub coeffs: Vec<Option<Symbol<T>>>,
    pub data: Vec<SpectralField<T>>,
    pub forcing: Forcing<T>,
    pub horizon: T,
}

impl<T: Real> HigherOrderProblem<T> {
    pub fn validate(&self) -> Result<()> {
        let m = self.order;
        if m < 2 {
            return Err(Error::Range(format!("time order {m} must be at least 2")));
        }
        if self.coeffs.len() != m || self.data.len() != m {
            return Err(Error::Shape(format!(
                "time order {m} needs {m} coefficients and {m} data fields, got {} and {}",
                self.coeffs.len(),
                self.data.len()
            )));
        }
        let first = &self.data[0];
        if self.data.iter().any(|g| !g.compatible(first)) {
            return Err(Error::GridMismatch);
        }
        for (k, a) in self.coeffs.iter().enumerate().filter_map(|(i, a)| a.as_ref().map(|a| (i + 1, a))) {
            let order = a.meta().order;
            if order > T::lit(k as f64) + T::tol(1e-12) {
                return Err(Error::Range(format!(
                    "coefficient a_{k} has declared order {} above {k}",
                    order.as_f64()
                )));
            }
            if a.group() != first.group {
                return Err(Error::WrongGroup { expected: first.group, found: a.group() });
            }
        }
        self.forcing.check(std::slice::from_ref(first))
    }

    fn group(&self) -> Group {
        self.data[0].group
    }
}

/// Companion-form system equivalent to a [`HigherOrderProblem`].
#[derive(Clone, Debug)]
pub struct FirstOrderSystem<T: Real> {
    pub order: usize,
    pub op: BlockOperator<T>,
    pub u0: Stack<T>,
    pub forcing: Forcing<T>,
    pub horizon: T,
    /// Weight defining `Γ`; elliptic unless chosen otherwise.
    pub kind: WeightKind,
}

fn gamma_base<T: Real>(s: T, kind: WeightKind) -> Base<T> {
    match kind {
        WeightKind::Elliptic => Base::BesselFrac(s),
        WeightKind::Subelliptic => Base::SubBesselFrac(s),
    }
}

/// `Γ^s F` per representation.
pub fn gamma_power<T: Real>(f: &SpectralField<T>, s: T, kind: WeightKind) -> SpectralField<T> {
    f.map_blocks(|r, m| bessel_weight(r, s, kind) * m)
}

/// Builds the companion system with elliptic `Γ`.
pub fn reduce_to_first_order<T: Real>(p: &HigherOrderProblem<T>) -> Result<FirstOrderSystem<T>> {
    reduce_with(p, WeightKind::Elliptic)
}

/// As [`reduce_to_first_order`], with `Γ` built from the weight `kind`.
pub fn reduce_with<T: Real>(p: &HigherOrderProblem<T>, kind: WeightKind) -> Result<FirstOrderSystem<T>> {
    p.validate()?;
    let m = p.order;
    let group = p.group();
    let band = p.data[0].band;
    let gamma_spec = OperatorSpec::new(group).term(T::one(), gamma_base(T::one(), kind));
    let gamma = build_operator_symbol(&gamma_spec, band)?;
    let mut op = BlockOperator::zeros(group, m);
    for j in 0..m - 1 {
        op = op.with_block(j, j + 1, gamma.clone())?;
    }
    for j in 1..=m {
        // b_j = a_{m−j+1} Γ^{j−m}
        if let Some(a) = &p.coeffs[m - j] {
            let b = if j == m { a.clone() } else { a.compose_right(&gamma_base(T::lit(j as f64 - m as f64), kind))? };
            op = op.with_block(m - 1, j - 1, b)?;
        }
    }
    let u0 = p
        .data
        .iter()
        .enumerate()
        .map(|(i, g)| gamma_power(g, T::lit((m - 1 - i) as f64), kind))
        .collect();
    Ok(FirstOrderSystem { order: m, op, u0, forcing: last_slot(&p.forcing, m, &p.data[0]), horizon: p.horizon, kind })
}

fn last_slot<T: Real>(f: &Forcing<T>, m: usize, like: &SpectralField<T>) -> Forcing<T> {
    let zero = SpectralField::zeros(like.group, like.band);
    match f {
        Forcing::Zero => Forcing::Zero,
        Forcing::Separable { field, profile } => {
            let mut stack = vec![zero; m - 1];
            stack.push(field[0].clone());
            Forcing::Separable { field: stack, profile: *profile }
        }
        Forcing::Custom(g) => {
            let g = g.clone();
            Forcing::Custom(Arc::new(move |t| {
                let mut stack = vec![zero.clone(); m - 1];
                stack.push(g(t).swap_remove(0));
                stack
            }))
        }
    }
}

/// Integrates the companion system with the evolution steppers.
pub fn solve_reduced<T: Real>(sys: &FirstOrderSystem<T>, scheme: Scheme, dt: T) -> Result<Evolution<T>> {
    let problem = EvolutionProblem {
        op: sys.op.clone(),
        u0: sys.u0.clone(),
        forcing: sys.forcing.clone(),
        horizon: sys.horizon,
        s: T::zero(),
        kind: WeightKind::Elliptic,
    };
    evolve(&problem, scheme, dt)
}

/// `u = Γ^{−(m−1)} u_1` at every time.
pub fn extract_u<T: Real>(sys: &FirstOrderSystem<T>, traj: &Trajectory<T>) -> Vec<SpectralField<T>> {
    let s = -T::lit((sys.order - 1) as f64);
    traj.states.iter().map(|v| gamma_power(&v[0], s, sys.kind)).collect()
}

/// Direct per-mode solution of a problem with x- and t-independent
/// coefficients and constant forcing, from the plain companion matrix
/// (no `Γ` scaling) exponentiated per representation. `None` when the
/// coefficients or forcing vary.
pub fn direct_solution<T: Real>(p: &HigherOrderProblem<T>, times: &[T]) -> Result<Option<Vec<SpectralField<T>>>> {
    p.validate()?;
    let varying = p.coeffs.iter().flatten().any(|a| !a.meta().x_independent || !a.meta().t_independent);
    if varying || !p.forcing.t_independent() || matches!(p.forcing, Forcing::Custom(_)) {
        return Ok(None);
    }
    let m = p.order;
    let like = &p.data[0];
    let f = p.forcing.eval(T::zero());
    let reps = like.reps();
    let mut out: Vec<SpectralField<T>> = times.iter().map(|_| SpectralField::zeros(like.group, like.band)).collect();
    for (k, &r) in reps.iter().enumerate() {
        let d = r.dim();
        let n = (m + 1) * d;
        // state (u, u', …, u^{(m−1)}, f)
        let mut c = CMatrix::zeros(n, n);
        for j in 0..m - 1 {
            c.view_mut((j * d, (j + 1) * d), (d, d)).fill_with_identity();
        }
        for (i, a) in p.coeffs.iter().enumerate() {
            if let Some(a) = a {
                // a_{i+1} multiplies ∂ₜ^{m−i−1} u
                c.view_mut(((m - 1) * d, (m - i - 1) * d), (d, d)).copy_from(&a.eval(T::zero(), None, r)?);
            }
        }
        c.view_mut(((m - 1) * d, m * d), (d, d)).fill_with_identity();
        let mut x0 = CMatrix::zeros(n, d);
        for (j, g) in p.data.iter().enumerate() {
            x0.view_mut((j * d, 0), (d, d)).copy_from(&g.coeffs[k]);
        }
        if let Some(f) = &f {
            x0.view_mut((m * d, 0), (d, d)).copy_from(&f[0].coeffs[k]);
        }
        for (o, &t) in out.iter_mut().zip(times) {
            let x = (&c * creal(t)).exp() * &x0;
            o.coeffs[k].copy_from(&x.view((0, 0), (d, d)));
        }
    }
    Ok(Some(out))
}
