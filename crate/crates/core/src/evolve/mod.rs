//! Time integration of `∂ₜv = K(t)v + f` and energy diagnostics.
//!
//! States are stacks of spectral fields so the same steppers serve scalar
//! problems (one component) and the first-order systems built by
//! [`crate::reduce`].

mod block;
mod energy;
mod gmres;
mod step;

#[cfg(test)]
mod tests;

pub use block::{stack_inner, stack_norm_sq, BlockOperator, Forcing, ForcingFn, Stack};
pub use energy::{
    energy_estimate_check, energy_identity_residual, sobolev_norm, stack_sobolev_norm_sq, EnergyReport, EstimateFit,
};
pub use step::{step_crank_nicolson, step_exact_invariant, step_rk4, CnOptions, Scheme, Stepper, RK4_CAP};

use crate::error::{Error, Result};
use crate::harmonic::SpectralField;
use crate::scalar::Real;
use crate::symbol::{Symbol, WeightKind};

/// `∂ₜv = K(t)v + f`, `v(0) = u₀` on `[0, horizon]`, with energies measured
/// in `H^s` of the given kind.
#[derive(Clone, Debug)]
pub struct EvolutionProblem<T: Real> {
    pub op: BlockOperator<T>,
    pub u0: Stack<T>,
    pub forcing: Forcing<T>,
    pub horizon: T,
    pub s: T,
    pub kind: WeightKind,
}

impl<T: Real> EvolutionProblem<T> {
    pub fn scalar(sym: Symbol<T>, u0: SpectralField<T>, horizon: T) -> Self {
        EvolutionProblem {
            op: BlockOperator::scalar(sym),
            u0: vec![u0],
            forcing: Forcing::Zero,
            horizon,
            s: T::zero(),
            kind: WeightKind::Elliptic,
        }
    }

    pub fn with_forcing(mut self, forcing: Forcing<T>) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn with_norm(mut self, s: T, kind: WeightKind) -> Self {
        self.s = s;
        self.kind = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > T::zero()) {
            return Err(Error::Range(format!("horizon {} must be positive", self.horizon.as_f64())));
        }
        self.op.check_state(&self.u0)?;
        self.forcing.check(&self.u0)
    }
}

/// States at uniformly spaced times, starting from the initial data.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<Stack<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &Stack<T> {
        self.states.last().expect("trajectories hold the initial state")
    }

    /// Component `i` of every state.
    pub fn component(&self, i: usize) -> Vec<SpectralField<T>> {
        self.states.iter().map(|v| v[i].clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Evolution<T: Real> {
    pub trajectory: Trajectory<T>,
    pub report: EnergyReport,
    pub scheme: Scheme,
}

/// Number of uniform steps covering `horizon` with steps no longer than
/// `dt`; at least two, so the energy identity has a centered point.
pub fn step_count<T: Real>(horizon: T, dt: T) -> Result<usize> {
    if !(dt > T::zero()) || dt > horizon {
        return Err(Error::Range(format!("time step {} must lie in (0, T]", dt.as_f64())));
    }
    let n = (horizon / dt).as_f64();
    Ok(((n - 1e-9).ceil() as usize).max(2))
}

/// Integrates `problem` and fills the energy report.
pub fn evolve<T: Real>(problem: &EvolutionProblem<T>, scheme: Scheme, dt: T) -> Result<Evolution<T>> {
    problem.validate()?;
    let n = step_count(problem.horizon, dt)?;
    let h = problem.horizon / T::lit(n as f64);
    let stepper =
        Stepper::new(problem.op.clone(), problem.forcing.clone(), scheme, h, problem.u0[0].band)?;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(T::zero());
    states.push(problem.u0.clone());
    for i in 0..n {
        let t = h * T::lit(i as f64);
        let next = stepper.step(states.last().expect("nonempty"), t)?;
        times.push(h * T::lit((i + 1) as f64));
        states.push(next);
    }
    let trajectory = Trajectory { times, states };
    let report = energy_report(problem, &trajectory, stepper.scheme())?;
    Ok(Evolution { trajectory, report, scheme: stepper.scheme() })
}

/// Norm tables, residuals and fitted constants for a computed trajectory.
pub fn energy_report<T: Real>(
    problem: &EvolutionProblem<T>,
    traj: &Trajectory<T>,
    scheme: Scheme,
) -> Result<EnergyReport> {
    let (s, kind) = (problem.s, problem.kind);
    let smooth = s + problem.op.order() * T::lit(0.5);
    let norms = |s: T| -> Vec<f64> {
        traj.states.iter().map(|v| stack_sobolev_norm_sq(v, s, kind).sqrt().as_f64()).collect()
    };
    let residuals = energy_identity_residual(traj, &problem.op, &problem.forcing)?;
    Ok(EnergyReport {
        scheme: scheme.name().to_string(),
        dt: (traj.times[1] - traj.times[0]).as_f64(),
        s: s.as_f64(),
        kind,
        times: traj.times.iter().map(|t| t.as_f64()).collect(),
        l2_norms: norms(T::zero()),
        hs_norms: norms(s),
        smoothing_norms: norms(smooth),
        identity_residuals: residuals.iter().map(|r| r.as_f64()).collect(),
        estimate: energy_estimate_check(traj, &problem.u0, &problem.forcing, s, kind),
    })
}
