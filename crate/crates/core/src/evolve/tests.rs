use std::sync::Arc;

use super::*;
use crate::harmonic::{Group, RepIndex};
use crate::scalar::{cplx, creal, CMatrix, Complex};
use crate::symbol::{build_operator_symbol, parse_operator, Registry, ScalarField, TimeProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sym(expr: &str, band: u32) -> Symbol<f64> {
    build_operator_symbol(&parse_operator(expr, Group::Su2, &Registry::default()).unwrap(), band).unwrap()
}

fn op(expr: &str, band: u32) -> BlockOperator<f64> {
    BlockOperator::scalar(sym(expr, band))
}

fn random(band: u32, seed: u64) -> SpectralField<f64> {
    SpectralField::random(Group::Su2, band, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `û(ξ)_{ab} e^{λ_a t}` for a diagonal generator with eigenvalue `λ(rep, a)`.
fn decayed(u: &SpectralField<f64>, t: f64, lambda: impl Fn(RepIndex, usize) -> f64) -> SpectralField<f64> {
    u.map_blocks(|r, m| CMatrix::from_fn(m.nrows(), m.ncols(), |a, b| m[(a, b)] * (lambda(r, a) * t).exp()))
}

fn casimir(r: RepIndex) -> f64 {
    let l = r.two_ell as f64 / 2.0;
    l * l + l
}

fn ell_one_mode(v: &SpectralField<f64>) -> Complex<f64> {
    v.get(RepIndex::su2(2)).unwrap()[(0, 1)]
}

#[test]
fn sobolev_norm_examples() {
    let one = SpectralField::<f64>::matrix_coefficient(RepIndex::su2(0), 0, 0, 4).unwrap();
    for s in [-1.0, 0.5, 3.0] {
        for kind in [WeightKind::Elliptic, WeightKind::Subelliptic] {
            assert!((sobolev_norm(&one, s, kind) - 1.0).abs() < 1e-15);
        }
    }
    let xi = SpectralField::<f64>::matrix_coefficient(RepIndex::su2(1), 1, 1, 4).unwrap();
    let expect = 1.75 / 2f64.sqrt();
    assert!((sobolev_norm(&xi, 2.0, WeightKind::Elliptic) - expect).abs() < 1e-14);
    let u = random(6, 1);
    assert_eq!(sobolev_norm(&u, 0.0, WeightKind::Subelliptic), u.norm());
    let w = SpectralField::<f64>::random(Group::Torus, 5, &mut ChaCha8Rng::seed_from_u64(2));
    let (e, s) = (sobolev_norm(&w, 1.5, WeightKind::Elliptic), sobolev_norm(&w, 1.5, WeightKind::Subelliptic));
    assert_eq!(e, s);
}

#[test]
fn exact_heat_step_on_a_matrix_coefficient() {
    let u = SpectralField::<f64>::matrix_coefficient(RepIndex::su2(1), 0, 0, 4).unwrap();
    let k = op("-laplace", 4);
    let mut v = vec![u.clone()];
    for n in 0..10 {
        v = step_exact_invariant(&k, &v, &Forcing::Zero, 0.1 * n as f64, 0.1).unwrap();
        let expect = u.scale(creal((-0.75 * 0.1 * (n + 1) as f64).exp()));
        assert!(v[0].max_abs_diff(&expect) <= 1e-12);
    }
}

#[test]
fn zero_operator_is_the_identity() {
    let u = vec![random(4, 3)];
    let k = op("0*id", 4);
    for step in [step_exact_invariant, step_rk4, step_crank_nicolson] {
        let v = step(&k, &u, &Forcing::Zero, 0.0, 0.3).unwrap();
        assert!(v[0].max_abs_diff(&u[0]) < 1e-15);
    }
}

#[test]
fn fractional_mode_decay() {
    let u = SpectralField::<f64>::matrix_coefficient(RepIndex::su2(2), 0, 1, 2).unwrap();
    let v = step_exact_invariant(&op("-laplace^1/2", 2), &[u.clone()], &Forcing::Zero, 0.0, 0.25).unwrap();
    let expect = u.scale(creal((-2f64.sqrt() * 0.25).exp()));
    assert!(v[0].max_abs_diff(&expect) < 1e-15);
}

#[test]
fn local_errors_have_nominal_order() {
    let k = op("-laplace", 4);
    let u = vec![random(4, 4)];
    let err = |step: fn(&BlockOperator<f64>, &[SpectralField<f64>], &Forcing<f64>, f64, f64) -> crate::Result<Stack<f64>>,
               dt: f64| {
        let exact = decayed(&u[0], dt, |r, _| -casimir(r));
        step(&k, &u, &Forcing::Zero, 0.0, dt).unwrap()[0].max_abs_diff(&exact)
    };
    let rk = err(step_rk4, 0.02) / err(step_rk4, 0.01);
    let cn = err(step_crank_nicolson, 0.02) / err(step_crank_nicolson, 0.01);
    assert!((28.0..36.0).contains(&rk), "rk4 local ratio {rk}");
    assert!((7.0..9.0).contains(&cn), "cn local ratio {cn}");
}

fn final_error(scheme: Scheme, dt: f64) -> f64 {
    let u = SpectralField::<f64>::matrix_coefficient(RepIndex::su2(2), 1, 0, 8).unwrap();
    let p = EvolutionProblem::scalar(sym("-laplace", 8), u.clone(), 1.0);
    let out = evolve(&p, scheme, dt).unwrap();
    (ell_one_mode(&out.trajectory.last()[0]) - ell_one_mode(&u) * (-2f64).exp()).norm()
}

#[test]
fn global_convergence_orders() {
    for (scheme, min) in [(Scheme::Rk4, 3.7), (Scheme::CrankNicolson, 1.9)] {
        let e: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&dt| final_error(scheme, dt)).collect();
        for w in e.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= min, "{scheme}: order {order}");
        }
    }
    assert!(final_error(Scheme::Exact, 0.1) < 1e-15);
}

#[test]
fn exact_heat_matches_analytic_decay() {
    let u = random(8, 5);
    let p = EvolutionProblem::scalar(sym("-laplace", 8), u.clone(), 1.0);
    let out = evolve(&p, Scheme::Auto, 0.05).unwrap();
    assert_eq!(out.scheme, Scheme::Exact);
    let expect = decayed(&u, 1.0, |r, _| -casimir(r));
    assert!(out.trajectory.last()[0].max_abs_diff(&expect) <= 1e-10);
    assert_eq!(out.trajectory.states.len(), 21);
}

#[test]
fn manufactured_linear_growth() {
    let u = random(4, 6);
    let p = EvolutionProblem::scalar(sym("0*id", 4), u.clone(), 1.0)
        .with_forcing(Forcing::constant(vec![u.clone()]));
    for scheme in [Scheme::Rk4, Scheme::Exact, Scheme::CrankNicolson] {
        let out = evolve(&p, scheme, 0.1).unwrap();
        for (t, v) in out.trajectory.times.iter().zip(&out.trajectory.states) {
            assert!(v[0].max_abs_diff(&u.scale(creal(1.0 + t))) <= 1e-8, "{scheme}");
        }
        let res = &out.report.identity_residuals;
        assert!(res.iter().all(|r| *r <= 1e-10 * u.norm_sq()), "{scheme}: {res:?}");
        let fit = &out.report.estimate;
        assert!((fit.c - 1.0).abs() < 1e-12 && (fit.c_prime - 3.0).abs() < 1e-2, "{fit:?}");
    }
}

#[test]
fn boundary_drift_is_a_contraction() {
    let p = EvolutionProblem::scalar(sym("-1*laplace^1/2 + 1*iX3", 8), random(8, 7), 1.0);
    let out = evolve(&p, Scheme::Exact, 0.01).unwrap();
    assert!(out.report.l2_norms.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(out.report.estimate.c <= 1.0 + 1e-8);
}

#[test]
fn skew_drift_conserves_mass() {
    for expr in ["1.3*X3", "i*1.3*iX3"] {
        let u = random(8, 8);
        let p = EvolutionProblem::scalar(sym(expr, 8), u.clone(), 1.0);
        let out = evolve(&p, Scheme::Exact, 0.01).unwrap();
        let n0 = u.norm();
        assert!(out.report.l2_norms.iter().all(|n| (n - n0).abs() <= 1e-10 * n0), "{expr}");
    }
}

#[test]
fn energy_identity_residuals() {
    let u = random(4, 9);
    let zero = EvolutionProblem::scalar(sym("0*id", 4), u.clone(), 1.0);
    let out = evolve(&zero, Scheme::Exact, 0.1).unwrap();
    assert!(out.report.identity_residuals.iter().all(|r| *r <= 1e-14 * u.norm_sq()));
    let fit = &out.report.estimate;
    assert_eq!((fit.c, fit.c_prime), (1.0, 0.0));

    for expr in ["-laplace^1/2", "-1*laplace^1/2 + 0.5*iX3"] {
        let p = EvolutionProblem::scalar(sym(expr, 4), u.clone(), 1.0);
        let worst = |dt: f64| evolve(&p, Scheme::Exact, dt).unwrap().report.identity_residuals.iter().fold(0.0f64, |a, b| a.max(*b));
        let ratio = worst(0.01) / worst(0.005);
        assert!((3.5..=4.5).contains(&ratio), "{expr}: ratio {ratio}");
    }
}

#[test]
fn short_trajectories_are_rejected() {
    let t = Trajectory { times: vec![0.0, 0.1], states: vec![vec![random(2, 1)], vec![random(2, 1)]] };
    let e = energy_identity_residual(&t, &op("-laplace", 2), &Forcing::Zero);
    assert_eq!(e, Err(crate::Error::TrajectoryTooShort { len: 2, min: 3 }));
}

#[test]
fn contraction_constants_in_every_sobolev_space() {
    for s in [-1.0, 0.0, 1.0, 2.0] {
        let p = EvolutionProblem::scalar(sym("-bessel^2", 6), random(6, 10), 1.0).with_norm(s, WeightKind::Elliptic);
        let fit = evolve(&p, Scheme::Exact, 0.05).unwrap().report.estimate;
        assert!(fit.c <= 1.0 + 1e-10 && fit.c_prime == 0.0, "s = {s}: {fit:?}");
    }
}

#[test]
fn pareto_front_is_monotone() {
    let u = random(4, 11);
    let p = EvolutionProblem::scalar(sym("-laplace^1/2 + 0.8*iX3", 4), u.clone(), 1.0)
        .with_forcing(Forcing::Separable { field: vec![random(4, 12)], profile: Some(TimeProfile::Linear { c0: 1.0, c1: -0.5 }) });
    let fit = evolve(&p, Scheme::Exact, 0.01).unwrap().report.estimate;
    assert!(fit.satisfied && fit.c >= 1.0 - 1e-12);
    assert_eq!(fit.pareto[0], (fit.c, fit.c_prime));
    assert!(fit.pareto.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
}

#[test]
fn forced_exact_step_matches_the_integrated_ode() {
    // v' = -λ v + c on one mode: v(h) = e^{-λh} v + (1 - e^{-λh}) c / λ
    let u = SpectralField::<f64>::matrix_coefficient(RepIndex::su2(2), 1, 1, 2).unwrap();
    let f = SpectralField::<f64>::matrix_coefficient(RepIndex::su2(2), 1, 1, 2).unwrap().scale(cplx(0.3, -0.2));
    let v = step_exact_invariant(&op("-laplace", 2), &[u.clone()], &Forcing::constant(vec![f.clone()]), 0.0, 0.4).unwrap();
    let e = (-2.0f64 * 0.4).exp();
    let expect = u.scale(creal(e)).add(&f.scale(creal((1.0 - e) / 2.0)));
    assert!(v[0].max_abs_diff(&expect) < 1e-15);
}

#[test]
fn rk4_substeps_beyond_the_stability_cap() {
    let u = vec![random(8, 13)];
    let k = op("-laplace", 8);
    let v = step_rk4(&k, &u, &Forcing::Zero, 0.0, 0.5).unwrap();
    assert!(v[0].norm() <= u[0].norm());
}

#[test]
fn nondiagonal_blocks_use_the_matrix_exponential() {
    let k = op("-laplace + 0.7*X1 + 0.2*d+", 4);
    assert!(!k.block(0, 0).unwrap().meta().diagonal);
    let u = vec![random(4, 14)];
    let exact = step_exact_invariant(&k, &u, &Forcing::Zero, 0.0, 0.2).unwrap();
    let mut fine = u.clone();
    for n in 0..200 {
        fine = step_rk4(&k, &fine, &Forcing::Zero, n as f64 * 1e-3, 1e-3).unwrap();
    }
    let e = exact[0].max_abs_diff(&fine[0]);
    assert!(e < 1e-10, "{e}");
}

#[test]
fn x_dependent_crank_nicolson() {
    let mut reg = Registry::default();
    reg.fields.insert("a".into(), Arc::new(ScalarField::zonal(Group::Su2, &[1.0, 0.4])));
    let spec = parse_operator("-a*laplace^1/2 + 0.3*a*X3", Group::Su2, &reg).unwrap();
    let k = build_operator_symbol(&spec, 6).unwrap();
    assert!(!k.meta().x_independent);
    let u = random(6, 15);
    let p = EvolutionProblem::scalar(k.clone(), u.clone(), 0.2);
    assert_eq!(evolve(&p, Scheme::Exact, 0.1).unwrap_err(), crate::Error::XDependent);
    let cn = |dt: f64| evolve(&p, Scheme::Auto, dt).unwrap().trajectory.last()[0].clone();
    let rk = evolve(&p, Scheme::Rk4, 1e-3).unwrap().trajectory.last()[0].clone();
    let (e1, e2) = (cn(0.02).max_abs_diff(&rk), cn(0.01).max_abs_diff(&rk));
    assert!(e1 / e2 > 3.6 && e1 / e2 < 4.4, "cn errors {e1} {e2}");
}

#[test]
fn time_dependent_operator_is_frozen_at_midpoints() {
    let mut reg = Registry::default();
    reg.profiles.insert("p".into(), TimeProfile::Cosine { offset: 1.0, amplitude: 0.5, omega: 3.0 });
    let spec = parse_operator("-p*laplace", Group::Su2, &reg).unwrap();
    let k = build_operator_symbol(&spec, 4).unwrap();
    let u = random(4, 16);
    let p = EvolutionProblem::scalar(k, u.clone(), 1.0);
    // ∫₀¹ (1 + 0.5 cos 3t) dt = 1 + sin(3)/6
    let integral = 1.0 + 3f64.sin() / 6.0;
    let expect = decayed(&u, integral, |r, _| -casimir(r));
    let err = |dt: f64| evolve(&p, Scheme::Exact, dt).unwrap().trajectory.last()[0].max_abs_diff(&expect);
    let ratio = err(0.02) / err(0.01);
    assert!((3.6..4.4).contains(&ratio), "{ratio}");
}

#[test]
fn block_operator_shapes() {
    let a = sym("-laplace", 4);
    let b = BlockOperator::zeros(Group::Su2, 2).with_block(0, 1, a.clone()).unwrap();
    assert!(b.clone().with_block(2, 0, a.clone()).is_err());
    assert_eq!(b.band(), 4);
    assert!(b.apply(0.0, &[random(4, 1)]).is_err());
    let v = b.apply(0.0, &[random(4, 1), random(4, 2)]).unwrap();
    assert_eq!(v[1].norm(), 0.0);
    let torus = build_operator_symbol(&parse_operator("-laplace", Group::Torus, &Registry::default()).unwrap(), 4).unwrap();
    assert!(matches!(b.with_block(1, 1, torus), Err(crate::Error::WrongGroup { .. })));
}

#[test]
fn csv_layout() {
    let p = EvolutionProblem::scalar(sym("-laplace", 2), random(2, 3), 0.2);
    let out = evolve(&p, Scheme::Exact, 0.1).unwrap();
    let mut buf = Vec::new();
    out.report.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# lie-diffuse v1");
    assert_eq!(lines[1], "t,l2_norm,hs_norm,identity_residual");
    assert_eq!(lines.len(), 2 + 3);
    assert!(lines[2].starts_with("0e0,"));
}

#[test]
fn step_count_rules() {
    assert_eq!(step_count(1.0, 1e-3).unwrap(), 1000);
    assert_eq!(step_count(1.0, 0.3).unwrap(), 4);
    assert_eq!(step_count(1.0, 1.0).unwrap(), 2);
    assert!(step_count(1.0, 2.0).is_err());
    assert!(step_count(1.0, 0.0).is_err());
}

#[test]
fn single_precision_heat() {
    let u = SpectralField::<f32>::matrix_coefficient(RepIndex::su2(1), 0, 0, 2).unwrap();
    let k = build_operator_symbol(&parse_operator("-laplace", Group::Su2, &Registry::default()).unwrap(), 2).unwrap();
    let p = EvolutionProblem::scalar(k, u.clone(), 1.0f32);
    let out = evolve(&p, Scheme::Exact, 0.1).unwrap();
    let expect = u.scale(Complex::new((-0.75f32).exp(), 0.0));
    assert!(out.trajectory.last()[0].max_abs_diff(&expect) < 1e-6);
}
