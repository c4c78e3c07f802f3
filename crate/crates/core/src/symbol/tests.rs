use std::sync::Arc;

use super::*;
use crate::harmonic::{fourier_forward, fourier_inverse, quadrature_grid, GridField, SpectralField};
use crate::scalar::{cplx, max_abs_diff};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn diag(v: &[f64]) -> CMatrix<f64> {
    CMatrix::from_fn(v.len(), v.len(), |i, j| if i == j { creal(v[i]) } else { creal(0.0) })
}

fn su2(spec: &str, band: u32) -> Symbol<f64> {
    let spec = parse_operator(spec, Group::Su2, &Registry::default()).unwrap();
    build_operator_symbol(&spec, band).unwrap()
}

fn zonal_registry(c: &[f64]) -> Registry<f64> {
    let mut reg = Registry::default();
    reg.fields.insert("a".into(), Arc::new(ScalarField::zonal(Group::Su2, c)));
    reg
}

#[test]
fn bessel_symbol_example() {
    let s = su2("-bessel^1", 4);
    let m = s.eval(0.3, None, RepIndex::su2(2)).unwrap();
    assert!(max_abs_diff(&m, &diag(&[-3f64.sqrt(); 3])) < 1e-14);
}

#[test]
fn drift_symbol_example() {
    let s = su2("-1*laplace^1/2 + 1*iX3", 4);
    let m = s.eval(0.0, None, RepIndex::su2(2)).unwrap();
    let r2 = 2f64.sqrt();
    assert!(max_abs_diff(&m, &diag(&[-r2 - 1.0, -r2, -r2 + 1.0])) < 1e-14);
    assert_eq!(s.meta().order, 1.0);
    assert_eq!(s.meta().kappa, 1);
    assert!(s.meta().x_independent && s.meta().t_independent && s.meta().hermitian && s.meta().diagonal);
}

#[test]
fn identity_symbol() {
    let s = su2("id", 3);
    for r in dual_enumerate(Group::Su2, 3) {
        assert_eq!(s.eval(1.0, None, r).unwrap(), CMatrix::identity(r.dim(), r.dim()));
    }
    assert_eq!(s.meta().order, 0.0);
}

#[test]
fn metadata_inference() {
    let s = su2("-sublaplace^1/2 + X1", 2);
    assert_eq!(s.meta().kappa, 2);
    assert!(!s.meta().hermitian && !s.meta().diagonal);
    assert!(su2("i*X1", 2).meta().hermitian);
    let mut reg = zonal_registry(&[-1.0, 0.5]);
    reg.profiles.insert("p".into(), TimeProfile::Cosine { offset: 1.0, amplitude: 0.5, omega: 3.0 });
    let spec = parse_operator("a*laplace + p*id", Group::Su2, &reg).unwrap();
    let s = build_operator_symbol(&spec, 4).unwrap();
    assert!(!s.meta().x_independent && !s.meta().t_independent && s.meta().hermitian);
    assert!(matches!(s.eval(0.0, None, RepIndex::su2(1)), Err(Error::XDependent)));
    assert!(matches!(s.invariant_blocks(0.0), Err(Error::XDependent)));
    assert!(s.x_grid().is_some());
}

#[test]
fn bandlimit_is_enforced() {
    let s = su2("-laplace", 2);
    assert!(matches!(s.eval(0.0, None, RepIndex::su2(3)), Err(Error::Bandlimit { .. })));
    let f = SpectralField::<f64>::zeros(Group::Su2, 4);
    assert!(matches!(s.apply_spectral(0.0, &f), Err(Error::Bandlimit { .. })));
}

#[test]
fn laplacian_scales_spin_one() {
    let s = su2("laplace", 4);
    let f = SpectralField::<f64>::matrix_coefficient(RepIndex::su2(2), 1, 2, 4).unwrap();
    let g = invariant_apply(&s, 0.0, &f).unwrap();
    assert!(g.max_abs_diff(&f.scale(creal(2.0))) < 1e-14);
    let id = su2("id", 4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = SpectralField::random(Group::Su2, 4, &mut rng);
    assert_eq!(invariant_apply(&id, 0.0, &r).unwrap(), r);
}

#[test]
fn quantized_identity_reproduces_field() {
    let grid = quadrature_grid::<f64>(Group::Su2, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = fourier_inverse(&SpectralField::random(Group::Su2, 5, &mut rng), &grid).unwrap();
    let g = quantize_apply(&su2("id", 5), 0.0, &f).unwrap();
    assert!(g.max_abs_diff(&f) < 1e-10);
}

#[test]
fn quantized_laplacian_on_coefficient() {
    let grid = quadrature_grid::<f64>(Group::Su2, 2);
    let rep = RepIndex::su2(2);
    let f = GridField::from_fn(grid.clone(), |p, t, s| wigner_matrix(rep, (p, t, s)).unwrap()[(1, 1)]);
    let c = -0.7;
    let g = quantize_apply(&su2("laplace", 2).scaled(c), 0.0, &f).unwrap();
    let expect = GridField::new(grid, f.values.iter().map(|v| v * (2.0 * c)).collect()).unwrap();
    assert!(g.max_abs_diff(&expect) < 1e-12);
}

#[test]
fn quantized_multiplication_is_pointwise_product() {
    let grid = quadrature_grid::<f64>(Group::Su2, 4);
    let a = GridField::from_fn(grid.clone(), |p, t, s| creal(1.0 + 0.3 * p.cos() * t.sin() + 0.1 * (s / 2.0).sin()));
    let mut reg = Registry::default();
    reg.fields.insert("a".into(), Arc::new(ScalarField::from_samples(a.clone()).unwrap()));
    let s = build_operator_symbol(&parse_operator("a*id", Group::Su2, &reg).unwrap(), 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = fourier_inverse(&SpectralField::random(Group::Su2, 4, &mut rng), &grid).unwrap();
    let g = quantize_apply(&s, 0.0, &f).unwrap();
    assert!(g.max_abs_diff(&a.mul(&f).unwrap()) < 1e-10);
}

#[test]
fn quantize_agrees_with_invariant_apply() {
    let grid = quadrature_grid::<f64>(Group::Su2, 4);
    let s = su2("-laplace^3/4 + 0.4*X1 - 0.2*d+ + 1.5*iX3", 4);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let hat = SpectralField::random(Group::Su2, 4, &mut rng);
    let f = fourier_inverse(&hat, &grid).unwrap();
    let direct = quantize_apply(&s, 0.0, &f).unwrap();
    let via = fourier_inverse(&invariant_apply(&s, 0.0, &hat).unwrap(), &grid).unwrap();
    assert!(direct.max_abs_diff(&via) < 1e-12);
}

#[test]
fn galerkin_product_is_alias_free() {
    let reg = zonal_registry(&[-1.0, 0.4, 0.2]);
    let spec = parse_operator("a*laplace^1/2 + 0.5*a*iX3 - id", Group::Su2, &reg).unwrap();
    let s = build_operator_symbol(&spec, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let hat = SpectralField::random(Group::Su2, 6, &mut rng);
    let out = s.apply_spectral(0.0, &hat).unwrap();
    // same projection formed on a much finer grid
    let fine = quadrature_grid::<f64>(Group::Su2, 20);
    let on_fine = quantize_apply(&build_operator_symbol(&spec, 20).unwrap(), 0.0, &fourier_inverse(&hat.with_band(20), &fine).unwrap()).unwrap();
    let oracle = fourier_forward(&on_fine, 6).unwrap();
    assert!(out.max_abs_diff(&oracle) < 1e-11);
}

#[test]
fn custom_symbol_matches_built_one() {
    let built = su2("-laplace + 0.5*iX3", 3);
    let meta = *built.meta();
    let b = built.clone();
    let custom = Symbol::custom(Group::Su2, 3, meta, None, move |t, _, r| b.eval(t, None, r).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let hat = SpectralField::random(Group::Su2, 3, &mut rng);
    assert_eq!(custom.apply_spectral(0.0, &hat).unwrap(), built.apply_spectral(0.0, &hat).unwrap());
}

#[test]
fn custom_x_dependent_symbol_quantizes_pointwise() {
    let grid = quadrature_grid::<f64>(Group::Su2, 3);
    let g2 = grid.clone();
    let meta = SymbolMeta {
        order: 0.0,
        rho: 1.0,
        delta: 0.0,
        kappa: 1,
        x_independent: false,
        t_independent: true,
        hermitian: true,
        diagonal: true,
    };
    let custom = Symbol::custom(Group::Su2, 3, meta, Some(grid.clone()), move |_, x, r| {
        let (_, th, _) = g2.angles(x.unwrap());
        CMatrix::identity(r.dim(), r.dim()) * creal(th.cos())
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = fourier_inverse(&SpectralField::random(Group::Su2, 3, &mut rng), &grid).unwrap();
    let g = quantize_apply(&custom, 0.0, &f).unwrap();
    for n in 0..grid.node_count() {
        let (_, th, _) = grid.angles(n);
        assert!((g.values[n] - f.values[n] * th.cos()).norm() < 1e-10);
    }
    let other = quadrature_grid::<f64>(Group::Su2, 2);
    assert!(matches!(custom.on_grid(&other), Err(Error::GridMismatch)));
}

#[test]
fn resampled_coefficients_follow_the_grid() {
    let reg = zonal_registry(&[0.0, 1.0]);
    let s = build_operator_symbol(&parse_operator("a*id", Group::Su2, &reg).unwrap(), 2).unwrap();
    let coarse = quadrature_grid::<f64>(Group::Su2, 1);
    let s = s.on_grid(&coarse).unwrap();
    for n in 0..coarse.node_count() {
        let (_, th, _) = coarse.angles(n);
        let m = s.eval(0.0, Some(n), RepIndex::su2(0)).unwrap();
        assert!((m[(0, 0)].re - th.cos()).abs() < 1e-13);
    }
    assert!((s.mean_blocks(0.0).unwrap()[0][(0, 0)].re).abs() < 1e-15);
}

#[test]
fn composition_and_scaling() {
    let s = su2("-laplace", 2).compose_right(&Base::BesselFrac(-1.0)).unwrap();
    let m = s.eval(0.0, None, RepIndex::su2(2)).unwrap();
    assert!(max_abs_diff(&m, &diag(&[-2.0 / 3f64.sqrt(); 3])) < 1e-14);
    assert_eq!(s.meta().order, 1.0);
    let t = su2("X1", 2).scaled(2.0);
    let x1 = vector_field_symbol::<f64>(VectorField::X1, RepIndex::su2(1)).unwrap();
    assert!(max_abs_diff(&t.eval(0.0, None, RepIndex::su2(1)).unwrap(), &(x1 * creal(2.0))) < 1e-15);
}

#[test]
fn time_profiles_enter_the_symbol() {
    let mut reg = Registry::default();
    reg.profiles.insert("p".into(), TimeProfile::Linear { c0: 1.0, c1: 2.0 });
    let s = build_operator_symbol(&parse_operator("-p*laplace", Group::Su2, &reg).unwrap(), 2).unwrap();
    let m = s.eval(0.5, None, RepIndex::su2(1)).unwrap();
    assert!(max_abs_diff(&m, &diag(&[-1.5; 2])) < 1e-15);
    assert!((s.norm_bound(0.5).unwrap() - 4.0).abs() < 1e-14);
}

#[test]
fn torus_symbols() {
    let spec = parse_operator::<f64>("-laplace^1/2 + 2*bessel^2", Group::Torus, &Registry::default()).unwrap();
    let s = build_operator_symbol(&spec, 3).unwrap();
    let m = s.eval(0.0, None, RepIndex::torus(-3)).unwrap();
    assert!((m[(0, 0)].re - (-3.0 + 20.0)).abs() < 1e-13);
    let mut reg = Registry::default();
    reg.fields.insert("a".into(), Arc::new(ScalarField::zonal(Group::Torus, &[1.0, 0.5])));
    let spec = parse_operator("-a*laplace", Group::Torus, &reg).unwrap();
    let s = build_operator_symbol(&spec, 5).unwrap();
    let hat = SpectralField::random(Group::Torus, 5, &mut ChaCha8Rng::seed_from_u64(1));
    let out = s.apply_spectral(0.0, &hat).unwrap();
    // (1 + cos x/2) multiplies -k² f_k: out_k = -(k² f_k + (k-1)² f_{k-1}/4 + (k+1)² f_{k+1}/4)
    for k in -5i32..=5 {
        let f = |j: i32| if j.abs() <= 5 { hat.coeffs[(j + 5) as usize][(0, 0)] * (j * j) as f64 } else { cplx(0.0, 0.0) };
        let expect = -(f(k) + (f(k - 1) + f(k + 1)) * 0.25);
        assert!((out.coeffs[(k + 5) as usize][(0, 0)] - expect).norm() < 1e-12, "k={k}");
    }
}

#[test]
fn f32_symbols() {
    let spec = parse_operator::<f32>("-laplace^1/2 + iX3", Group::Su2, &Registry::default()).unwrap();
    let s = build_operator_symbol(&spec, 4).unwrap();
    let m = s.eval(0.0, None, RepIndex::su2(2)).unwrap();
    assert!((m[(0, 0)].re + 2f32.sqrt() + 1.0).abs() < 1e-5);
}
