//! Internal consistency of the group Fourier transform.

use lie_diffuse::harmonic::{
    dual_enumerate, fourier_forward, fourier_inverse, l2_inner, quadrature_grid, Group, SpectralField,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const SELFTEST_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub group: Group,
    #[serde(rename = "two_L")]
    pub two_l: u32,
    pub fields: usize,
    pub plancherel_max_rel_err: f64,
    pub roundtrip_max_rel_err: f64,
    /// Largest `|∫ ξ_ab conj(ξ'_cd) − δ/d|` over representations up to this band.
    pub orthogonality_two_ell: u32,
    pub orthogonality_max_err: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Plancherel and round trip on `count` random fields at `band`, and the
/// orthogonality table up to `two_ell = min(band, 4)`.
pub fn transform_selftest(group: Group, band: u32, count: usize, seed: u64) -> lie_diffuse::Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = quadrature_grid::<f64>(group, band);
    let (mut planch, mut round) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let f = SpectralField::<f64>::random(group, band, &mut rng);
        let g = fourier_inverse(&f, &grid)?;
        let n2 = f.norm_sq();
        planch = planch.max((l2_inner(&g, &g)?.re - n2).abs() / n2);
        let back = fourier_forward(&g, band)?;
        round = round.max(back.max_abs_diff(&f) / f.coeffs.iter().flat_map(|m| m.iter()).map(|z| z.norm()).fold(0.0, f64::max));
    }
    let top = band.min(4);
    let ogrid = quadrature_grid::<f64>(group, top);
    let mut samples = Vec::new();
    for r in dual_enumerate(group, top) {
        for a in 0..r.dim() {
            for b in 0..r.dim() {
                let spec = SpectralField::<f64>::matrix_coefficient(r, a, b, top)?;
                samples.push(((r, a, b), fourier_inverse(&spec, &ogrid)?));
            }
        }
    }
    let mut orth = 0.0f64;
    for (i, (ki, fi)) in samples.iter().enumerate() {
        for (j, (_, fj)) in samples.iter().enumerate() {
            let expect = if i == j { 1.0 / ki.0.dim() as f64 } else { 0.0 };
            orth = orth.max((l2_inner(fi, fj)? - expect).norm());
        }
    }
    let passed = planch <= SELFTEST_TOL && round <= SELFTEST_TOL && orth <= SELFTEST_TOL;
    Ok(SelftestReport {
        group,
        two_l: band,
        fields: count,
        plancherel_max_rel_err: planch,
        roundtrip_max_rel_err: round,
        orthogonality_two_ell: top,
        orthogonality_max_err: orth,
        tolerance: SELFTEST_TOL,
        passed,
    })
}
