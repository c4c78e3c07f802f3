//! JSON layout for fields.
//!
//! Spectral: `{"group": "su2", "two_L": n, "coeffs": [{"two_ell": n, "re": [[..]], "im": [[..]]}]}`.
//! On the circle the bandlimit key is `"L"` and entries carry `"k"` instead of
//! `"two_ell"`. Matrices are row-major nested arrays.
//!
//! Grid: `{"group": .., "two_L"|"L": n, "re": [..], "im": [..]}` with nodes in
//! the θ-major, φ, ψ order of [`GridSpec`](super::GridSpec).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GridField, GridSpec, Group, RepIndex, SpectralField};
use crate::error::{Error, Result};
use crate::scalar::{cplx, CMatrix, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralEntryJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub two_ell: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<i32>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralFieldJson {
    pub group: Group,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub two_L: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub L: Option<u32>,
    pub coeffs: Vec<SpectralEntryJson>,
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFieldJson {
    pub group: Group,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub two_L: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub L: Option<u32>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

fn band_keys(group: Group, band: u32) -> (Option<u32>, Option<u32>) {
    match group {
        Group::Su2 => (Some(band), None),
        Group::Torus => (None, Some(band)),
    }
}

fn band_from_keys(group: Group, two_l: Option<u32>, l: Option<u32>) -> Result<u32> {
    match (group, two_l, l) {
        (Group::Su2, Some(b), None) | (Group::Torus, None, Some(b)) => Ok(b),
        (Group::Su2, _, _) => Err(Error::Layout("su2 fields need exactly the key `two_L`".into())),
        (Group::Torus, _, _) => Err(Error::Layout("torus fields need exactly the key `L`".into())),
    }
}

impl<T: Real> SpectralField<T> {
    pub fn to_json(&self) -> SpectralFieldJson {
        let (two_l, l) = band_keys(self.group, self.band);
        let coeffs = self
            .reps()
            .iter()
            .zip(&self.coeffs)
            .map(|(r, m)| {
                let rows = |part: fn(&crate::scalar::Complex<T>) -> T| -> Vec<Vec<f64>> {
                    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| part(&m[(i, j)]).as_f64()).collect()).collect()
                };
                SpectralEntryJson {
                    two_ell: (r.group == Group::Su2).then_some(r.two_ell),
                    k: (r.group == Group::Torus).then_some(r.k),
                    re: rows(|z| z.re),
                    im: rows(|z| z.im),
                }
            })
            .collect();
        SpectralFieldJson { group: self.group, two_L: two_l, L: l, coeffs }
    }

    /// Builds a field from its JSON layout; representations not listed are zero.
    pub fn from_json(j: &SpectralFieldJson) -> Result<Self> {
        let band = band_from_keys(j.group, j.two_L, j.L)?;
        let mut out = SpectralField::zeros(j.group, band);
        for e in &j.coeffs {
            let rep = match (j.group, e.two_ell, e.k) {
                (Group::Su2, Some(n), None) => RepIndex::su2(n),
                (Group::Torus, None, Some(k)) => RepIndex::torus(k),
                _ => return Err(Error::Layout("each entry needs `two_ell` (su2) or `k` (torus)".into())),
            };
            let d = rep.dim();
            let ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
            if !ok(&e.re) || !ok(&e.im) {
                return Err(Error::Layout(format!("entry {} must be {d}x{d}", rep.label())));
            }
            let slot = out
                .get_mut(rep)
                .ok_or(Error::Layout(format!("entry {} exceeds the bandlimit {band}", rep.label())))?;
            *slot = CMatrix::from_fn(d, d, |a, b| cplx(T::lit(e.re[a][b]), T::lit(e.im[a][b])));
        }
        Ok(out)
    }
}

impl<T: Real> GridField<T> {
    pub fn to_json(&self) -> GridFieldJson {
        let (two_l, l) = band_keys(self.grid.group, self.grid.band);
        GridFieldJson {
            group: self.grid.group,
            two_L: two_l,
            L: l,
            re: self.values.iter().map(|z| z.re.as_f64()).collect(),
            im: self.values.iter().map(|z| z.im.as_f64()).collect(),
        }
    }

    pub fn from_json(j: &GridFieldJson) -> Result<Self> {
        let band = band_from_keys(j.group, j.two_L, j.L)?;
        let grid: Arc<GridSpec<T>> = super::quadrature_grid(j.group, band);
        if j.re.len() != j.im.len() {
            return Err(Error::Layout("`re` and `im` differ in length".into()));
        }
        let values = j.re.iter().zip(&j.im).map(|(&a, &b)| cplx(T::lit(a), T::lit(b))).collect();
        GridField::new(grid, values)
    }
}
