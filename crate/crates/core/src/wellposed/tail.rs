//! Large-ℓ behaviour of diagonal symbols assembled from Laplacian powers,
//! Bessel potentials, constants and the X₃ drift.
//!
//! For such a symbol the smallest diagonal entry of `-Re σ` at spin ℓ is
//!
//! ```text
//! H(ℓ) = Σ α (ℓ² + ℓ)^{m/2} + Σ α' (1 + ℓ² + ℓ)^{s/2} - |β| ℓ + γ
//! ```
//!
//! (on the circle `ℓ = |k|` and the inner polynomials are `k²`, `1 + k²`),
//! whose expansion in powers of ℓ decides the sign beyond any finite scan.

use crate::harmonic::{Group, RepIndex};
use crate::scalar::{Complex, Real};
use crate::symbol::{Base, VectorField};

const ORDERS: usize = 8;

#[derive(Clone, Debug)]
pub(crate) struct Family {
    group: Group,
    /// `(α, m)` for `α (ℓ² + ℓ)^{m/2}`
    laplace: Vec<(f64, f64)>,
    /// `(α', s)` for `α' (1 + ℓ² + ℓ)^{s/2}`
    bessel: Vec<(f64, f64)>,
    beta: f64,
    gamma: f64,
}

impl Family {
    /// Recognizes `-Re σ` for a list of `(base, coefficient)` terms.
    pub(crate) fn from_terms<T: Real>(group: Group, terms: &[(Base<T>, Complex<T>)]) -> Option<Family> {
        let mut fam = Family { group, laplace: vec![], bessel: vec![], beta: 0.0, gamma: 0.0 };
        for (base, c) in terms {
            let (re, im) = (c.re.as_f64(), c.im.as_f64());
            match *base {
                Base::LaplaceFrac(m) => fam.laplace.push((-re, m.as_f64())),
                Base::BesselFrac(s) => fam.bessel.push((-re, s.as_f64())),
                Base::Identity => fam.gamma -= re,
                Base::VectorField(VectorField::IX3 | VectorField::D0) => fam.beta -= re,
                // σ(X₃) = -i diag(j)
                Base::VectorField(VectorField::X3) => fam.beta -= im,
                _ => return None,
            }
        }
        Some(fam)
    }

    fn ell(&self, n: u64) -> f64 {
        match self.group {
            Group::Su2 => n as f64 / 2.0,
            Group::Torus => n as f64,
        }
    }

    /// Representation index `n` (`two_ell` or `|k|`) as a [`RepIndex`].
    pub(crate) fn rep(&self, n: u64) -> Option<RepIndex> {
        let n = u32::try_from(n).ok()?;
        Some(match self.group {
            Group::Su2 => RepIndex::su2(n),
            Group::Torus => RepIndex::torus(i32::try_from(n).ok()?),
        })
    }

    /// `⟨ξ⟩^m = (1 + λ)^{m/2}` at index `n`.
    pub(crate) fn weight_pow(&self, n: u64, m: f64) -> f64 {
        let l = self.ell(n);
        match self.group {
            Group::Su2 => (1.0 + l * l + l).powf(m / 2.0),
            Group::Torus => (1.0 + l * l).powf(m / 2.0),
        }
    }

    /// Smallest diagonal entry at index `n` and the slot holding it.
    pub(crate) fn min_entry(&self, n: u64) -> (f64, usize) {
        let l = self.ell(n);
        let (inner, shifted) = match self.group {
            Group::Su2 => (l * l + l, 1.0 + l * l + l),
            Group::Torus => (l * l, 1.0 + l * l),
        };
        let pow0 = |x: f64, p: f64| if p == 0.0 { 1.0 } else { x.powf(p) };
        let mut h = self.gamma - self.beta.abs() * l;
        for &(a, m) in &self.laplace {
            h += a * pow0(inner, m / 2.0);
        }
        for &(a, s) in &self.bessel {
            h += a * shifted.powf(s / 2.0);
        }
        // β j is smallest at j = -ℓ when β > 0, at j = +ℓ when β < 0
        let slot = if self.group == Group::Su2 && self.beta < 0.0 { n as usize } else { 0 };
        (h, slot)
    }

    /// `(exponent, coefficient)` of the leading nonzero term of `H(ℓ)` as
    /// ℓ → ∞, or `None` if the expansion vanishes to the orders computed.
    pub(crate) fn leading(&self) -> Option<(f64, f64)> {
        let (b, c) = match self.group {
            Group::Su2 => (1.0, 1.0),
            Group::Torus => (0.0, 1.0),
        };
        let mut mono: Vec<(f64, f64)> = vec![(1.0, -self.beta.abs()), (0.0, self.gamma)];
        for &(a, m) in &self.laplace {
            if m == 0.0 {
                mono.push((0.0, a));
            } else {
                for (k, h) in series_power(b, 0.0, m / 2.0).into_iter().enumerate() {
                    mono.push((m - k as f64, a * h));
                }
            }
        }
        for &(a, s) in &self.bessel {
            for (k, h) in series_power(b, c, s / 2.0).into_iter().enumerate() {
                mono.push((s - k as f64, a * h));
            }
        }
        mono.sort_by(|x, y| y.0.total_cmp(&x.0));
        let scale = mono.iter().map(|m| m.1.abs()).fold(0.0, f64::max);
        let mut i = 0;
        while i < mono.len() {
            let e = mono[i].0;
            let mut sum = 0.0;
            while i < mono.len() && (mono[i].0 - e).abs() < 1e-9 {
                sum += mono[i].1;
                i += 1;
            }
            if sum.abs() > 1e-12 * scale.max(1e-300) && scale > 0.0 {
                return Some((e, sum));
            }
        }
        None
    }

    /// Whether every coefficient vanishes, so `H ≡ 0`.
    pub(crate) fn is_zero(&self) -> bool {
        self.beta == 0.0
            && self.gamma == 0.0
            && self.laplace.iter().all(|t| t.0 == 0.0)
            && self.bessel.iter().all(|t| t.0 == 0.0)
    }
}

/// Taylor coefficients of `(1 + bε + cε²)^p` up to `ε^{ORDERS-1}`.
fn series_power(b: f64, c: f64, p: f64) -> Vec<f64> {
    let g = [1.0, b, c];
    let mut h = vec![1.0];
    for n in 1..ORDERS {
        let mut acc = 0.0;
        for k in 1..=n.min(2) {
            acc += ((p + 1.0) * k as f64 - n as f64) * g[k] * h[n - k];
        }
        h.push(acc / n as f64);
    }
    h
}

/// Indices `n > from` visited by the extended scan: dense up to `16·from`
/// (at least 10⁴), then geometric up to 2⁴⁰.
pub(crate) fn extended_indices(from: u64) -> impl Iterator<Item = u64> {
    let dense_end = (16 * from).max(10_000);
    let dense = (from + 1)..=dense_end;
    let sparse = std::iter::successors(Some(dense_end), |&n| {
        let next = n + (n / 32).max(1);
        (next <= 1 << 40).then_some(next)
    })
    .skip(1);
    dense.chain(sparse)
}
