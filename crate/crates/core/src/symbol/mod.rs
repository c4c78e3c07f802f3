//! Matrix-valued symbols and their quantization.
//!
//! A symbol assigns to every `(t, x, ξ)` a `d_ξ × d_ξ` matrix and acts on a
//! field by `Af(x) = Σ_ξ d_ξ Tr[ξ(x) σ(t, x, ξ) f̂(ξ)]`. For `x`-independent
//! symbols this is the coefficientwise product `f̂(ξ) ↦ σ(ξ) f̂(ξ)`.
//!
//! Symbols store `σ_K` for `K` exactly as it appears in `v_t = K(t)v + f`.

mod coefficient;
mod lie;
mod power;
mod spec;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harmonic::{
    dual_enumerate, fourier_forward, fourier_inverse, quadrature_grid, wigner_matrix, GridField, GridSpec,
    Group, RepIndex, SpectralField,
};
use crate::scalar::{cabs, creal, is_diagonal, CMatrix, Complex, Real};

pub use coefficient::{chebyshev_times, Coefficient, ScalarField, TimeProfile};
pub use lie::{bessel_weight, laplace_symbol, sublaplace_symbol, vector_field_symbol, VectorField, WeightKind};
pub use power::{fractional_power, hermitian_deviation};
pub use spec::{parse_operator, Base, MetaOverride, OperatorSpec, Registry, Term};

/// Class metadata. `order`, `rho`, `delta`, `kappa` are declared (or
/// inferred from the terms) and trusted; the flags are computed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolMeta<T> {
    pub order: T,
    pub rho: T,
    pub delta: T,
    pub kappa: u32,
    pub x_independent: bool,
    pub t_independent: bool,
    pub hermitian: bool,
    pub diagonal: bool,
}

/// Evaluator for user-supplied symbols: `(t, node, rep) ↦ σ`.
pub type CustomFn<T> = dyn Fn(T, Option<usize>, RepIndex) -> CMatrix<T> + Send + Sync;

#[derive(Debug)]
struct BuiltTerm<T: Real> {
    coef: Coefficient<T>,
    /// `None` once composed with another operator.
    base: Option<Base<T>>,
    label: String,
    /// Indexed by position in `dual_enumerate(group, band)`.
    mats: Vec<CMatrix<T>>,
}

/// Coefficient-field values of every term at the nodes of one grid.
#[derive(Debug)]
struct Sampled<T: Real> {
    grid: Arc<GridSpec<T>>,
    values: Vec<Option<Vec<Complex<T>>>>,
}

#[derive(Clone)]
enum Kind<T: Real> {
    Terms {
        terms: Arc<Vec<BuiltTerm<T>>>,
        /// Where `x` indices passed to [`Symbol::eval`] live.
        x: Option<Arc<Sampled<T>>>,
        /// Grid on which products with coefficient fields are formed exactly.
        product: Option<Arc<Sampled<T>>>,
    },
    Custom {
        f: Arc<CustomFn<T>>,
        grid: Option<Arc<GridSpec<T>>>,
    },
}

/// An evaluable symbol, precomputed per representation up to `band`.
#[derive(Clone)]
pub struct Symbol<T: Real> {
    group: Group,
    band: u32,
    meta: SymbolMeta<T>,
    kind: Kind<T>,
}

impl<T: Real> std::fmt::Debug for Symbol<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut d = f.debug_struct("Symbol");
        d.field("group", &self.group).field("band", &self.band).field("meta", &self.meta);
        if let Kind::Terms { terms, .. } = &self.kind {
            d.field("terms", &terms.iter().map(|t| t.label.as_str()).collect::<Vec<_>>());
        }
        d.finish()
    }
}

fn sample_terms<T: Real>(terms: &[BuiltTerm<T>], grid: &Arc<GridSpec<T>>) -> Result<Sampled<T>> {
    let values = terms
        .iter()
        .map(|t| t.coef.field.as_ref().map(|f| f.sample(grid)).transpose())
        .collect::<Result<_>>()?;
    Ok(Sampled { grid: grid.clone(), values })
}

/// Bound on the operator norm of a block: exact for diagonal blocks,
/// Frobenius otherwise.
fn block_norm<T: Real>(m: &CMatrix<T>) -> T {
    if is_diagonal(m) {
        (0..m.nrows()).map(|i| cabs(m[(i, i)])).fold(T::zero(), |a, b| a.max(b))
    } else {
        m.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt()
    }
}

/// Builds the symbol of `spec` for every representation up to `band`.
pub fn build_operator_symbol<T: Real>(spec: &OperatorSpec<T>, band: u32) -> Result<Symbol<T>> {
    spec.validate()?;
    let reps = dual_enumerate(spec.group, band);
    let mut terms = Vec::with_capacity(spec.terms.len());
    for term in &spec.terms {
        let mats = reps.iter().map(|&r| term.base.matrix(r)).collect::<Result<Vec<_>>>()?;
        let label = format!("{} * {}", coef_label(&term.coef), term.base);
        terms.push(BuiltTerm { coef: term.coef.clone(), base: Some(term.base), label, mats });
    }
    let field_band = spec.terms.iter().filter_map(|t| t.coef.field.as_ref()).map(|f| f.band()).max();
    let x_independent = field_band.is_none();
    let product = match field_band {
        Some(fb) => Some(Arc::new(sample_terms(&terms, &quadrature_grid(spec.group, band + fb))?)),
        None => None,
    };
    let tol = T::tol(1e-12);
    let real_fields = product.as_ref().is_none_or(|p| {
        p.values.iter().flatten().all(|v| v.iter().all(|z| z.im.abs() <= tol * (T::one() + cabs(*z))))
    });
    let hermitian = real_fields
        && terms.iter().all(|t| {
            t.mats.iter().all(|m| hermitian_deviation(&(m * t.coef.scale)) <= tol * (T::one() + block_norm(m)))
        });
    let inferred_order = spec.terms.iter().map(|t| t.base.order()).fold(None, |acc: Option<T>, o| {
        Some(acc.map_or(o, |a| a.max(o)))
    });
    let meta = SymbolMeta {
        order: spec.meta.order.or(inferred_order).unwrap_or_else(T::zero),
        rho: spec.meta.rho.unwrap_or_else(T::one),
        delta: spec.meta.delta.unwrap_or_else(T::zero),
        kappa: spec
            .meta
            .kappa
            .unwrap_or(if spec.terms.iter().any(|t| t.base.is_subelliptic()) { 2 } else { 1 }),
        x_independent,
        t_independent: spec.terms.iter().all(|t| t.coef.t_independent()),
        hermitian,
        diagonal: terms.iter().all(|t| t.mats.iter().all(is_diagonal)),
    };
    Ok(Symbol {
        group: spec.group,
        band,
        meta,
        kind: Kind::Terms { terms: Arc::new(terms), x: product.clone(), product },
    })
}

fn coef_label<T: Real>(c: &Coefficient<T>) -> String {
    let mut s = if c.scale.im == T::zero() {
        format!("{}", c.scale.re.as_f64())
    } else {
        format!("({}{:+}i)", c.scale.re.as_f64(), c.scale.im.as_f64())
    };
    if c.field.is_some() {
        s.push_str(" * a(x)");
    }
    if c.profile.is_some() {
        s.push_str(" * p(t)");
    }
    s
}

impl<T: Real> Symbol<T> {
    /// Wraps a closure. `x`-dependent closures index nodes of `grid`.
    pub fn custom(
        group: Group,
        band: u32,
        meta: SymbolMeta<T>,
        grid: Option<Arc<GridSpec<T>>>,
        f: impl Fn(T, Option<usize>, RepIndex) -> CMatrix<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !meta.x_independent && grid.is_none() {
            return Err(Error::Malformed("x-dependent custom symbol needs a grid".into()));
        }
        if let Some(g) = &grid {
            if g.group != group {
                return Err(Error::GridMismatch);
            }
        }
        Ok(Symbol { group, band, meta, kind: Kind::Custom { f: Arc::new(f), grid } })
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn band(&self) -> u32 {
        self.band
    }

    pub fn meta(&self) -> &SymbolMeta<T> {
        &self.meta
    }

    /// Overrides the declared class parameters.
    pub fn with_class(mut self, order: T, rho: T, delta: T, kappa: u32) -> Self {
        self.meta.order = order;
        self.meta.rho = rho;
        self.meta.delta = delta;
        self.meta.kappa = kappa;
        self
    }

    /// Human-readable term list (empty for custom symbols).
    pub fn labels(&self) -> Vec<String> {
        match &self.kind {
            Kind::Terms { terms, .. } => terms.iter().map(|t| t.label.clone()).collect(),
            Kind::Custom { .. } => Vec::new(),
        }
    }

    /// The grid whose node indices [`Symbol::eval`] accepts, if `x`-dependent.
    pub fn x_grid(&self) -> Option<&Arc<GridSpec<T>>> {
        match &self.kind {
            Kind::Terms { x, .. } => x.as_ref().map(|s| &s.grid),
            Kind::Custom { grid, .. } => grid.as_ref().filter(|_| !self.meta.x_independent),
        }
    }

    /// Same symbol with `x` indices referring to nodes of `grid`.
    pub fn on_grid(&self, grid: &Arc<GridSpec<T>>) -> Result<Self> {
        if grid.group != self.group {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        match &mut out.kind {
            Kind::Terms { terms, x, .. } => {
                if !self.meta.x_independent {
                    *x = Some(Arc::new(sample_terms(terms, grid)?));
                }
            }
            Kind::Custom { grid: g, .. } => {
                if !self.meta.x_independent && !g.as_ref().is_some_and(|g| g.same_layout(grid)) {
                    return Err(Error::GridMismatch);
                }
            }
        }
        Ok(out)
    }

    fn position(&self, rep: RepIndex) -> Result<usize> {
        if rep.group != self.group {
            return Err(Error::WrongGroup { expected: self.group, found: rep.group });
        }
        rep.position(self.band).ok_or(Error::Bandlimit {
            requested: rep.two_ell.max(rep.k.unsigned_abs()),
            available: self.band,
        })
    }

    /// `σ(t, x, ξ)`; `x` is a node of [`Symbol::x_grid`] and is ignored by
    /// `x`-independent symbols.
    pub fn eval(&self, t: T, x: Option<usize>, rep: RepIndex) -> Result<CMatrix<T>> {
        let pos = self.position(rep)?;
        match &self.kind {
            Kind::Terms { terms, x: samples, .. } => {
                let mut out = CMatrix::zeros(rep.dim(), rep.dim());
                for (i, term) in terms.iter().enumerate() {
                    let mut c = term.coef.time_factor(t);
                    if let Some(vals) = samples.as_ref().and_then(|s| s.values[i].as_ref()) {
                        let node = x.ok_or(Error::XDependent)?;
                        c *= *vals.get(node).ok_or_else(|| Error::Range(format!("grid node {node}")))?;
                    }
                    out += &term.mats[pos] * c;
                }
                Ok(out)
            }
            Kind::Custom { f, grid } => {
                if self.meta.x_independent {
                    return Ok(f(t, None, rep));
                }
                let node = x.ok_or(Error::XDependent)?;
                if grid.as_ref().is_some_and(|g| node >= g.node_count()) {
                    return Err(Error::Range(format!("grid node {node}")));
                }
                Ok(f(t, Some(node), rep))
            }
        }
    }

    /// `σ(t, ξ)` for every representation up to the band.
    pub fn invariant_blocks(&self, t: T) -> Result<Vec<CMatrix<T>>> {
        if !self.meta.x_independent {
            return Err(Error::XDependent);
        }
        dual_enumerate(self.group, self.band).into_iter().map(|r| self.eval(t, None, r)).collect()
    }

    /// Blocks with every coefficient field replaced by its mean; a
    /// per-mode approximation used for preconditioning.
    pub fn mean_blocks(&self, t: T) -> Result<Vec<CMatrix<T>>> {
        let reps = dual_enumerate(self.group, self.band);
        match &self.kind {
            Kind::Terms { terms, .. } => Ok(reps
                .iter()
                .enumerate()
                .map(|(pos, r)| {
                    let mut out = CMatrix::zeros(r.dim(), r.dim());
                    for term in terms.iter() {
                        let mut c = term.coef.time_factor(t);
                        if let Some(f) = &term.coef.field {
                            c *= f.mean();
                        }
                        out += &term.mats[pos] * c;
                    }
                    out
                })
                .collect()),
            Kind::Custom { f, grid } => {
                if self.meta.x_independent {
                    return Ok(reps.iter().map(|&r| f(t, None, r)).collect());
                }
                let g = grid.as_ref().expect("x-dependent custom symbols carry a grid");
                Ok(reps
                    .iter()
                    .map(|&r| {
                        let mut out = CMatrix::zeros(r.dim(), r.dim());
                        for n in 0..g.node_count() {
                            out += f(t, Some(n), r) * creal(g.weight(n));
                        }
                        out
                    })
                    .collect())
            }
        }
    }

    /// Upper bound on the operator norm of `K(t)` restricted to the band.
    pub fn norm_bound(&self, t: T) -> Result<T> {
        match &self.kind {
            Kind::Terms { terms, product, .. } => {
                let mut total = T::zero();
                for (i, term) in terms.iter().enumerate() {
                    let mut c = cabs(term.coef.time_factor(t));
                    if let Some(vals) = product.as_ref().and_then(|p| p.values[i].as_ref()) {
                        c *= vals.iter().map(|z| cabs(*z)).fold(T::zero(), |a, b| a.max(b));
                    }
                    total += c * term.mats.iter().map(block_norm).fold(T::zero(), |a, b| a.max(b));
                }
                Ok(total)
            }
            Kind::Custom { .. } => {
                let nodes = self.x_grid().map_or(1, |g| g.node_count());
                let mut worst = T::zero();
                for r in dual_enumerate(self.group, self.band) {
                    for n in 0..nodes {
                        let x = (!self.meta.x_independent).then_some(n);
                        worst = worst.max(block_norm(&self.eval(t, x, r)?));
                    }
                }
                Ok(worst)
            }
        }
    }

    /// `c · σ`.
    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        out.kind = match &self.kind {
            Kind::Terms { terms, x, product } => {
                let terms = terms
                    .iter()
                    .map(|t| BuiltTerm {
                        coef: Coefficient { scale: t.coef.scale * c, ..t.coef.clone() },
                        base: t.base,
                        label: format!("{} * ({})", c.as_f64(), t.label),
                        mats: t.mats.clone(),
                    })
                    .collect();
                Kind::Terms { terms: Arc::new(terms), x: x.clone(), product: product.clone() }
            }
            Kind::Custom { f, grid } => {
                let f = f.clone();
                Kind::Custom { f: Arc::new(move |t, x, r| f(t, x, r) * creal(c)), grid: grid.clone() }
            }
        };
        out
    }

    /// Symbol of `K ∘ B` for an invariant base `B`: every block is
    /// right-multiplied by `σ_B(ξ)`, and the order grows by that of `B`.
    pub fn compose_right(&self, base: &Base<T>) -> Result<Self> {
        base.validate(self.group)?;
        let reps = dual_enumerate(self.group, self.band);
        let right = reps.iter().map(|&r| base.matrix(r)).collect::<Result<Vec<_>>>()?;
        let mut out = self.clone();
        out.meta.order += base.order();
        out.meta.diagonal = self.meta.diagonal && right.iter().all(is_diagonal);
        out.meta.hermitian = false;
        out.kind = match &self.kind {
            Kind::Terms { terms, x, product } => {
                let terms = terms
                    .iter()
                    .map(|t| BuiltTerm {
                        coef: t.coef.clone(),
                        base: None,
                        label: format!("{} * {}", t.label, base),
                        mats: t.mats.iter().zip(&right).map(|(m, w)| m * w).collect(),
                    })
                    .collect();
                Kind::Terms { terms: Arc::new(terms), x: x.clone(), product: product.clone() }
            }
            Kind::Custom { f, grid } => {
                let (f, band) = (f.clone(), self.band);
                let right = Arc::new(right);
                Kind::Custom {
                    f: Arc::new(move |t, x, r| {
                        let w = &right[r.position(band).expect("rep within band")];
                        f(t, x, r) * w
                    }),
                    grid: grid.clone(),
                }
            }
        };
        if out.meta.diagonal || out.meta.x_independent {
            let blocks = reps.iter().map(|&r| out.eval(T::zero(), None, r)).collect::<Result<Vec<_>>>();
            if let Ok(blocks) = blocks {
                out.meta.hermitian = out.meta.t_independent
                    && blocks.iter().all(|m| hermitian_deviation(m) <= T::tol(1e-12) * (T::one() + block_norm(m)));
            }
        }
        Ok(out)
    }

    pub(crate) fn is_custom(&self) -> bool {
        matches!(self.kind, Kind::Custom { .. })
    }

    /// Largest bandlimit among the coefficient fields.
    pub(crate) fn coefficient_band(&self) -> Option<u32> {
        match &self.kind {
            Kind::Terms { terms, .. } => terms.iter().filter_map(|t| t.coef.field.as_ref()).map(|f| f.band()).max(),
            Kind::Custom { grid, .. } => grid.as_ref().map(|g| g.band),
        }
    }

    /// `(base, a(t, x))` per term, when every term still has a closed-form base.
    pub(crate) fn term_values(&self, t: T, x: Option<usize>) -> Option<Vec<(Base<T>, Complex<T>)>> {
        let Kind::Terms { terms, x: samples, .. } = &self.kind else { return None };
        terms
            .iter()
            .enumerate()
            .map(|(i, term)| {
                let mut c = term.coef.time_factor(t);
                if let Some(vals) = samples.as_ref().and_then(|s| s.values[i].as_ref()) {
                    c *= vals[x?];
                }
                Some((term.base?, c))
            })
            .collect()
    }

    /// Diagonal of `σ(t, x, ξ)`, without forming the full block when the
    /// symbol is diagonal.
    pub(crate) fn eval_diagonal(&self, t: T, x: Option<usize>, rep: RepIndex) -> Result<Vec<Complex<T>>> {
        if let (true, Kind::Terms { terms, x: samples, .. }) = (self.meta.diagonal, &self.kind) {
            let pos = self.position(rep)?;
            let mut out = vec![creal(T::zero()); rep.dim()];
            for (i, term) in terms.iter().enumerate() {
                let mut c = term.coef.time_factor(t);
                if let Some(vals) = samples.as_ref().and_then(|s| s.values[i].as_ref()) {
                    c *= vals[x.ok_or(Error::XDependent)?];
                }
                for (a, o) in out.iter_mut().enumerate() {
                    *o += term.mats[pos][(a, a)] * c;
                }
            }
            return Ok(out);
        }
        let m = self.eval(t, x, rep)?;
        Ok((0..rep.dim()).map(|a| m[(a, a)]).collect())
    }

    fn check_field(&self, f: &SpectralField<T>) -> Result<()> {
        if f.group != self.group {
            return Err(Error::WrongGroup { expected: self.group, found: f.group });
        }
        if f.band > self.band {
            return Err(Error::Bandlimit { requested: f.band, available: self.band });
        }
        Ok(())
    }

    /// Galerkin action `P_band(K(t) F)`, with `band = F.band`.
    ///
    /// Coefficient fields multiply on a grid fine enough that the product
    /// and its projection are computed without aliasing. Custom
    /// `x`-dependent symbols go through pointwise quantization on their own
    /// grid, so that path is only as exact as that grid.
    pub fn apply_spectral(&self, t: T, f: &SpectralField<T>) -> Result<SpectralField<T>> {
        self.check_field(f)?;
        if self.meta.x_independent {
            return invariant_apply(self, t, f);
        }
        match &self.kind {
            Kind::Terms { terms, product, .. } => {
                let product = product.as_ref().expect("x-dependent symbols carry a product grid");
                let reps = f.reps();
                let pos: Vec<usize> = reps.iter().map(|&r| self.position(r)).collect::<Result<_>>()?;
                let mut out = SpectralField::zeros(f.group, f.band);
                for (k, r) in reps.iter().enumerate() {
                    let mut m = CMatrix::zeros(r.dim(), r.dim());
                    for term in terms.iter().filter(|t| t.coef.field.is_none()) {
                        m += &term.mats[pos[k]] * term.coef.time_factor(t);
                    }
                    out.coeffs[k] = m * &f.coeffs[k];
                }
                let mut acc = vec![creal(T::zero()); product.grid.node_count()];
                let mut done = vec![false; terms.len()];
                for i in 0..terms.len() {
                    let Some(field) = &terms[i].coef.field else { continue };
                    if done[i] {
                        continue;
                    }
                    // terms sharing a coefficient field share one transform
                    let group: Vec<usize> = (i..terms.len())
                        .filter(|&j| terms[j].coef.field.as_ref().is_some_and(|g| Arc::ptr_eq(g, field)))
                        .collect();
                    let g = SpectralField::from_fn(f.group, f.band, |r| {
                        let k = r.position(f.band).expect("rep from own enumeration");
                        let mut m = CMatrix::zeros(r.dim(), r.dim());
                        for &j in &group {
                            m += &terms[j].mats[pos[k]] * terms[j].coef.time_factor(t);
                        }
                        m * &f.coeffs[k]
                    });
                    let vals = fourier_inverse(&g, &product.grid)?;
                    let a = product.values[i].as_ref().expect("sampled field");
                    for ((acc, v), a) in acc.iter_mut().zip(&vals.values).zip(a) {
                        *acc += *v * *a;
                    }
                    for j in group {
                        done[j] = true;
                    }
                }
                let back = fourier_forward(&GridField::new(product.grid.clone(), acc)?, f.band)?;
                out.axpy(creal(T::one()), &back);
                Ok(out)
            }
            Kind::Custom { grid, .. } => {
                let grid = grid.as_ref().expect("x-dependent custom symbols carry a grid");
                let g = fourier_inverse(f, grid)?;
                fourier_forward(&quantize_apply(self, t, &g)?, f.band)
            }
        }
    }
}

/// `F(ξ) ↦ σ(t, ξ) F(ξ)` for an `x`-independent symbol.
pub fn invariant_apply<T: Real>(sym: &Symbol<T>, t: T, f: &SpectralField<T>) -> Result<SpectralField<T>> {
    if !sym.meta.x_independent {
        return Err(Error::XDependent);
    }
    sym.check_field(f)?;
    let mut out = f.clone();
    for (r, m) in f.reps().into_iter().zip(out.coeffs.iter_mut()) {
        *m = sym.eval(t, None, r)? * &*m;
    }
    Ok(out)
}

/// Pointwise quantization `Af(x) = Σ d_ξ Tr[ξ(x) σ(t, x, ξ) f̂(ξ)]` at the
/// nodes of `f`'s grid, with `f̂` taken at the grid's bandlimit.
pub fn quantize_apply<T: Real>(sym: &Symbol<T>, t: T, f: &GridField<T>) -> Result<GridField<T>> {
    let grid = &f.grid;
    if grid.group != sym.group {
        return Err(Error::GridMismatch);
    }
    if grid.band > sym.band {
        return Err(Error::Bandlimit { requested: grid.band, available: sym.band });
    }
    let hat = fourier_forward(f, grid.band)?;
    if sym.meta.x_independent {
        return fourier_inverse(&invariant_apply(sym, t, &hat)?, grid);
    }
    match &sym.kind {
        Kind::Terms { terms, .. } => {
            let mut out = vec![creal(T::zero()); grid.node_count()];
            for term in terms.iter() {
                let c = term.coef.time_factor(t);
                let g = SpectralField::from_fn(hat.group, hat.band, |r| {
                    let k = r.position(hat.band).expect("rep from own enumeration");
                    let pos = r.position(sym.band).expect("band checked");
                    &term.mats[pos] * &hat.coeffs[k] * c
                });
                let vals = fourier_inverse(&g, grid)?.values;
                match &term.coef.field {
                    None => out.iter_mut().zip(vals).for_each(|(o, v)| *o += v),
                    Some(field) => {
                        let a = field.sample(grid)?;
                        out.iter_mut().zip(vals).zip(a).for_each(|((o, v), a)| *o += v * a);
                    }
                }
            }
            GridField::new(grid.clone(), out)
        }
        Kind::Custom { f: sigma, grid: own } => {
            if !own.as_ref().is_some_and(|g| g.same_layout(grid)) {
                return Err(Error::GridMismatch);
            }
            let reps = hat.reps();
            let values = (0..grid.node_count())
                .map(|n| {
                    let angles = grid.angles(n);
                    let mut acc = creal(T::zero());
                    for (r, fh) in reps.iter().zip(&hat.coeffs) {
                        let s = sigma(t, Some(n), *r) * fh;
                        acc += match r.group {
                            Group::Torus => s[(0, 0)] * crate::scalar::cis(T::lit(r.k as f64) * angles.0),
                            Group::Su2 => (wigner_matrix(*r, angles)? * s).trace() * T::lit(r.dim() as f64),
                        };
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<_>>>()?;
            GridField::new(grid.clone(), values)
        }
    }
}

#[cfg(test)]
mod tests;
