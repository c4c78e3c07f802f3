//! Executable well-posedness hypotheses: symbol positivity, strong
//! ellipticity, the sharp Gårding order window, the SU(2) drift criterion,
//! and the resulting Case I / Case II classification.
//!
//! Every check scans `-Re σ_K` over sampled times, grid nodes and
//! representations. For diagonal symbols built from Laplacian powers, Bessel
//! potentials, constants and the X₃ drift, an asymptotic expansion in ℓ
//! extends the verdict past the scanned band; anything else is reported as
//! scan-limited.

mod tail;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{dual_enumerate, quadrature_grid, Group, RepIndex};
use crate::scalar::{creal, CMatrix, Real};
use crate::symbol::{bessel_weight, chebyshev_times, Coefficient, Symbol, WeightKind};

use tail::{extended_indices, Family};

/// Eigenvalues above `-EIG_TOL` count as nonnegative.
pub const EIG_TOL: f64 = 1e-10;

/// `(M + M*) / 2`, Hermitian to the last bit.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let n = m.nrows();
    let half = T::lit(0.5);
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            creal(m[(i, i)].re)
        } else if i < j {
            (m[(i, j)] + m[(j, i)].conj()) * half
        } else {
            (m[(j, i)] + m[(i, j)].conj()).conj() * half
        }
    })
}

/// Where a scan was extremal. `two_ell` is `2ℓ` on SU(2) and `|k|` on the
/// circle, where `k` is also given.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub t: f64,
    pub x_node: Option<usize>,
    pub two_ell: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i32>,
    pub slot: usize,
    pub eig: f64,
    /// Found by the asymptotic extension rather than the finite scan.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub beyond_scan: bool,
}

impl Witness {
    pub fn rep(&self) -> RepIndex {
        match self.k {
            Some(k) => RepIndex::torus(k),
            None => RepIndex::su2(self.two_ell),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StronglyElliptic,
    Positive,
    Failed,
}

/// How far the verdict extends past the scanned band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// The asymptotic expansion confirms the verdict for every ℓ.
    Conclusive,
    /// The expansion shows failure beyond the scanned band.
    Violated,
    /// The symbol is outside the analysable family.
    ScanLimited,
    /// The finite scan already failed.
    NotNeeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Scanned {
    pub band: u32,
    pub time_samples: usize,
    pub spatial_nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EllipticityReport {
    pub verdict: Verdict,
    /// Ellipticity constant, or the smallest eigenvalue for positivity.
    #[serde(rename = "C")]
    pub c: f64,
    /// First failing representation (lowest `two_ell`), at its worst sample.
    pub witness: Option<Witness>,
    /// Global minimum over the scan.
    pub minimum: Option<Witness>,
    pub scanned: Scanned,
    pub tail: Tail,
    /// The same check with low-frequency slots excluded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub low_frequency: Option<Box<EllipticityReport>>,
}

impl EllipticityReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Failed
    }
}

/// Scan set for the checks.
#[derive(Clone, Debug)]
pub struct ScanOptions<T> {
    /// Largest `two_ell` (or `|k|`) scanned; the symbol must reach it.
    pub band: u32,
    pub times: Vec<T>,
    /// Bandlimit of the spatial sampling grid for `x`-dependent symbols.
    pub x_band: Option<u32>,
    /// Extend positivity and ellipticity verdicts past `band` when possible.
    pub tail: bool,
    /// Slots with weight below this are skipped by the low-frequency
    /// ellipticity check.
    pub low_freq_weight: T,
}

impl<T: Real> ScanOptions<T> {
    /// 17 Chebyshev times on `[0, horizon]`.
    pub fn new(band: u32, horizon: T) -> Self {
        ScanOptions {
            band,
            times: chebyshev_times(horizon, 17),
            x_band: None,
            tail: true,
            low_freq_weight: T::lit(2f64.sqrt()),
        }
    }
}

impl<T: Real> Default for ScanOptions<T> {
    fn default() -> Self {
        Self::new(100, T::one())
    }
}

/// Point of a scan: value, time index, node, slot.
#[derive(Clone, Copy, Debug)]
struct Hit {
    value: f64,
    t_idx: usize,
    node: Option<usize>,
    slot: usize,
}

enum Block<T: Real> {
    /// Real diagonal of `-Re σ` for diagonal symbols.
    Diag(Vec<f64>),
    /// `hermitian_part(-σ)`.
    Full(CMatrix<T>),
}

struct Samples<T: Real> {
    sym: Symbol<T>,
    times: Vec<(usize, T)>,
    nodes: Vec<Option<usize>>,
}

fn samples<T: Real>(sym: &Symbol<T>, opts: &ScanOptions<T>) -> Result<Samples<T>> {
    if opts.band > sym.band() {
        return Err(Error::Bandlimit { requested: opts.band, available: sym.band() });
    }
    let times: Vec<(usize, T)> = if sym.meta().t_independent || opts.times.is_empty() {
        vec![(0, opts.times.first().copied().unwrap_or_else(T::zero))]
    } else {
        opts.times.iter().copied().enumerate().collect()
    };
    if sym.meta().x_independent {
        return Ok(Samples { sym: sym.clone(), times, nodes: vec![None] });
    }
    let (sym, count) = match sym.x_grid() {
        Some(g) if sym.is_custom() => (sym.clone(), g.node_count()),
        _ => {
            let band = opts.x_band.unwrap_or_else(|| (2 * sym.coefficient_band().unwrap_or(1)).clamp(2, 6));
            let grid = quadrature_grid(sym.group(), band);
            let count = grid.node_count();
            (sym.on_grid(&grid)?, count)
        }
    };
    Ok(Samples { sym, times, nodes: (0..count).map(Some).collect() })
}

/// Representations up to `band`, lowest first (`|k|` then `k` on the circle).
fn scan_reps(group: Group, band: u32) -> Vec<RepIndex> {
    let mut reps = dual_enumerate(group, band);
    reps.sort_by_key(|r| (r.two_ell, r.k.unsigned_abs(), r.k));
    reps
}

fn block<T: Real>(sym: &Symbol<T>, t: T, x: Option<usize>, rep: RepIndex) -> Result<Block<T>> {
    if sym.meta().diagonal {
        let d = sym.eval_diagonal(t, x, rep)?;
        Ok(Block::Diag(d.iter().map(|z| -z.re.as_f64()).collect()))
    } else {
        Ok(Block::Full(hermitian_part(&(-sym.eval(t, x, rep)?))))
    }
}

/// Smallest eigenvalue and the slot where its eigenvector peaks.
fn min_eig<T: Real>(h: &CMatrix<T>) -> (f64, usize) {
    let eig = h.clone().symmetric_eigen();
    let (i, v) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v.as_f64() < bv { (i, v.as_f64()) } else { (bi, bv) });
    let col = eig.eigenvectors.column(i);
    let slot = (0..col.len()).fold(0, |b, a| if col[a].norm_sqr() > col[b].norm_sqr() { a } else { b });
    (v, slot)
}

/// Minimum of `f(rep, block)` per representation over all samples, with
/// ties going to the earliest time, then the lowest node.
fn scan<T: Real>(
    s: &Samples<T>,
    reps: &[RepIndex],
    f: impl Fn(RepIndex, Block<T>) -> Option<(f64, usize)> + Sync,
) -> Result<Vec<Option<Hit>>> {
    reps.par_iter()
        .map(|&rep| {
            let mut best: Option<Hit> = None;
            for &(t_idx, t) in &s.times {
                for &node in &s.nodes {
                    if let Some((value, slot)) = f(rep, block(&s.sym, t, node, rep)?) {
                        if best.is_none_or(|b| value < b.value) {
                            best = Some(Hit { value, t_idx, node, slot });
                        }
                    }
                }
            }
            Ok(best)
        })
        .collect()
}

fn witness<T: Real>(s: &Samples<T>, rep: RepIndex, hit: Hit, beyond_scan: bool) -> Witness {
    Witness {
        t: s.times.iter().find(|p| p.0 == hit.t_idx).map_or(0.0, |p| p.1.as_f64()),
        x_node: hit.node,
        two_ell: if rep.group == Group::Su2 { rep.two_ell } else { rep.k.unsigned_abs() },
        k: (rep.group == Group::Torus).then_some(rep.k),
        slot: hit.slot,
        eig: hit.value,
        beyond_scan,
    }
}

fn scanned<T: Real>(s: &Samples<T>, band: u32) -> Scanned {
    Scanned { band, time_samples: s.times.len(), spatial_nodes: s.nodes.len() }
}

/// Extremes of a per-representation scan: first rep below `-EIG_TOL` and
/// the global minimum.
fn summarize<T: Real>(s: &Samples<T>, reps: &[RepIndex], hits: &[Option<Hit>]) -> (Option<Witness>, Option<Witness>) {
    let mut first = None;
    let mut min: Option<(RepIndex, Hit)> = None;
    for (&rep, hit) in reps.iter().zip(hits) {
        let Some(hit) = *hit else { continue };
        if first.is_none() && hit.value < -EIG_TOL {
            first = Some(witness(s, rep, hit, false));
        }
        if min.is_none_or(|(_, m)| hit.value < m.value) {
            min = Some((rep, hit));
        }
    }
    (first, min.map(|(r, h)| witness(s, r, h, false)))
}

/// Runs `probe` for each sample's recognized family; `None` if some sample
/// is outside the family.
fn families<T: Real>(s: &Samples<T>) -> Option<Vec<(usize, Option<usize>, Family)>> {
    let mut out = Vec::new();
    for &(t_idx, t) in &s.times {
        for &node in &s.nodes {
            let terms = s.sym.term_values(t, node)?;
            out.push((t_idx, node, Family::from_terms(s.sym.group(), &terms)?));
        }
    }
    Some(out)
}

/// Checks `hermitian_part(-σ_K(t, x, ξ)) ≥ 0` over the scan set.
pub fn positivity_check<T: Real>(sym: &Symbol<T>, opts: &ScanOptions<T>) -> Result<EllipticityReport> {
    let s = samples(sym, opts)?;
    let reps = scan_reps(sym.group(), opts.band);
    let hits = scan(&s, &reps, |_, b| {
        Some(match b {
            Block::Diag(d) => d
                .iter()
                .enumerate()
                .fold((f64::INFINITY, 0), |(bv, bs), (a, &v)| if v < bv { (v, a) } else { (bv, bs) }),
            Block::Full(h) => min_eig(&h),
        })
    })?;
    let (first, minimum) = summarize(&s, &reps, &hits);
    let c = minimum.as_ref().map_or(0.0, |w| w.eig);
    let mut report = EllipticityReport {
        verdict: if first.is_some() { Verdict::Failed } else { Verdict::Positive },
        c,
        witness: first,
        minimum,
        scanned: scanned(&s, opts.band),
        tail: Tail::NotNeeded,
        low_frequency: None,
    };
    if report.verdict == Verdict::Failed || !opts.tail {
        if report.verdict != Verdict::Failed {
            report.tail = Tail::ScanLimited;
        }
        return Ok(report);
    }
    let Some(fams) = families(&s) else {
        report.tail = Tail::ScanLimited;
        return Ok(report);
    };
    let mut found: Option<Witness> = None;
    let mut limited = false;
    for (t_idx, node, fam) in &fams {
        if fam.is_zero() {
            continue;
        }
        if fam.leading().is_none() {
            limited = true;
            continue;
        }
        let start = opts.band as u64;
        for n in extended_indices(start) {
            if found.as_ref().is_some_and(|w| n >= w.two_ell as u64) {
                break;
            }
            let (value, slot) = fam.min_entry(n);
            if value < -EIG_TOL {
                if let Some(rep) = fam.rep(n) {
                    let hit = Hit { value, t_idx: *t_idx, node: *node, slot };
                    found = Some(witness(&s, rep, hit, true));
                }
                break;
            }
        }
        if found.is_none() && fam.leading().is_some_and(|(_, a)| a < 0.0) {
            // eventually negative, but not before 2⁴⁰
            limited = true;
        }
    }
    if let Some(w) = found {
        report.verdict = Verdict::Failed;
        report.c = report.c.min(w.eig);
        report.witness = Some(w);
        report.tail = Tail::Violated;
    } else {
        report.tail = if limited { Tail::ScanLimited } else { Tail::Conclusive };
    }
    Ok(report)
}

/// Largest `C` with `W^{-m/2} hermitian_part(-σ_K) W^{-m/2} ≥ C` over the
/// scan, `W` the elliptic or subelliptic weight and `m` the declared order.
///
/// The main report is strict; `low_frequency` repeats the check without
/// slots whose weight is below `opts.low_freq_weight`.
pub fn strong_ellipticity_constant<T: Real>(
    sym: &Symbol<T>,
    opts: &ScanOptions<T>,
    kind: WeightKind,
) -> Result<EllipticityReport> {
    let mut strict = ellipticity_scan(sym, opts, kind, None)?;
    let low = ellipticity_scan(sym, opts, kind, Some(opts.low_freq_weight))?;
    strict.low_frequency = Some(Box::new(low));
    Ok(strict)
}

fn ellipticity_scan<T: Real>(
    sym: &Symbol<T>,
    opts: &ScanOptions<T>,
    kind: WeightKind,
    min_weight: Option<T>,
) -> Result<EllipticityReport> {
    let s = samples(sym, opts)?;
    let reps = scan_reps(sym.group(), opts.band);
    let m = sym.meta().order;
    let floor = min_weight.map_or(f64::NEG_INFINITY, |w| w.as_f64());
    let hits = scan(&s, &reps, |rep, b| {
        let diag = |s: T| {
            let w = bessel_weight::<T>(rep, s, kind);
            (0..rep.dim()).map(|a| w[(a, a)].re.as_f64()).collect::<Vec<f64>>()
        };
        let (w, wm) = (diag(T::one()), diag(m));
        let keep: Vec<usize> = (0..rep.dim()).filter(|&a| w[a] >= floor).collect();
        if keep.is_empty() {
            return None;
        }
        let scale = |a: usize| wm[a].sqrt().recip();
        Some(match b {
            Block::Diag(d) => keep
                .iter()
                .map(|&a| (d[a] / wm[a], a))
                .fold((f64::INFINITY, 0), |best, x| if x.0 < best.0 { x } else { best }),
            Block::Full(h) => {
                let sub = CMatrix::from_fn(keep.len(), keep.len(), |i, j| {
                    h[(keep[i], keep[j])] * T::lit(scale(keep[i]) * scale(keep[j]))
                });
                let (v, i) = min_eig(&sub);
                (v, keep[i])
            }
        })
    })?;
    let (_, minimum) = summarize(&s, &reps, &hits);
    let mut c = minimum.as_ref().map_or(f64::INFINITY, |w| w.eig);
    let mut tail = Tail::ScanLimited;
    if opts.tail && kind == WeightKind::Elliptic {
        if let Some(fams) = families(&s) {
            tail = Tail::Conclusive;
            let md = m.as_f64();
            for (_, _, fam) in &fams {
                match fam.leading() {
                    // ratio H(ℓ) / ⟨ξ⟩^m tends to a positive limit (or ∞)
                    Some((e, a)) if a > 0.0 && e >= md - 1e-12 => {
                        for n in extended_indices(opts.band as u64) {
                            c = c.min(fam.min_entry(n).0 / fam.weight_pow(n, md));
                        }
                        if (e - md).abs() < 1e-12 {
                            c = c.min(a);
                        }
                    }
                    _ if fam.is_zero() => c = c.min(0.0),
                    _ => {
                        tail = Tail::Violated;
                        c = c.min(0.0);
                    }
                }
            }
        }
    }
    let ok = c > EIG_TOL && tail != Tail::Violated;
    let c_out = if c.is_finite() { c.max(0.0) } else { 0.0 };
    Ok(EllipticityReport {
        verdict: if ok { Verdict::StronglyElliptic } else { Verdict::Failed },
        c: c_out,
        witness: if ok { None } else { minimum.clone() },
        minimum,
        scanned: scanned(&s, opts.band),
        tail,
        low_frequency: None,
    })
}

/// Sharp Gårding threshold `ϰ = ρ/κ - (2 - 1/κ)δ` with the validity flag
/// `δ < ρ / (2κ - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GardingBound {
    pub varkappa: f64,
    pub valid: bool,
}

pub fn garding_order_bound<T: Real>(rho: T, delta: T, kappa: u32) -> Result<GardingBound> {
    if !(rho > T::zero() && rho <= T::one()) {
        return Err(Error::Range(format!("rho = {} must lie in (0, 1]", rho.as_f64())));
    }
    if !(delta >= T::zero() && delta <= T::one()) {
        return Err(Error::Range(format!("delta = {} must lie in [0, 1]", delta.as_f64())));
    }
    if kappa < 1 {
        return Err(Error::Range("kappa must be a positive integer".into()));
    }
    let k = T::lit(kappa as f64);
    let varkappa = rho / k - (T::lit(2.0) - T::one() / k) * delta;
    let valid = delta * (T::lit(2.0) * k - T::one()) < rho;
    Ok(GardingBound { varkappa: varkappa.as_f64(), valid })
}

/// Outcome of the closed-form SU(2) drift criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftCriterion {
    pub holds: bool,
    /// `max(|a₃| + a)` for `m = 1`, `max |a₃|` for `m < 1`.
    pub worst: f64,
    /// Where `worst` (or a positive `a`) was attained.
    pub t: f64,
    pub x_node: Option<usize>,
}

const DRIFT_TOL: f64 = 1e-14;

/// For `K = a L^{m/2} + a₃ iX₃`: with `m = 1`, `-Re σ_K ≥ 0` iff
/// `|a₃| + a ≤ 0`; with `0 ≤ m < 1` iff `a₃ ≡ 0` and `a ≤ 0`.
pub fn su2_drift_criterion<T: Real>(
    a: &Coefficient<T>,
    a3: &Coefficient<T>,
    m: T,
    opts: &ScanOptions<T>,
) -> Result<DriftCriterion> {
    if !(m >= T::zero() && m <= T::one()) {
        return Err(Error::Range(format!("order m = {} must lie in [0, 1]", m.as_f64())));
    }
    let fields: Vec<_> = [a, a3].iter().filter_map(|c| c.field.clone()).collect();
    if let Some(f) = fields.iter().find(|f| f.group() != Group::Su2) {
        return Err(Error::WrongGroup { expected: Group::Su2, found: f.group() });
    }
    let grid = fields.iter().map(|f| f.band()).max().map(|b| {
        quadrature_grid::<T>(Group::Su2, opts.x_band.unwrap_or((2 * b).clamp(2, 6)))
    });
    let sample = |c: &Coefficient<T>| -> Result<Option<Vec<f64>>> {
        match (&c.field, &grid) {
            (Some(f), Some(g)) => Ok(Some(f.sample(g)?.iter().map(|z| z.re.as_f64()).collect())),
            _ => Ok(None),
        }
    };
    let (sa, sa3) = (sample(a)?, sample(a3)?);
    let nodes = grid.as_ref().map_or(1, |g| g.node_count());
    let times: Vec<T> = if opts.times.is_empty() { vec![T::zero()] } else { opts.times.clone() };
    let unit = m == T::one();
    let mut worst = f64::NEG_INFINITY;
    let mut at = (0.0, None);
    let mut a_positive = false;
    for &t in &times {
        let (ca, ca3) = (a.time_factor(t).re.as_f64(), a3.time_factor(t).re.as_f64());
        for n in 0..nodes {
            let x = grid.as_ref().map(|_| n);
            let va = ca * sa.as_ref().map_or(1.0, |v| v[n]);
            let va3 = ca3 * sa3.as_ref().map_or(1.0, |v| v[n]);
            let value = if unit { va3.abs() + va } else { va3.abs() };
            if value > worst {
                worst = value;
                at = (t.as_f64(), x);
            }
            if !unit && va > DRIFT_TOL && !a_positive {
                a_positive = true;
                if worst <= DRIFT_TOL {
                    at = (t.as_f64(), x);
                }
            }
        }
    }
    let holds = worst <= DRIFT_TOL && !a_positive;
    Ok(DriftCriterion { holds, worst, t: at.0, x_node: at.1 })
}

/// Which hypothesis set a problem satisfies.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "case")]
pub enum Classification {
    /// Strongly elliptic with constant `C` and positive order.
    CaseI {
        #[serde(rename = "C")]
        c: f64,
        m: f64,
        /// Ellipticity holds only away from low frequencies, where the
        /// symbol is still nonnegative.
        low_frequency_excluded: bool,
    },
    /// Nonnegative symbol with order inside the Gårding window.
    CaseII { varkappa: f64, m: f64 },
    Unverified { reason: String, witness: Option<Witness> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub classification: Classification,
    pub ellipticity: EllipticityReport,
    pub positivity: EllipticityReport,
    pub garding: Option<GardingBound>,
}

impl ClassifyReport {
    pub fn verified(&self) -> bool {
        !matches!(self.classification, Classification::Unverified { .. })
    }
}

/// Case I if strongly elliptic with `m > 0`, else Case II if nonnegative
/// with `0 ≤ m ≤ ϰ(ρ, δ, κ)`, else unverified.
///
/// Strict strong ellipticity fails at the trivial representation for pure
/// Laplacian powers; Case I is still granted when the low-frequency check
/// passes with a conclusive tail and the symbol is nonnegative everywhere,
/// and the report says so.
pub fn classify_problem<T: Real>(sym: &Symbol<T>, opts: &ScanOptions<T>) -> Result<ClassifyReport> {
    let meta = *sym.meta();
    let kind = if meta.kappa >= 2 { WeightKind::Subelliptic } else { WeightKind::Elliptic };
    let m = meta.order.as_f64();
    let ellipticity = strong_ellipticity_constant(sym, opts, kind)?;
    let positivity = positivity_check(sym, opts)?;
    let garding = garding_order_bound(meta.rho, meta.delta, meta.kappa);
    let low = ellipticity.low_frequency.as_deref();
    let classification = if ellipticity.verdict == Verdict::StronglyElliptic && m > 0.0 {
        Classification::CaseI { c: ellipticity.c, m, low_frequency_excluded: false }
    } else if let (Some(low), true, true) = (low, positivity.passed(), m > 0.0) {
        if low.verdict == Verdict::StronglyElliptic && low.tail == Tail::Conclusive {
            Classification::CaseI { c: low.c, m, low_frequency_excluded: true }
        } else {
            case_two(&positivity, &garding, m)
        }
    } else {
        case_two(&positivity, &garding, m)
    };
    Ok(ClassifyReport { classification, ellipticity, positivity, garding: garding.ok() })
}

fn case_two(positivity: &EllipticityReport, garding: &Result<GardingBound>, m: f64) -> Classification {
    if !positivity.passed() {
        return Classification::Unverified { reason: "positivity failed".into(), witness: positivity.witness.clone() };
    }
    match garding {
        Err(e) => Classification::Unverified { reason: format!("class parameters rejected: {e}"), witness: None },
        Ok(g) if !g.valid => Classification::Unverified {
            reason: "(rho, delta, kappa) outside the sharp Garding range".into(),
            witness: None,
        },
        Ok(g) if m < 0.0 || m > g.varkappa + 1e-12 => Classification::Unverified {
            reason: format!("order {m} outside [0, {}] and not strongly elliptic", g.varkappa),
            witness: None,
        },
        Ok(g) => Classification::CaseII { varkappa: g.varkappa, m },
    }
}
