//! Operator specifications and the operator expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := ('+' | '-')* factor ('*' factor)*
//! factor := number | name | base
//! base   := "laplace" ['^' exp] | "sublaplace" ['^' exp]
//!         | "bessel^" exp | "subbessel^" exp
//!         | "X1" | "X2" | "X3" | "iX3" | "d0" | "d+" | "d-" | "id"
//! exp    := ['-'] number ['/' number]
//! ```
//!
//! `laplace^p` is `L^p` (so `laplace^1/2` is the square root of the
//! Laplacian), `bessel^s` is `(1 + L)^{s/2}`. Every term holds exactly one
//! base. A `name` refers to a registered spatial field or time profile; at
//! most one of each per term. The name `i` is the imaginary unit.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::coefficient::{Coefficient, ScalarField, TimeProfile};
use super::lie::{bessel_weight, laplace_symbol, sublaplace_symbol, vector_field_symbol, VectorField, WeightKind};
use super::power::fractional_power;
use crate::error::{Error, Result};
use crate::harmonic::{Group, RepIndex};
use crate::scalar::{cplx, CMatrix, Real};

/// An x-independent operator whose symbol is known in closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Base<T> {
    /// `L^{m/2}`
    LaplaceFrac(T),
    /// `𝓛^{m/2}` for the sub-Laplacian `𝓛 = -X₁² - X₂²`
    SubLaplaceFrac(T),
    /// `(1 + L)^{s/2}`
    BesselFrac(T),
    /// `(1 + 𝓛)^{s/2}`
    SubBesselFrac(T),
    VectorField(VectorField),
    Identity,
}

impl<T: Real> Base<T> {
    pub fn matrix(&self, rep: RepIndex) -> Result<CMatrix<T>> {
        let half = T::lit(0.5);
        match *self {
            Base::LaplaceFrac(m) => fractional_power(&laplace_symbol(rep), m * half),
            Base::SubLaplaceFrac(m) => fractional_power(&sublaplace_symbol(rep)?, m * half),
            Base::BesselFrac(s) => Ok(bessel_weight(rep, s, WeightKind::Elliptic)),
            Base::SubBesselFrac(s) => Ok(bessel_weight(rep, s, WeightKind::Subelliptic)),
            Base::VectorField(v) => vector_field_symbol(v, rep),
            Base::Identity => Ok(CMatrix::identity(rep.dim(), rep.dim())),
        }
    }

    pub fn order(&self) -> T {
        match *self {
            Base::LaplaceFrac(m) | Base::SubLaplaceFrac(m) => m,
            Base::BesselFrac(s) | Base::SubBesselFrac(s) => s,
            Base::VectorField(_) => T::one(),
            Base::Identity => T::zero(),
        }
    }

    pub fn is_subelliptic(&self) -> bool {
        matches!(self, Base::SubLaplaceFrac(_) | Base::SubBesselFrac(_))
    }

    pub fn validate(&self, group: Group) -> Result<()> {
        match *self {
            Base::LaplaceFrac(m) | Base::SubLaplaceFrac(m) if m < T::zero() || !m.is_finite() => {
                Err(Error::Range(format!("generator exponent {} must be >= 0", (m * T::lit(0.5)).as_f64())))
            }
            Base::BesselFrac(s) | Base::SubBesselFrac(s) if !s.is_finite() => {
                Err(Error::Range("Bessel exponent must be finite".into()))
            }
            Base::SubLaplaceFrac(_) | Base::VectorField(_) if group != Group::Su2 => {
                Err(Error::WrongGroup { expected: Group::Su2, found: group })
            }
            _ => Ok(()),
        }
    }
}

impl<T: Real> fmt::Display for Base<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Base::LaplaceFrac(m) => write!(f, "laplace^{}", (m * T::lit(0.5)).as_f64()),
            Base::SubLaplaceFrac(m) => write!(f, "sublaplace^{}", (m * T::lit(0.5)).as_f64()),
            Base::BesselFrac(s) => write!(f, "bessel^{}", s.as_f64()),
            Base::SubBesselFrac(s) => write!(f, "subbessel^{}", s.as_f64()),
            Base::VectorField(v) => f.write_str(v.name()),
            Base::Identity => f.write_str("id"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term<T: Real> {
    pub coef: Coefficient<T>,
    pub base: Base<T>,
}

/// Declared class metadata; unset entries are inferred from the terms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetaOverride<T> {
    pub order: Option<T>,
    pub rho: Option<T>,
    pub delta: Option<T>,
    pub kappa: Option<u32>,
}

/// `K(t) = Σ a_i(x, t) B_i` as it appears in `v_t = K(t)v + f`.
#[derive(Clone, Debug)]
pub struct OperatorSpec<T: Real> {
    pub group: Group,
    pub terms: Vec<Term<T>>,
    pub meta: MetaOverride<T>,
}

impl<T: Real> OperatorSpec<T> {
    pub fn new(group: Group) -> Self {
        OperatorSpec { group, terms: Vec::new(), meta: MetaOverride::default() }
    }

    pub fn term(mut self, c: T, base: Base<T>) -> Self {
        self.terms.push(Term { coef: Coefficient::constant(c), base });
        self
    }

    pub fn with_term(mut self, coef: Coefficient<T>, base: Base<T>) -> Self {
        self.terms.push(Term { coef, base });
        self
    }

    pub fn validate(&self) -> Result<()> {
        for term in &self.terms {
            term.base.validate(self.group)?;
            if let Some(f) = &term.coef.field {
                if f.group() != self.group {
                    return Err(Error::WrongGroup { expected: self.group, found: f.group() });
                }
            }
        }
        Ok(())
    }
}

/// Named spatial fields and time profiles an expression may refer to.
#[derive(Clone, Debug, Default)]
pub struct Registry<T: Real> {
    pub fields: BTreeMap<String, Arc<ScalarField<T>>>,
    pub profiles: BTreeMap<String, TimeProfile<T>>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Num(f64),
    Name(String),
    Base(String, Option<f64>),
}

const POWERED: [&str; 4] = ["laplace", "sublaplace", "bessel", "subbessel"];

fn malformed(expr: &str, msg: impl fmt::Display) -> Error {
    Error::Malformed(format!("operator \"{expr}\": {msg}"))
}

fn scan_number(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
        i += 1;
    }
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut k = i + 1;
        if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
            k += 1;
        }
        if k < chars.len() && chars[k].is_ascii_digit() {
            i = k;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    i
}

fn parse_num(expr: &str, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| malformed(expr, format!("bad number \"{s}\"")))
}

fn tokenize(expr: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = expr.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' {
            out.push(Tok::Plus);
            i += 1;
        } else if c == '-' {
            out.push(Tok::Minus);
            i += 1;
        } else if c == '*' {
            out.push(Tok::Star);
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let end = scan_number(&chars, i);
            let s: String = chars[i..end].iter().collect();
            out.push(Tok::Num(parse_num(expr, &s)?));
            i = end;
        } else if c.is_alphabetic() || c == '_' {
            let mut end = i;
            while end < chars.len() && (chars[end].is_alphanumeric() || chars[end] == '_') {
                end += 1;
            }
            let mut word: String = chars[i..end].iter().collect();
            if word == "d" && end < chars.len() && (chars[end] == '+' || chars[end] == '-') {
                word.push(chars[end]);
                end += 1;
            }
            if POWERED.contains(&word.as_str()) && end < chars.len() && chars[end] == '^' {
                let mut k = end + 1;
                let neg = k < chars.len() && chars[k] == '-';
                if neg || (k < chars.len() && chars[k] == '+') {
                    k += 1;
                }
                let stop = scan_number(&chars, k);
                if stop == k {
                    return Err(malformed(expr, format!("missing exponent after \"{word}^\"")));
                }
                let mut value = parse_num(expr, &chars[k..stop].iter().collect::<String>())?;
                k = stop;
                if k < chars.len() && chars[k] == '/' {
                    let dstop = scan_number(&chars, k + 1);
                    if dstop == k + 1 {
                        return Err(malformed(expr, "missing denominator in exponent"));
                    }
                    let den = parse_num(expr, &chars[k + 1..dstop].iter().collect::<String>())?;
                    if den == 0.0 {
                        return Err(malformed(expr, "zero denominator in exponent"));
                    }
                    value /= den;
                    k = dstop;
                }
                out.push(Tok::Base(word, Some(if neg { -value } else { value })));
                i = k;
            } else {
                out.push(Tok::Name(word));
                i = end;
            }
        } else {
            return Err(malformed(expr, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn base_from<T: Real>(expr: &str, word: &str, exp: Option<f64>) -> Result<Option<Base<T>>> {
    let check_gen = |p: f64| {
        if p < 0.0 {
            Err(Error::Range(format!("operator \"{expr}\": exponent {p} of {word} must be >= 0")))
        } else {
            Ok(T::lit(2.0 * p))
        }
    };
    Ok(Some(match (word, exp) {
        ("laplace", e) => Base::LaplaceFrac(check_gen(e.unwrap_or(1.0))?),
        ("sublaplace", e) => Base::SubLaplaceFrac(check_gen(e.unwrap_or(1.0))?),
        ("bessel", Some(s)) => Base::BesselFrac(T::lit(s)),
        ("subbessel", Some(s)) => Base::SubBesselFrac(T::lit(s)),
        ("bessel" | "subbessel", None) => return Err(malformed(expr, format!("\"{word}\" needs an exponent"))),
        ("id", _) => Base::Identity,
        (w, _) => match w.parse::<VectorField>() {
            Ok(v) => Base::VectorField(v),
            Err(_) => return Ok(None),
        },
    }))
}

/// Parses an operator expression over the names in `registry`.
pub fn parse_operator<T: Real>(expr: &str, group: Group, registry: &Registry<T>) -> Result<OperatorSpec<T>> {
    let toks = tokenize(expr)?;
    if toks.is_empty() {
        return Err(malformed(expr, "empty expression"));
    }
    let mut spec = OperatorSpec::new(group);
    let mut i = 0;
    let mut first = true;
    while i < toks.len() {
        let mut sign = 1.0;
        match toks[i] {
            Tok::Plus => i += 1,
            Tok::Minus => {
                sign = -1.0;
                i += 1;
            }
            _ if !first => return Err(malformed(expr, "expected '+' or '-' between terms")),
            _ => {}
        }
        first = false;
        while let Some(t @ (Tok::Plus | Tok::Minus)) = toks.get(i) {
            if *t == Tok::Minus {
                sign = -sign;
            }
            i += 1;
        }
        let mut scale = cplx(T::lit(sign), T::zero());
        let mut field = None;
        let mut profile = None;
        let mut base = None;
        loop {
            let tok = toks.get(i).ok_or_else(|| malformed(expr, "expression ends inside a term"))?;
            i += 1;
            match tok {
                Tok::Num(v) => scale *= T::lit(*v),
                Tok::Base(w, e) => {
                    let b = base_from::<T>(expr, w, *e)?.expect("powered bases are known");
                    if base.replace(b).is_some() {
                        return Err(malformed(expr, "more than one operator in a term"));
                    }
                }
                Tok::Name(w) => {
                    if let Some(b) = base_from::<T>(expr, w, None)? {
                        if base.replace(b).is_some() {
                            return Err(malformed(expr, "more than one operator in a term"));
                        }
                    } else if w == "i" {
                        scale *= cplx(T::zero(), T::one());
                    } else if let Some(f) = registry.fields.get(w) {
                        if field.replace(f.clone()).is_some() {
                            return Err(malformed(expr, "more than one spatial field in a term"));
                        }
                    } else if let Some(p) = registry.profiles.get(w) {
                        if profile.replace(*p).is_some() {
                            return Err(malformed(expr, "more than one time profile in a term"));
                        }
                    } else {
                        return Err(Error::UnknownField(w.clone()));
                    }
                }
                _ => return Err(malformed(expr, "expected a number, name or operator")),
            }
            match toks.get(i) {
                Some(Tok::Star) => i += 1,
                Some(Tok::Plus | Tok::Minus) | None => break,
                Some(_) => return Err(malformed(expr, "expected '*' between factors")),
            }
        }
        let base = base.ok_or_else(|| malformed(expr, "term without an operator (use id)"))?;
        spec.terms.push(Term { coef: Coefficient { scale, field, profile }, base });
    }
    spec.validate()?;
    Ok(spec)
}
