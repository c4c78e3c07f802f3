//! Run configuration: JSON schema, defaults and validation.
//!
//! ```json
//! {
//!   "group": "su2",
//!   "two_L": 16,
//!   "operator": "-a*laplace^1/2 + 1*iX3",
//!   "fields": { "a": { "zonal": [1.0, 0.2] } },
//!   "profiles": { "p": { "cosine": { "offset": 1, "amplitude": 0.5, "omega": 2 } } },
//!   "u0": "xi 1 0 0",
//!   "forcing": { "field": "random 3", "profile": "p" },
//!   "T": 1.0, "dt": 1e-3, "scheme": "auto", "s": 0, "kind": "elliptic",
//!   "check": { "two_L": 100, "times": 17 },
//!   "snapshots": 4, "seed": 0, "out": "out"
//! }
//! ```
//!
//! Initial data (and forcing fields) are one of `"zero"`, `"delta"`,
//! `"xi ℓ a b"` (`"xi k"` on the circle), `"random"`, `"random N"` or
//! `{"file": "field.json"}`. Higher-order problems add `"time_order"`,
//! `"coefficients": {"a1": .., "a2": ..}` and `"data": [g1, g2, ..]`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use lie_diffuse::evolve::Scheme;
use lie_diffuse::harmonic::{Group, SpectralFieldJson};
use lie_diffuse::symbol::{parse_operator, OperatorSpec, Registry, ScalarField, TimeProfile, WeightKind};
use lie_diffuse::SpectralField64;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_TWO_L: u32 = 16;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_HORIZON: f64 = 1.0;
pub const DEFAULT_CHECK_TWO_L: u32 = 100;
pub const DEFAULT_CHECK_TIMES: usize = 17;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    group: Option<Group>,
    #[serde(rename = "two_L")]
    two_l: Option<u32>,
    operator: Option<String>,
    #[serde(default)]
    fields: BTreeMap<String, FieldSpec>,
    #[serde(default)]
    profiles: BTreeMap<String, ProfileSpec>,
    u0: Option<DataSpec>,
    forcing: Option<ForcingSpec>,
    #[serde(rename = "T")]
    horizon: Option<f64>,
    dt: Option<f64>,
    scheme: Option<String>,
    s: Option<f64>,
    kind: Option<WeightKind>,
    check: Option<CheckSpec>,
    time_order: Option<usize>,
    coefficients: Option<BTreeMap<String, String>>,
    data: Option<Vec<DataSpec>>,
    snapshots: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DataSpec {
    Preset(String),
    File { file: PathBuf },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
enum FieldSpec {
    Zonal(Vec<f64>),
    Constant(f64),
    File(PathBuf),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
enum ProfileSpec {
    Const(f64),
    Cosine { offset: f64, amplitude: f64, omega: f64 },
    Linear { c0: f64, c1: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ForcingSpec {
    field: DataSpec,
    profile: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckSpec {
    #[serde(rename = "two_L")]
    two_l: Option<u32>,
    times: Option<usize>,
    x_band: Option<u32>,
    tail: Option<bool>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub two_l: Option<u32>,
    pub dt: Option<f64>,
    pub scheme: Option<Scheme>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub two_l: u32,
    pub times: usize,
    pub x_band: Option<u32>,
    pub tail: bool,
}

#[derive(Clone, Debug)]
pub struct ForcingConfig {
    pub field: DataSpec,
    pub profile: Option<TimeProfile<f64>>,
}

#[derive(Clone, Debug)]
pub struct ReduceConfig {
    pub order: usize,
    /// `coefficients[k − 1]` is `a_k`.
    pub coefficients: Vec<Option<OperatorSpec<f64>>>,
    pub coefficient_text: Vec<Option<String>>,
    pub data: Vec<DataSpec>,
}

/// A validated configuration with every default filled in.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub group: Group,
    pub two_l: u32,
    pub operator_text: Option<String>,
    pub operator: Option<OperatorSpec<f64>>,
    pub registry: Registry<f64>,
    pub u0: Option<DataSpec>,
    pub forcing: Option<ForcingConfig>,
    pub horizon: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub s: f64,
    pub kind: WeightKind,
    pub check: CheckOptions,
    pub reduce: Option<ReduceConfig>,
    pub snapshots: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Relative file paths resolve against this directory.
    pub base_dir: PathBuf,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_str(&text, &base, overrides)
}

/// Validates configuration text; relative paths resolve against `base_dir`.
pub fn parse_config_str(text: &str, base_dir: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| config_err(format!("invalid config: {e}")))?;
    let group = raw.group.unwrap_or(Group::Su2);
    let two_l = overrides.two_l.or(raw.two_l).unwrap_or(DEFAULT_TWO_L);
    let horizon = raw.horizon.unwrap_or(DEFAULT_HORIZON);
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(config_err(format!("T = {horizon} must be positive")));
    }
    let dt = overrides.dt.or(raw.dt).unwrap_or(DEFAULT_DT);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(config_err(format!("dt = {dt} must be positive")));
    }
    if dt > horizon {
        return Err(config_err(format!("dt = {dt} exceeds T = {horizon}")));
    }
    let scheme = match (overrides.scheme, &raw.scheme) {
        (Some(s), _) => s,
        (None, Some(s)) => s.parse().map_err(|e| config_err(format!("{e}")))?,
        (None, None) => Scheme::Auto,
    };
    let s = raw.s.unwrap_or(0.0);
    if !s.is_finite() {
        return Err(config_err("s must be finite"));
    }

    let mut registry = Registry::default();
    for (name, spec) in &raw.fields {
        let field = match spec {
            FieldSpec::Zonal(c) => ScalarField::zonal(group, c),
            FieldSpec::Constant(c) => ScalarField::constant(group, *c),
            FieldSpec::File(p) => {
                let f = read_field(&base_dir.join(p))?;
                if f.group != group {
                    return Err(config_err(format!("field `{name}` lives on {}", f.group.name())));
                }
                ScalarField::from_spectrum(f).map_err(|e| config_err(format!("field `{name}`: {e}")))?
            }
        };
        registry.fields.insert(name.clone(), Arc::new(field));
    }
    for (name, spec) in &raw.profiles {
        let p = match *spec {
            ProfileSpec::Const(c) => TimeProfile::Const(c),
            ProfileSpec::Cosine { offset, amplitude, omega } => TimeProfile::Cosine { offset, amplitude, omega },
            ProfileSpec::Linear { c0, c1 } => TimeProfile::Linear { c0, c1 },
        };
        registry.profiles.insert(name.clone(), p);
    }

    let parse = |expr: &str, what: &str| {
        parse_operator(expr, group, &registry).map_err(|e| config_err(format!("{what}: {e}")))
    };
    let operator = raw.operator.as_deref().map(|e| parse(e, "operator")).transpose()?;

    let check_raw = raw.check.unwrap_or(CheckSpec { two_l: None, times: None, x_band: None, tail: None });
    let check = CheckOptions {
        two_l: check_raw.two_l.unwrap_or(DEFAULT_CHECK_TWO_L),
        times: check_raw.times.unwrap_or(DEFAULT_CHECK_TIMES),
        x_band: check_raw.x_band,
        tail: check_raw.tail.unwrap_or(true),
    };
    if check.times == 0 {
        return Err(config_err("check.times must be at least 1"));
    }

    let forcing = match raw.forcing {
        None => None,
        Some(f) => {
            let profile = match &f.profile {
                None => None,
                Some(name) => Some(
                    *registry.profiles.get(name).ok_or_else(|| config_err(format!("unknown profile `{name}`")))?,
                ),
            };
            Some(ForcingConfig { field: f.field, profile })
        }
    };

    let reduce = match (raw.time_order, raw.coefficients, raw.data) {
        (None, None, None) => None,
        (Some(m), coefficients, data) => {
            if m < 2 {
                return Err(config_err(format!("time_order = {m} must be at least 2")));
            }
            let mut coeffs = vec![None; m];
            let mut text = vec![None; m];
            for (key, expr) in coefficients.unwrap_or_default() {
                let k = key
                    .strip_prefix('a')
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|k| (1..=m).contains(k))
                    .ok_or_else(|| config_err(format!("unknown coefficient key `{key}` (expected a1..a{m})")))?;
                coeffs[k - 1] = Some(parse(&expr, &key)?);
                text[k - 1] = Some(expr);
            }
            let data = data.ok_or_else(|| config_err("time_order needs `data` with one entry per order"))?;
            if data.len() != m {
                return Err(config_err(format!("time_order = {m} needs {m} data entries, got {}", data.len())));
            }
            Some(ReduceConfig { order: m, coefficients: coeffs, coefficient_text: text, data })
        }
        _ => return Err(config_err("`coefficients` and `data` require `time_order`")),
    };

    let cfg = RunConfig {
        group,
        two_l,
        operator_text: raw.operator,
        operator,
        registry,
        u0: raw.u0,
        forcing,
        horizon,
        dt,
        scheme,
        s,
        kind: raw.kind.unwrap_or(WeightKind::Elliptic),
        check,
        reduce,
        snapshots: raw.snapshots.unwrap_or(0),
        seed: overrides.seed.or(raw.seed).unwrap_or(0),
        out: overrides.out.clone().or(raw.out).unwrap_or_else(|| PathBuf::from("out")),
        base_dir: base_dir.to_path_buf(),
    };
    for spec in cfg.data_specs() {
        cfg.check_data(spec)?;
    }
    Ok(cfg)
}

fn read_field(path: &Path) -> Result<SpectralField64, CliError> {
    let text = fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let json: SpectralFieldJson =
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    SpectralField64::from_json(&json).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// `ℓ` as an integer, half-integer decimal or `n/2`, returned as `2ℓ`.
fn parse_two_ell(s: &str) -> Option<u32> {
    let v = match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().ok()? / d.parse::<f64>().ok()?,
        None => s.parse::<f64>().ok()?,
    };
    let two = 2.0 * v;
    (two >= 0.0 && (two - two.round()).abs() < 1e-12).then_some(two.round() as u32)
}

impl RunConfig {
    fn data_specs(&self) -> impl Iterator<Item = &DataSpec> {
        self.u0
            .iter()
            .chain(self.forcing.iter().map(|f| &f.field))
            .chain(self.reduce.iter().flat_map(|r| r.data.iter()))
    }

    fn check_data(&self, spec: &DataSpec) -> Result<(), CliError> {
        match spec {
            DataSpec::File { file } => {
                let path = self.base_dir.join(file);
                if !path.is_file() {
                    return Err(config_err(format!("data file {} does not exist", path.display())));
                }
                Ok(())
            }
            DataSpec::Preset(_) => self.build_data(spec).map(|_| ()),
        }
    }

    /// Materializes a data spec at the run bandlimit.
    pub fn build_data(&self, spec: &DataSpec) -> Result<SpectralField64, CliError> {
        let (group, band) = (self.group, self.two_l);
        match spec {
            DataSpec::File { file } => {
                let f = read_field(&self.base_dir.join(file))?;
                if f.group != group {
                    return Err(config_err(format!("{} holds a {} field", file.display(), f.group.name())));
                }
                if f.band > band {
                    return Err(config_err(format!(
                        "{} has bandlimit {} above the run bandlimit {band}",
                        file.display(),
                        f.band
                    )));
                }
                Ok(f.with_band(band))
            }
            DataSpec::Preset(text) => {
                let words: Vec<&str> = text.split_whitespace().collect();
                match words.as_slice() {
                    ["zero"] => Ok(SpectralField64::zeros(group, band)),
                    ["delta"] => Ok(SpectralField64::from_fn(group, band, |r| {
                        lie_diffuse::CMatrix::identity(r.dim(), r.dim())
                    })),
                    ["random"] => Ok(self.random(self.seed)),
                    ["random", n] => {
                        let n = n.parse().map_err(|_| config_err(format!("bad seed in `{text}`")))?;
                        Ok(self.random(n))
                    }
                    ["xi", rest @ ..] => self.matrix_coefficient(text, rest),
                    _ => Err(config_err(format!(
                        "unknown data preset `{text}` (expected zero, delta, xi ℓ a b, random [N] or {{\"file\": ..}})"
                    ))),
                }
            }
        }
    }

    fn random(&self, seed: u64) -> SpectralField64 {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        SpectralField64::random(self.group, self.two_l, &mut rng)
    }

    fn matrix_coefficient(&self, text: &str, args: &[&str]) -> Result<SpectralField64, CliError> {
        use lie_diffuse::harmonic::RepIndex;
        let bad = || config_err(format!("malformed preset `{text}`"));
        let (rep, a, b) = match (self.group, args) {
            (Group::Su2, [l, a, b]) => {
                (RepIndex::su2(parse_two_ell(l).ok_or_else(bad)?), a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)
            }
            (Group::Torus, [k]) | (Group::Torus, [k, "0", "0"]) => (RepIndex::torus(k.parse().map_err(|_| bad())?), 0, 0),
            _ => return Err(bad()),
        };
        SpectralField64::matrix_coefficient(rep, a, b, self.two_l).map_err(|e| config_err(format!("`{text}`: {e}")))
    }
}
