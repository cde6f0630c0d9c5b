//! `SystemDocument`: the JSON input format of the command-line tool.
//!
//! ```json
//! {
//!   "space": {"dim": 2, "p": 2},
//!   "sequence_space": {"p": "inf"},
//!   "family_F": [[1, 0], [0, 1]],
//!   "family_G": [[1, 0], [0, 1]],
//!   "operator_T": [[1, 0], [0, 1]],
//!   "transforms": {"V": [[2, 0], [0, 1]], "W": [[1, 0], [0, 1]]},
//!   "lazy": {"generator": "geometric", "parameters": {"ratio": 0.5}, "envelope": {"scale": 1}}
//! }
//! ```
//!
//! Shape problems (invalid JSON, missing fields, wrong JSON types) are parse
//! errors; broken invariants (row lengths, counts, exponents, unknown
//! generators) are validation errors. Both name the offending field path.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{Map, Value};

use super::canonical::{num, rows};
use crate::linops::{DenseOperator, FrameFamily, Side};
use crate::pairframes::PairSystem;
use crate::spaces::{dual_space, Exponent, SpaceSpec};
use crate::unconditional::LazyFamily;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable input, invalid JSON or a field of the wrong JSON type.
    Parse(String),
    /// A well-formed document that breaks an invariant.
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn parse_err(path: &str, msg: impl fmt::Display) -> CliError {
    CliError::Parse(format!("{path}: {msg}"))
}

fn invalid(path: &str, msg: impl fmt::Display) -> CliError {
    CliError::Validation(format!("{path}: {msg}"))
}

/// Wraps a library error with the field it came from.
pub fn at(path: &str) -> impl Fn(crate::Error) -> CliError + '_ {
    move |e| invalid(path, e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LazySpec {
    pub generator: String,
    pub parameters: BTreeMap<String, f64>,
    pub envelope: BTreeMap<String, f64>,
}

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDocument {
    pub dim: usize,
    pub p: Exponent,
    pub sequence_p: Exponent,
    pub family_f: Option<Rows>,
    pub family_g: Option<Rows>,
    pub operator_t: Option<Rows>,
    pub transforms: Option<(Rows, Rows)>,
    pub lazy: Option<LazySpec>,
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| parse_err(path, "expected an object"))
}

fn reject_unknown(map: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<(), CliError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(invalid(&join(path, k), "unknown field")),
        None => Ok(()),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn required<'a>(map: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, CliError> {
    map.get(key).ok_or_else(|| parse_err(&join(path, key), "missing required field"))
}

fn number(v: &Value, path: &str) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| parse_err(path, "expected a number"))
}

fn exponent(v: &Value, path: &str) -> Result<Exponent, CliError> {
    let p = match v {
        Value::String(s) if s == "inf" => f64::INFINITY,
        Value::String(s) => return Err(invalid(path, format!("unknown exponent string {s:?} (use \"inf\")"))),
        Value::Number(_) => number(v, path)?,
        _ => return Err(parse_err(path, "expected a number or \"inf\"")),
    };
    Exponent::new(p).map_err(|e| invalid(path, e))
}

fn exponent_value(p: Exponent) -> Value {
    if p.is_infinite() {
        Value::String("inf".into())
    } else {
        num(p.value())
    }
}

fn matrix(v: &Value, path: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let outer = v.as_array().ok_or_else(|| parse_err(path, "expected an array of rows"))?;
    outer
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let rp = format!("{path}[{i}]");
            let items = row.as_array().ok_or_else(|| parse_err(&rp, "expected an array of numbers"))?;
            items
                .iter()
                .enumerate()
                .map(|(j, x)| number(x, &format!("{rp}[{j}]")))
                .collect()
        })
        .collect()
}

fn check_shape(m: &[Vec<f64>], rows_expected: Option<usize>, cols: usize, path: &str) -> Result<(), CliError> {
    if let Some(r) = rows_expected {
        if m.len() != r {
            return Err(invalid(path, format!("expected {r} rows, found {}", m.len())));
        }
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(invalid(&format!("{path}[{i}]"), format!("expected {cols} entries, found {}", row.len())));
        }
    }
    Ok(())
}

fn number_map(v: &Value, path: &str) -> Result<BTreeMap<String, f64>, CliError> {
    object(v, path)?
        .iter()
        .map(|(k, x)| Ok((k.clone(), number(x, &join(path, k))?)))
        .collect()
}

impl SystemDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self, CliError> {
        let top = object(v, "document")?;
        reject_unknown(
            top,
            "",
            &["space", "sequence_space", "family_F", "family_G", "operator_T", "transforms", "lazy"],
        )?;

        let space = object(required(top, "", "space")?, "space")?;
        reject_unknown(space, "space", &["dim", "p"])?;
        let dim_v = required(space, "space", "dim")?;
        let dim = dim_v.as_u64().ok_or_else(|| parse_err("space.dim", "expected a nonnegative integer"))? as usize;
        if dim == 0 {
            return Err(invalid("space.dim", "must be positive"));
        }
        let p = exponent(required(space, "space", "p")?, "space.p")?;

        let seq = object(required(top, "", "sequence_space")?, "sequence_space")?;
        reject_unknown(seq, "sequence_space", &["p"])?;
        let sequence_p = exponent(required(seq, "sequence_space", "p")?, "sequence_space.p")?;

        let family_f = top.get("family_F").map(|m| matrix(m, "family_F")).transpose()?;
        let family_g = top.get("family_G").map(|m| matrix(m, "family_G")).transpose()?;
        let operator_t = top.get("operator_T").map(|m| matrix(m, "operator_T")).transpose()?;
        let transforms = match top.get("transforms") {
            Some(t) => {
                let t = object(t, "transforms")?;
                reject_unknown(t, "transforms", &["V", "W"])?;
                Some((
                    matrix(required(t, "transforms", "V")?, "transforms.V")?,
                    matrix(required(t, "transforms", "W")?, "transforms.W")?,
                ))
            }
            None => None,
        };
        let lazy = match top.get("lazy") {
            Some(l) => {
                let l = object(l, "lazy")?;
                reject_unknown(l, "lazy", &["generator", "parameters", "envelope"])?;
                let generator = required(l, "lazy", "generator")?
                    .as_str()
                    .ok_or_else(|| parse_err("lazy.generator", "expected a string"))?
                    .to_string();
                let parameters = l.get("parameters").map(|m| number_map(m, "lazy.parameters")).transpose()?;
                let envelope = l.get("envelope").map(|m| number_map(m, "lazy.envelope")).transpose()?;
                Some(LazySpec {
                    generator,
                    parameters: parameters.unwrap_or_default(),
                    envelope: envelope.unwrap_or_default(),
                })
            }
            None => None,
        };

        let doc = SystemDocument {
            dim,
            p,
            sequence_p,
            family_f,
            family_g,
            operator_t,
            transforms,
            lazy,
        };
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<(), CliError> {
        let n = self.dim;
        if let Some(f) = &self.family_f {
            if f.is_empty() {
                return Err(invalid("family_F", "must contain at least one vector"));
            }
            check_shape(f, None, n, "family_F")?;
        }
        if let Some(g) = &self.family_g {
            if g.is_empty() {
                return Err(invalid("family_G", "must contain at least one functional"));
            }
            check_shape(g, None, n, "family_G")?;
        }
        if let (Some(f), Some(g)) = (&self.family_f, &self.family_g) {
            if f.len() != g.len() {
                return Err(invalid(
                    "family_G",
                    format!("has {} rows but family_F has {}", g.len(), f.len()),
                ));
            }
        }
        if let Some(t) = &self.operator_t {
            let count = self.count().ok_or_else(|| invalid("operator_T", "needs family_G or family_F to fix its width"))?;
            check_shape(t, Some(n), count, "operator_T")?;
        }
        if let Some((v, w)) = &self.transforms {
            check_shape(v, Some(n), n, "transforms.V")?;
            check_shape(w, Some(n), n, "transforms.W")?;
        }
        if let Some(l) = &self.lazy {
            self.build_lazy(l)?;
        } else if self.family_f.is_none() && self.family_g.is_none() {
            return Err(invalid("family_G", "missing: a document needs family_F/family_G or lazy"));
        }
        Ok(())
    }

    /// Number of terms in the finite families.
    pub fn count(&self) -> Option<usize> {
        self.family_g.as_ref().or(self.family_f.as_ref()).map(|m| m.len())
    }

    pub fn space(&self) -> SpaceSpec {
        SpaceSpec::new(self.dim, self.p).expect("validated dimension")
    }

    pub fn sequence_space(&self) -> Result<SpaceSpec, CliError> {
        let count = self.count().ok_or_else(|| invalid("family_G", "missing: needed for the sequence space"))?;
        SpaceSpec::new(count, self.sequence_p).map_err(at("sequence_space"))
    }

    pub fn family_g(&self) -> Result<FrameFamily, CliError> {
        let g = self.family_g.as_ref().ok_or_else(|| invalid("family_G", "missing"))?;
        FrameFamily::from_rows(g, dual_space(&self.space()), Side::Dual).map_err(at("family_G"))
    }

    pub fn family_f(&self) -> Result<FrameFamily, CliError> {
        let f = self.family_f.as_ref().ok_or_else(|| invalid("family_F", "missing"))?;
        FrameFamily::from_rows(f, self.space(), Side::Primal).map_err(at("family_F"))
    }

    pub fn pair_system(&self) -> Result<PairSystem, CliError> {
        PairSystem::new(self.family_g()?, self.family_f()?, self.sequence_space()?).map_err(at("family_G"))
    }

    /// `T : ℓ → X` as a `dim × count` matrix.
    pub fn operator_t(&self) -> Result<Option<DenseOperator>, CliError> {
        self.operator_t
            .as_ref()
            .map(|t| DenseOperator::from_rows(t, self.sequence_space()?, self.space()).map_err(at("operator_T")))
            .transpose()
    }

    pub fn transforms(&self) -> Result<(DenseOperator, DenseOperator), CliError> {
        let (v, w) = self.transforms.as_ref().ok_or_else(|| invalid("transforms", "missing"))?;
        let x = self.space();
        Ok((
            DenseOperator::from_rows(v, x, x).map_err(at("transforms.V"))?,
            DenseOperator::from_rows(w, x, x).map_err(at("transforms.W"))?,
        ))
    }

    /// The lazy family if declared, otherwise the finite pair system padded with zeros.
    pub fn lazy_family(&self) -> Result<LazyFamily, CliError> {
        match &self.lazy {
            Some(l) => self.build_lazy(l),
            None => Ok(LazyFamily::finite(&self.pair_system()?)),
        }
    }

    fn build_lazy(&self, l: &LazySpec) -> Result<LazyFamily, CliError> {
        let check_keys = |map: &BTreeMap<String, f64>, path: &str, allowed: &[&str]| {
            match map.keys().find(|k| !allowed.contains(&k.as_str())) {
                Some(k) => Err(invalid(&join(path, k), "unknown parameter")),
                None => Ok(()),
            }
        };
        check_keys(&l.envelope, "lazy.envelope", &["scale"])?;
        let scale = l.envelope.get("scale").copied().unwrap_or(1.0);
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(invalid("lazy.envelope.scale", "must be a nonnegative number"));
        }
        let x = self.space();
        let fam = match l.generator.as_str() {
            "geometric" => {
                check_keys(&l.parameters, "lazy.parameters", &["ratio"])?;
                let ratio = *l
                    .parameters
                    .get("ratio")
                    .ok_or_else(|| invalid("lazy.parameters.ratio", "required by the geometric generator"))?;
                LazyFamily::geometric(x, ratio).map_err(at("lazy.parameters.ratio"))?
            }
            "alternating_harmonic" => {
                check_keys(&l.parameters, "lazy.parameters", &[])?;
                LazyFamily::alternating_harmonic(x)
            }
            other => {
                return Err(invalid(
                    "lazy.generator",
                    format!("unknown generator {other:?} (known: {})", GENERATORS.join(", ")),
                ))
            }
        };
        Ok(fam.with_envelope_scale(scale))
    }

    pub fn to_value(&self) -> Value {
        let mut top = Map::new();
        let mut space = Map::new();
        space.insert("dim".into(), Value::from(self.dim));
        space.insert("p".into(), exponent_value(self.p));
        top.insert("space".into(), Value::Object(space));
        let mut seq = Map::new();
        seq.insert("p".into(), exponent_value(self.sequence_p));
        top.insert("sequence_space".into(), Value::Object(seq));
        if let Some(f) = &self.family_f {
            top.insert("family_F".into(), rows(f));
        }
        if let Some(g) = &self.family_g {
            top.insert("family_G".into(), rows(g));
        }
        if let Some(t) = &self.operator_t {
            top.insert("operator_T".into(), rows(t));
        }
        if let Some((v, w)) = &self.transforms {
            let mut t = Map::new();
            t.insert("V".into(), rows(v));
            t.insert("W".into(), rows(w));
            top.insert("transforms".into(), Value::Object(t));
        }
        if let Some(l) = &self.lazy {
            let nums = |m: &BTreeMap<String, f64>| Value::Object(m.iter().map(|(k, &x)| (k.clone(), num(x))).collect());
            let mut lz = Map::new();
            lz.insert("generator".into(), Value::String(l.generator.clone()));
            lz.insert("parameters".into(), nums(&l.parameters));
            lz.insert("envelope".into(), nums(&l.envelope));
            top.insert("lazy".into(), Value::Object(lz));
        }
        Value::Object(top)
    }
}

/// Names accepted by `lazy.generator`.
pub const GENERATORS: [&str; 2] = ["alternating_harmonic", "geometric"];
