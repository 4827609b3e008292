//! JSON file formats. Rationals travel as strings (`"3/2"`, `"0.5"`); bare
//! JSON numbers are read from their literal text, so `0.1` means exactly
//! `1/10`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use freelip::exactlp::{format_rational, parse_rational};
use freelip::{
    DeLeeuwMeasure, EdgeFunction, FiniteMetricSpace, FreeElement, PairSet, PointFunction, Rational,
    Space,
};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// A rational read from a JSON string or number literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q(pub Rational);

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = match Value::deserialize(d)? {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            other => return Err(de::Error::custom(format!("expected a rational, found {other}"))),
        };
        parse_rational(&text)
            .map(Q)
            .map_err(|e| de::Error::custom(format!("`{text}`: {e}")))
    }
}

impl Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

/// A point label; JSON numbers are accepted and kept as their literal text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => Ok(Label(s)),
            Value::Number(n) => Ok(Label(n.to_string())),
            other => Err(de::Error::custom(format!("expected a point label, found {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricFile {
    pub points: Vec<Label>,
    pub base: Label,
    pub d: Vec<Vec<Q>>,
}

/// Either a path to a metric file or the metric file inline.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(PathBuf),
    Inline(MetricFile),
}

impl<'de> Deserialize<'de> for SpaceRef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => Ok(SpaceRef::Path(PathBuf::from(s))),
            v @ Value::Object(_) => serde_json::from_value(v)
                .map(SpaceRef::Inline)
                .map_err(|e| de::Error::custom(format!("inline space: {e}"))),
            other => Err(de::Error::custom(format!(
                "expected a path or an inline metric, found {other}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementFile {
    pub space: SpaceRef,
    pub coeffs: BTreeMap<Label, Q>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassEntry {
    pub x: Label,
    pub y: Label,
    pub m: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub space: SpaceRef,
    pub masses: Vec<MassEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionFile {
    pub parts: Vec<Vec<(Label, Label)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub x: Label,
    pub y: Label,
    pub g: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFunctionFile {
    pub space: SpaceRef,
    pub values: Vec<EdgeEntry>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(&text).map_err(|message| CliError::Parse {
        path: path.to_path_buf(),
        message,
    })
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            inner.to_string()
        } else {
            format!("field `{path}`: {inner}")
        }
    })
}

impl MetricFile {
    /// Orders the points so that `base` comes first.
    pub fn to_space(&self) -> Result<FiniteMetricSpace, CliError> {
        let n = self.points.len();
        if self.d.len() != n || self.d.iter().any(|row| row.len() != n) {
            return Err(CliError::Input(format!(
                "`d` must be a {n}x{n} matrix matching `points`"
            )));
        }
        let base = self
            .points
            .iter()
            .position(|p| *p == self.base)
            .ok_or_else(|| CliError::Input(format!("base `{}` is not among the points", self.base.0)))?;
        let mut order = vec![base];
        order.extend((0..n).filter(|&i| i != base));
        let labels = order.iter().map(|&i| self.points[i].0.clone()).collect();
        let matrix = order
            .iter()
            .map(|&i| order.iter().map(|&j| self.d[i][j].0.clone()).collect())
            .collect();
        Ok(FiniteMetricSpace::new(labels, matrix)?)
    }

    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        MetricFile {
            points: space.labels().iter().cloned().map(Label).collect(),
            base: Label(space.label(0).to_string()),
            d: space
                .matrix()
                .iter()
                .map(|row| row.iter().cloned().map(Q).collect())
                .collect(),
        }
    }
}

impl SpaceRef {
    /// Paths are resolved relative to the directory of the referring file.
    pub fn load(&self, relative_to: &Path) -> Result<Space, CliError> {
        let file = match self {
            SpaceRef::Inline(m) => m.clone(),
            SpaceRef::Path(p) => {
                let dir = relative_to.parent().unwrap_or_else(|| Path::new("."));
                read_json::<MetricFile>(&dir.join(p))?
            }
        };
        Ok(Arc::new(file.to_space()?))
    }
}

pub fn load_space(path: &Path) -> Result<Space, CliError> {
    Ok(Arc::new(read_json::<MetricFile>(path)?.to_space()?))
}

pub fn load_element(path: &Path) -> Result<FreeElement, CliError> {
    let file: ElementFile = read_json(path)?;
    let space = file.space.load(path)?;
    let mut coeffs = vec![Rational::from_integer(0.into()); space.len()];
    for (label, value) in &file.coeffs {
        let i = space.index_of(&label.0)?;
        coeffs[i] = value.0.clone();
    }
    Ok(FreeElement::from_coeffs(space, coeffs)?)
}

pub fn load_measure(path: &Path) -> Result<DeLeeuwMeasure, CliError> {
    let file: MeasureFile = read_json(path)?;
    let space = file.space.load(path)?;
    let entries = file
        .masses
        .iter()
        .map(|e| Ok(((space.index_of(&e.x.0)?, space.index_of(&e.y.0)?), e.m.0.clone())))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(DeLeeuwMeasure::from_entries(space, entries)?)
}

pub fn load_partition(path: &Path, space: &FiniteMetricSpace) -> Result<Vec<PairSet>, CliError> {
    let file: PartitionFile = read_json(path)?;
    file.parts
        .iter()
        .map(|part| {
            part.iter()
                .map(|(x, y)| Ok((space.index_of(&x.0)?, space.index_of(&y.0)?)))
                .collect()
        })
        .collect()
}

pub fn load_edge_function(path: &Path) -> Result<EdgeFunction, CliError> {
    let file: EdgeFunctionFile = read_json(path)?;
    let space = file.space.load(path)?;
    let mut values: Vec<Option<Rational>> = vec![None; space.num_pairs()];
    for e in &file.values {
        let (x, y) = (space.index_of(&e.x.0)?, space.index_of(&e.y.0)?);
        if x == y {
            return Err(CliError::Input(format!("edge ({}, {}) joins a point to itself", e.x.0, e.y.0)));
        }
        values[space.pair_index(x, y)] = Some(e.g.0.clone());
    }
    let missing: Vec<String> = space
        .pairs()
        .filter(|&(x, y)| values[space.pair_index(x, y)].is_none())
        .map(|(x, y)| format!("({}, {})", space.label(x), space.label(y)))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Input(format!("edge function missing pairs {}", missing.join(", "))));
    }
    Ok(EdgeFunction::new(space, values.into_iter().map(Option::unwrap).collect())?)
}

pub fn rational(value: &Rational) -> Value {
    Value::String(format_rational(value))
}

pub fn label(space: &FiniteMetricSpace, i: usize) -> Value {
    Value::String(space.label(i).to_string())
}

/// Nonzero coefficients keyed by label, in point order.
pub fn element_json(m: &FreeElement) -> Value {
    let space = m.space();
    let map = m
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, a)| !num_is_zero(a))
        .map(|(i, a)| (space.label(i).to_string(), rational(a)))
        .collect::<serde_json::Map<_, _>>();
    Value::Object(map)
}

/// Nonzero values keyed by label, in point order.
pub fn function_json(f: &PointFunction) -> Value {
    let space = f.space();
    let map = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, a)| !num_is_zero(a))
        .map(|(i, a)| (space.label(i).to_string(), rational(a)))
        .collect::<serde_json::Map<_, _>>();
    Value::Object(map)
}

pub fn masses_json(mu: &DeLeeuwMeasure) -> Value {
    let space = mu.space();
    Value::Array(
        mu.entries()
            .map(|((x, y), m)| {
                serde_json::json!({ "x": label(space, x), "y": label(space, y), "m": rational(m) })
            })
            .collect(),
    )
}

/// A complete measure file: the space inline plus its masses.
pub fn measure_file_json(mu: &DeLeeuwMeasure) -> Value {
    serde_json::json!({
        "space": MetricFile::from_space(mu.space()),
        "masses": masses_json(mu),
    })
}

pub fn edge_json(g: &EdgeFunction) -> Value {
    let space = g.space();
    Value::Array(
        space
            .pairs()
            .map(|(x, y)| {
                serde_json::json!({ "x": label(space, x), "y": label(space, y), "g": rational(g.get(x, y)) })
            })
            .collect(),
    )
}

fn num_is_zero(a: &Rational) -> bool {
    *a.numer() == 0.into()
}
